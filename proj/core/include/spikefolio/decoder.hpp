#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spikefolio/portfolio_math.hpp"
#include "spikefolio/snn_types.hpp"

namespace spikefolio {

struct DecodeConfig {
  int window = 0;          ///< decoding window in steps; 0 = full raster
  double risk_gamma = 1.0; ///< volatility-adjustment exponent
  int k = 40;              ///< target cardinality
  double flush_eps = 1e-12;

  void validate() const;
};

struct RawDecode {
  Eigen::VectorXd weights;  ///< per-asset spike share, sums to 1
  bool degenerate = false;  ///< true when the window had zero spikes (uniform fallback)
};

/// Population-count decode over raster steps [t0, t0+len). Each asset owns a
/// contiguous block of `population` neurons.
RawDecode decode_raw_weights(const SpikeRaster& raster, int population, int t0,
                             int len);

/// w_i = (raw_i / sigma_i^gamma) / sum_k (raw_k / sigma_k^gamma). Throws on
/// zero volatility carrying positive raw weight.
Eigen::VectorXd risk_adjust(const Eigen::VectorXd& raw,
                            const Eigen::VectorXd& sigma, double risk_gamma);

struct CardinalityResult {
  PortfolioWeights weights;
  int effective_k = 0;  ///< k actually used (lowered if support was short)
  bool lowered = false;
};

/// Keeps the top-K assets by adjusted weight (ties toward the
/// lexicographically smaller ticker), zeroes the rest, renormalises.
CardinalityResult enforce_cardinality(const Eigen::VectorXd& adjusted,
                                      const std::vector<std::string>& tickers,
                                      int k, double flush_eps = 1e-12);

struct DecodedPortfolio {
  PortfolioWeights weights;
  bool degenerate = false;
  int effective_k = 0;
};

/// Full decode chain: raw spike shares -> volatility adjustment -> top-K.
DecodedPortfolio decode_portfolio(const SpikeRaster& raster, int population,
                                  const Eigen::VectorXd& sigma,
                                  const std::vector<std::string>& tickers,
                                  const DecodeConfig& cfg);

}  // namespace spikefolio
