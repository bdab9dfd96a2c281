#include "spikefolio/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spikefolio {

void DecodeConfig::validate() const {
  if (window < 0) throw std::invalid_argument("decode window must be >= 0");
  if (risk_gamma < 0.0) throw std::invalid_argument("risk_gamma must be >= 0");
  if (k < 1) throw std::invalid_argument("decode k must be >= 1");
  if (flush_eps < 0.0) throw std::invalid_argument("flush_eps must be >= 0");
}

RawDecode decode_raw_weights(const SpikeRaster& raster, int population, int t0,
                             int len) {
  if (population < 1)
    throw std::invalid_argument("decode_raw_weights: empty populations");
  if (raster.neurons % population != 0)
    throw std::invalid_argument(
        "decode_raw_weights: neuron count not a multiple of population size");
  if (t0 < 0 || len < 1 || t0 + len > raster.steps)
    throw std::invalid_argument("decode_raw_weights: window out of bounds");
  const int n_assets = raster.neurons / population;

  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_assets);
  for (const auto& ev : raster.events) {
    if (ev.step < t0 || ev.step >= t0 + len) continue;
    counts(ev.neuron / population) += 1.0;
  }
  RawDecode out;
  double total = counts.sum();
  if (total == 0.0) {
    out.weights = Eigen::VectorXd::Constant(n_assets, 1.0 / n_assets);
    out.degenerate = true;
  } else {
    out.weights = counts / total;
  }
  return out;
}

Eigen::VectorXd risk_adjust(const Eigen::VectorXd& raw,
                            const Eigen::VectorXd& sigma, double risk_gamma) {
  if (raw.size() != sigma.size())
    throw std::invalid_argument("risk_adjust: dimension mismatch");
  if (risk_gamma == 0.0) return raw;
  Eigen::VectorXd scaled(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (raw(i) > 0.0 && !(sigma(i) > 0.0))
      throw std::domain_error(
          "risk_adjust: zero volatility with positive weight at index " +
          std::to_string(i));
    scaled(i) = raw(i) > 0.0 ? raw(i) / std::pow(sigma(i), risk_gamma) : 0.0;
  }
  double total = scaled.sum();
  if (total <= 0.0)
    throw std::domain_error("risk_adjust: no positive weights to normalise");
  return scaled / total;
}

CardinalityResult enforce_cardinality(const Eigen::VectorXd& adjusted,
                                      const std::vector<std::string>& tickers,
                                      int k, double flush_eps) {
  const Eigen::Index n = adjusted.size();
  if (static_cast<Eigen::Index>(tickers.size()) != n)
    throw std::invalid_argument("enforce_cardinality: ticker count mismatch");
  if (k < 1) throw std::invalid_argument("enforce_cardinality: k must be >= 1");
  Eigen::VectorXd flushed = flush_small_weights(adjusted, flush_eps);
  int positive = cardinality(flushed);
  if (positive == 0)
    throw std::domain_error("enforce_cardinality: all weights zero");

  CardinalityResult out;
  out.lowered = k > positive;
  out.effective_k = std::min(k, positive);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (flushed(a) != flushed(b)) return flushed(a) > flushed(b);
    return tickers[static_cast<std::size_t>(a)] <
           tickers[static_cast<std::size_t>(b)];
  });

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  double kept = 0.0;
  for (int i = 0; i < out.effective_k; ++i) {
    int ix = order[static_cast<std::size_t>(i)];
    w(ix) = flushed(ix);
    kept += flushed(ix);
  }
  w /= kept;
  out.weights.tickers = tickers;
  out.weights.w = w;
  return out;
}

DecodedPortfolio decode_portfolio(const SpikeRaster& raster, int population,
                                  const Eigen::VectorXd& sigma,
                                  const std::vector<std::string>& tickers,
                                  const DecodeConfig& cfg) {
  cfg.validate();
  int len = cfg.window > 0 ? std::min(cfg.window, raster.steps) : raster.steps;
  int t0 = raster.steps - len;  // most recent window
  RawDecode raw = decode_raw_weights(raster, population, t0, len);
  Eigen::VectorXd adjusted =
      raw.degenerate ? raw.weights
                     : risk_adjust(raw.weights, sigma, cfg.risk_gamma);
  auto card = enforce_cardinality(adjusted, tickers, cfg.k, cfg.flush_eps);
  DecodedPortfolio out;
  out.weights = std::move(card.weights);
  out.degenerate = raw.degenerate;
  out.effective_k = card.effective_k;
  return out;
}

}  // namespace spikefolio
