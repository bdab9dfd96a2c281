#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spikefolio/market_data.hpp"
#include "spikefolio/portfolio_math.hpp"
#include "spikefolio/snn_types.hpp"

namespace spikefolio {

/// Weights to apply starting at (and including) a given return row.
struct RebalanceEntry {
  Eigen::Index row;
  PortfolioWeights weights;
};

struct BacktestResult {
  std::vector<std::string> dates;     ///< return dates covered
  std::vector<double> equity;         ///< size dates+1, equity[0] = 1.0
  std::vector<double> daily_returns;  ///< post-cost daily log returns
  std::vector<Eigen::Index> rebalance_rows;
  std::vector<double> turnover;       ///< per rebalance, sum |dw|
};

/**
 * @brief Applies a weight schedule to daily returns with proportional costs.
 *
 * Daily portfolio log return is sum_i w_i r_it with weights held constant
 * between rebalances. At each rebalance after the first, equity is charged
 * c_tc * turnover before the day's return accrues; the initial allocation is
 * free. Equity compounds multiplicatively from 1.0.
 */
BacktestResult backtest(const std::vector<RebalanceEntry>& schedule,
                        const ReturnMatrix& rm, double tx_cost_rate,
                        Eigen::Index end_row = -1);

/// Trailing-window Sharpe per Eq.-style window moments; output[i] covers
/// returns [i, i+window).
std::vector<double> rolling_sharpe(const std::vector<double>& daily_returns,
                                   int window, double risk_free, double eps);

/// Largest peak-to-trough fractional decline.
double max_drawdown(const std::vector<double>& equity);

struct SparsityStats {
  long long total_spikes = 0;
  double sparsity = 1.0;  ///< 1 - spikes / (steps * neurons)
};

SparsityStats sparsity_stats(const SpikeRaster& raster);

/// Herfindahl concentration of a weight vector.
double concentration_hhi(const PortfolioWeights& w);

}  // namespace spikefolio
