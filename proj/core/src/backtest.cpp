#include "spikefolio/backtest.hpp"

#include <cmath>
#include <stdexcept>

namespace spikefolio {

BacktestResult backtest(const std::vector<RebalanceEntry>& schedule,
                        const ReturnMatrix& rm, double tx_cost_rate,
                        Eigen::Index end_row) {
  if (schedule.empty()) throw std::invalid_argument("backtest: empty schedule");
  if (end_row < 0) end_row = rm.num_periods();
  if (end_row > rm.num_periods())
    throw std::invalid_argument("backtest: end_row beyond return history");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& entry = schedule[i];
    if (entry.row < 0 || entry.row >= end_row)
      throw std::invalid_argument(
          "backtest: rebalance row out of range at date index " +
          std::to_string(entry.row));
    if (i > 0 && entry.row <= schedule[i - 1].row)
      throw std::invalid_argument("backtest: rebalance rows must increase");
    if (entry.weights.w.size() != rm.num_assets())
      throw std::invalid_argument("backtest: weight universe mismatch at " +
                                  rm.dates[static_cast<std::size_t>(entry.row)]);
    validate_weights(entry.weights.w);
  }

  BacktestResult out;
  out.equity.push_back(1.0);
  Eigen::VectorXd held = schedule.front().weights.w;
  std::size_t next = 0;
  for (Eigen::Index t = schedule.front().row; t < end_row; ++t) {
    double cost = 0.0;
    if (next < schedule.size() && schedule[next].row == t) {
      if (next > 0) {
        double turn = (schedule[next].weights.w - held).cwiseAbs().sum();
        out.turnover.push_back(turn);
        out.rebalance_rows.push_back(t);
        cost = tx_cost_rate * turn;
      }
      held = schedule[next].weights.w;
      ++next;
    }
    double r_p = held.dot(rm.returns.row(t));
    double equity_next = out.equity.back() * (1.0 - cost) * std::exp(r_p);
    if (!(equity_next > 0.0))
      throw std::runtime_error("backtest: non-positive equity at " +
                               rm.dates[static_cast<std::size_t>(t)]);
    out.dates.push_back(rm.dates[static_cast<std::size_t>(t)]);
    out.daily_returns.push_back(std::log(equity_next / out.equity.back()));
    out.equity.push_back(equity_next);
  }
  return out;
}

std::vector<double> rolling_sharpe(const std::vector<double>& daily_returns,
                                   int window, double risk_free, double eps) {
  if (window < 2) throw std::invalid_argument("rolling window must be >= 2");
  if (static_cast<int>(daily_returns.size()) < window)
    throw std::invalid_argument("rolling_sharpe: series shorter than window");
  std::vector<double> out;
  out.reserve(daily_returns.size() - static_cast<std::size_t>(window) + 1);
  for (std::size_t end = static_cast<std::size_t>(window);
       end <= daily_returns.size(); ++end) {
    double mean = 0.0;
    for (std::size_t i = end - static_cast<std::size_t>(window); i < end; ++i)
      mean += daily_returns[i];
    mean /= window;
    double ss = 0.0;
    for (std::size_t i = end - static_cast<std::size_t>(window); i < end; ++i)
      ss += (daily_returns[i] - mean) * (daily_returns[i] - mean);
    double sd = std::sqrt(ss / (window - 1));
    out.push_back((mean - risk_free) / (sd + eps));
  }
  return out;
}

double max_drawdown(const std::vector<double>& equity) {
  if (equity.empty()) throw std::invalid_argument("max_drawdown: empty curve");
  double peak = equity.front();
  double worst = 0.0;
  for (double e : equity) {
    if (!(e > 0.0))
      throw std::invalid_argument("max_drawdown: non-positive equity");
    peak = std::max(peak, e);
    worst = std::max(worst, 1.0 - e / peak);
  }
  return worst;
}

SparsityStats sparsity_stats(const SpikeRaster& raster) {
  SparsityStats s;
  s.total_spikes = raster.total_spikes();
  double cells = static_cast<double>(raster.steps) *
                 static_cast<double>(raster.neurons);
  s.sparsity = cells > 0.0 ? 1.0 - static_cast<double>(s.total_spikes) / cells
                           : 1.0;
  return s;
}

double concentration_hhi(const PortfolioWeights& w) {
  return w.w.squaredNorm();
}

}  // namespace spikefolio
