#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace spikefolio {

using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/**
 * @brief Dates x assets grid of closing prices with per-cell missingness.
 *
 * Dates are ISO-8601 strings and strictly increasing. The observed mask
 * records which cells were present in the source file; imputation fills
 * price values but never flips the mask.
 */
struct PriceMatrix {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  std::vector<std::string> markets;  ///< per-ticker market label ("IN"/"US"); empty if unassigned
  Eigen::MatrixXd prices;            ///< T x N; NaN where not yet imputed
  BoolGrid observed;                 ///< T x N; original presence

  Eigen::Index num_dates() const { return prices.rows(); }
  Eigen::Index num_assets() const { return prices.cols(); }
};

/**
 * @brief Dates x assets grid of log returns.
 *
 * Row t holds ln(P[t+1]/P[t]), stamped with the date the return realized
 * (the later of the two days), so there are T-1 rows for T price dates.
 */
struct ReturnMatrix {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  std::vector<std::string> markets;
  Eigen::MatrixXd returns;  ///< (T-1) x N

  Eigen::Index num_periods() const { return returns.rows(); }
  Eigen::Index num_assets() const { return returns.cols(); }
};

/**
 * @brief Per-asset z-scored returns plus the moments used to produce them.
 *
 * Zero-variance columns are mapped to all-zeros and flagged degenerate
 * instead of dividing by zero.
 */
struct NormalizedReturns {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  Eigen::MatrixXd values;    ///< (T-1) x N
  Eigen::VectorXd mu;        ///< per-asset sample mean of raw returns
  Eigen::VectorXd sigma;     ///< per-asset sample standard deviation
  std::vector<bool> degenerate;

  Eigen::Index num_periods() const { return values.rows(); }
  Eigen::Index num_assets() const { return values.cols(); }
};

enum class ImputeMode {
  ForwardFill,  ///< interior gaps carry the last observed value forward
  Linear        ///< interior gaps interpolate linearly between neighbours
};

/// Parses the documented price CSV (`date,ticker,close`; blank or NaN close
/// means missing). Throws std::runtime_error naming the line on malformed
/// rows, duplicate (date,ticker) pairs, or non-positive prices.
PriceMatrix load_prices(const std::string& path);

/// Assigns market labels from a `ticker,market` CSV. Tickers absent from the
/// file keep an empty label; unknown tickers in the file are ignored.
void apply_universe(PriceMatrix& pm, const std::string& universe_path);

struct CalendarAlignment {
  PriceMatrix pm;
  int dropped_dates = 0;
};

/// Intersects trading calendars across markets: a date survives only if every
/// market label present in the universe has at least one observed price on
/// it. With a single market this just drops fully-empty rows.
CalendarAlignment align_market_calendars(const PriceMatrix& pm);

struct CleanResult {
  PriceMatrix pm;
  std::vector<std::string> dropped;
};

/// Keeps tickers whose observed fraction is >= min_completeness, preserving
/// column order. Throws if the threshold is out of (0,1] or every ticker is
/// dropped.
CleanResult clean_universe(const PriceMatrix& pm, double min_completeness);

/// Fills every missing cell: leading gaps back-fill from the first observed
/// value, interior/trailing gaps per the mode. Deterministic; requires at
/// least one observed cell per ticker.
PriceMatrix impute_missing(const PriceMatrix& pm,
                           ImputeMode mode = ImputeMode::ForwardFill);

/// Log returns of a fully imputed matrix. Throws std::domain_error on any
/// non-positive or missing price.
ReturnMatrix log_returns(const PriceMatrix& pm);

/// Column-wise z-score with sample moments (ddof = 1).
NormalizedReturns zscore_normalize(const ReturnMatrix& rm);

}  // namespace spikefolio
