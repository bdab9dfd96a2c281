#include "spikefolio/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "spikefolio/csv.hpp"

namespace spikefolio {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_nan_literal(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s == "nan" || s == "na";
}

double parse_price(const std::string& field, int line) {
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw std::runtime_error("price file line " + std::to_string(line) +
                             ": unparseable close '" + field + "'");
  return v;
}

}  // namespace

PriceMatrix load_prices(const std::string& path) {
  auto rows = csv::read_file(path);
  if (rows.empty()) throw std::runtime_error("price file is empty: " + path);
  const auto& header = rows.front().fields;
  if (header.size() != 3 || header[0] != "date" || header[1] != "ticker" ||
      header[2] != "close")
    throw std::runtime_error(
        "price file must start with header 'date,ticker,close': " + path);

  struct Cell {
    double value;
    bool present;
  };
  std::set<std::string> date_set;
  std::vector<std::string> tickers;  // first-appearance order
  std::unordered_map<std::string, int> ticker_ix;
  std::map<std::pair<std::string, std::string>, Cell> cells;

  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.fields.size() != 3)
      throw std::runtime_error("price file line " + std::to_string(row.line) +
                               ": expected 3 fields, got " +
                               std::to_string(row.fields.size()));
    const std::string& date = row.fields[0];
    const std::string& ticker = row.fields[1];
    const std::string& close = row.fields[2];
    if (date.size() != 10 || date[4] != '-' || date[7] != '-')
      throw std::runtime_error("price file line " + std::to_string(row.line) +
                               ": date '" + date + "' is not YYYY-MM-DD");
    if (ticker.empty())
      throw std::runtime_error("price file line " + std::to_string(row.line) +
                               ": empty ticker");
    auto key = std::make_pair(date, ticker);
    if (cells.count(key))
      throw std::runtime_error("price file line " + std::to_string(row.line) +
                               ": duplicate (date,ticker) " + date + "," +
                               ticker);
    Cell cell{kNaN, false};
    if (!close.empty() && !is_nan_literal(close)) {
      double v = parse_price(close, row.line);
      if (v <= 0.0)
        throw std::runtime_error("price file line " + std::to_string(row.line) +
                                 ": non-positive price " + close + " for " +
                                 ticker);
      cell = Cell{v, true};
    }
    cells.emplace(key, cell);
    date_set.insert(date);
    if (!ticker_ix.count(ticker)) {
      ticker_ix.emplace(ticker, static_cast<int>(tickers.size()));
      tickers.push_back(ticker);
    }
  }
  if (tickers.empty()) throw std::runtime_error("price file has no data rows");

  PriceMatrix pm;
  pm.dates.assign(date_set.begin(), date_set.end());  // set is sorted; ISO dates sort correctly
  pm.tickers = tickers;
  pm.markets.assign(tickers.size(), "");
  const auto t_count = static_cast<Eigen::Index>(pm.dates.size());
  const auto n = static_cast<Eigen::Index>(tickers.size());
  pm.prices = Eigen::MatrixXd::Constant(t_count, n, kNaN);
  pm.observed = BoolGrid::Constant(t_count, n, false);

  std::unordered_map<std::string, Eigen::Index> date_ix;
  for (Eigen::Index r = 0; r < t_count; ++r) date_ix.emplace(pm.dates[r], r);
  for (const auto& [key, cell] : cells) {
    if (!cell.present) continue;
    Eigen::Index r = date_ix.at(key.first);
    Eigen::Index c = ticker_ix.at(key.second);
    pm.prices(r, c) = cell.value;
    pm.observed(r, c) = true;
  }
  return pm;
}

void apply_universe(PriceMatrix& pm, const std::string& universe_path) {
  auto rows = csv::read_file(universe_path);
  if (rows.empty())
    throw std::runtime_error("universe file is empty: " + universe_path);
  const auto& header = rows.front().fields;
  if (header.size() != 2 || header[0] != "ticker" || header[1] != "market")
    throw std::runtime_error(
        "universe file must start with header 'ticker,market': " +
        universe_path);
  std::unordered_map<std::string, std::string> market_of;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.fields.size() != 2)
      throw std::runtime_error("universe file line " +
                               std::to_string(row.line) +
                               ": expected 2 fields");
    const std::string& market = row.fields[1];
    if (market != "IN" && market != "US")
      throw std::runtime_error("universe file line " +
                               std::to_string(row.line) +
                               ": market must be IN or US, got '" + market +
                               "'");
    market_of[row.fields[0]] = market;
  }
  for (std::size_t i = 0; i < pm.tickers.size(); ++i) {
    auto it = market_of.find(pm.tickers[i]);
    if (it != market_of.end()) pm.markets[i] = it->second;
  }
}

CalendarAlignment align_market_calendars(const PriceMatrix& pm) {
  std::set<std::string> labels(pm.markets.begin(), pm.markets.end());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < pm.num_dates(); ++r) {
    bool all_markets_open = true;
    for (const auto& label : labels) {
      bool open = false;
      for (Eigen::Index c = 0; c < pm.num_assets() && !open; ++c)
        if (pm.markets[c] == label && pm.observed(r, c)) open = true;
      if (!open) {
        all_markets_open = false;
        break;
      }
    }
    if (all_markets_open) keep.push_back(r);
  }

  CalendarAlignment out;
  out.dropped_dates = static_cast<int>(pm.num_dates()) -
                      static_cast<int>(keep.size());
  out.pm.tickers = pm.tickers;
  out.pm.markets = pm.markets;
  out.pm.prices.resize(static_cast<Eigen::Index>(keep.size()), pm.num_assets());
  out.pm.observed.resize(static_cast<Eigen::Index>(keep.size()),
                         pm.num_assets());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.pm.dates.push_back(pm.dates[keep[i]]);
    out.pm.prices.row(static_cast<Eigen::Index>(i)) = pm.prices.row(keep[i]);
    out.pm.observed.row(static_cast<Eigen::Index>(i)) = pm.observed.row(keep[i]);
  }
  return out;
}

CleanResult clean_universe(const PriceMatrix& pm, double min_completeness) {
  if (!(min_completeness > 0.0) || min_completeness > 1.0)
    throw std::invalid_argument("min_completeness must be in (0, 1], got " +
                                std::to_string(min_completeness));
  const double t_count = static_cast<double>(pm.num_dates());
  std::vector<Eigen::Index> keep;
  CleanResult out;
  for (Eigen::Index c = 0; c < pm.num_assets(); ++c) {
    double frac =
        t_count > 0 ? pm.observed.col(c).cast<double>().sum() / t_count : 0.0;
    if (frac >= min_completeness)
      keep.push_back(c);
    else
      out.dropped.push_back(pm.tickers[c]);
  }
  if (keep.empty())
    throw std::runtime_error("clean_universe dropped every ticker (threshold " +
                             std::to_string(min_completeness) + ")");
  out.pm.dates = pm.dates;
  out.pm.prices.resize(pm.num_dates(), static_cast<Eigen::Index>(keep.size()));
  out.pm.observed.resize(pm.num_dates(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.pm.tickers.push_back(pm.tickers[keep[i]]);
    out.pm.markets.push_back(pm.markets[keep[i]]);
    out.pm.prices.col(static_cast<Eigen::Index>(i)) = pm.prices.col(keep[i]);
    out.pm.observed.col(static_cast<Eigen::Index>(i)) =
        pm.observed.col(keep[i]);
  }
  return out;
}

PriceMatrix impute_missing(const PriceMatrix& pm, ImputeMode mode) {
  PriceMatrix out = pm;
  const Eigen::Index t_count = pm.num_dates();
  for (Eigen::Index c = 0; c < pm.num_assets(); ++c) {
    Eigen::Index first_obs = -1;
    for (Eigen::Index r = 0; r < t_count; ++r)
      if (pm.observed(r, c)) {
        first_obs = r;
        break;
      }
    if (first_obs < 0)
      throw std::runtime_error("impute_missing: ticker " + pm.tickers[c] +
                               " has no observed prices");
    // Leading gap back-fills from the first observation.
    for (Eigen::Index r = 0; r < first_obs; ++r)
      out.prices(r, c) = pm.prices(first_obs, c);

    if (mode == ImputeMode::ForwardFill) {
      double last = pm.prices(first_obs, c);
      for (Eigen::Index r = first_obs; r < t_count; ++r) {
        if (pm.observed(r, c))
          last = pm.prices(r, c);
        else
          out.prices(r, c) = last;
      }
    } else {
      Eigen::Index prev = first_obs;
      for (Eigen::Index r = first_obs + 1; r < t_count; ++r) {
        if (!pm.observed(r, c)) continue;
        double lo = pm.prices(prev, c);
        double hi = pm.prices(r, c);
        for (Eigen::Index g = prev + 1; g < r; ++g) {
          double frac = static_cast<double>(g - prev) /
                        static_cast<double>(r - prev);
          out.prices(g, c) = lo + frac * (hi - lo);
        }
        prev = r;
      }
      // Trailing gap has no right neighbour; carry forward.
      for (Eigen::Index r = prev + 1; r < t_count; ++r)
        out.prices(r, c) = pm.prices(prev, c);
    }
  }
  return out;
}

ReturnMatrix log_returns(const PriceMatrix& pm) {
  const Eigen::Index t_count = pm.num_dates();
  if (t_count < 2)
    throw std::invalid_argument("log_returns needs at least 2 dates");
  for (Eigen::Index r = 0; r < t_count; ++r)
    for (Eigen::Index c = 0; c < pm.num_assets(); ++c) {
      double p = pm.prices(r, c);
      if (!std::isfinite(p) || p <= 0.0)
        throw std::domain_error("log_returns: non-positive or missing price at " +
                                pm.dates[r] + "," + pm.tickers[c]);
    }
  ReturnMatrix rm;
  rm.dates.assign(pm.dates.begin() + 1, pm.dates.end());
  rm.tickers = pm.tickers;
  rm.markets = pm.markets;
  rm.returns = (pm.prices.bottomRows(t_count - 1).array() /
                pm.prices.topRows(t_count - 1).array())
                   .log()
                   .matrix();
  return rm;
}

NormalizedReturns zscore_normalize(const ReturnMatrix& rm) {
  const Eigen::Index t_count = rm.num_periods();
  const Eigen::Index n = rm.num_assets();
  if (t_count < 2)
    throw std::invalid_argument("zscore_normalize needs at least 2 rows");
  NormalizedReturns out;
  out.dates = rm.dates;
  out.tickers = rm.tickers;
  out.mu.resize(n);
  out.sigma.resize(n);
  out.values.resize(t_count, n);
  out.degenerate.assign(static_cast<std::size_t>(n), false);
  for (Eigen::Index c = 0; c < n; ++c) {
    double mean = rm.returns.col(c).mean();
    double ss = (rm.returns.col(c).array() - mean).square().sum();
    double sd = std::sqrt(ss / static_cast<double>(t_count - 1));
    out.mu(c) = mean;
    out.sigma(c) = sd;
    if (sd > 0.0) {
      out.values.col(c) = (rm.returns.col(c).array() - mean) / sd;
    } else {
      out.values.col(c).setZero();
      out.degenerate[static_cast<std::size_t>(c)] = true;
    }
  }
  return out;
}

}  // namespace spikefolio
