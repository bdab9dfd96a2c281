#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace spikefolio::csv {

/// One parsed CSV row plus the 1-based line number it came from.
struct Row {
  std::vector<std::string> fields;
  int line = 0;
};

/// Reads an entire CSV file. Empty lines are skipped; fields are trimmed of
/// surrounding whitespace. No quoting support -- market data exports in this
/// project never quote.
std::vector<Row> read_file(const std::string& path);

std::vector<std::string> split_line(const std::string& line);

/// Writes a wide matrix as `date,<ticker...>` with one row per date.
void write_wide_matrix(const std::string& path,
                       const std::vector<std::string>& dates,
                       const std::vector<std::string>& tickers,
                       const Eigen::MatrixXd& values);

struct WideMatrix {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  Eigen::MatrixXd values;
};

WideMatrix read_wide_matrix(const std::string& path);

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

}  // namespace spikefolio::csv
