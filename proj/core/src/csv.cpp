#include "spikefolio/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spikefolio::csv {

namespace {
std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}
}  // namespace

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::vector<Row> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<Row> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    rows.push_back(Row{split_line(line), lineno});
  }
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_wide_matrix(const std::string& path,
                       const std::vector<std::string>& dates,
                       const std::vector<std::string>& tickers,
                       const Eigen::MatrixXd& values) {
  if (static_cast<Eigen::Index>(dates.size()) != values.rows() ||
      static_cast<Eigen::Index>(tickers.size()) != values.cols())
    throw std::invalid_argument("write_wide_matrix: shape mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "date";
  for (const auto& t : tickers) out << ',' << t;
  out << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    out << dates[r];
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      out << ',' << format_double(values(r, c));
    out << '\n';
  }
}

WideMatrix read_wide_matrix(const std::string& path) {
  auto rows = read_file(path);
  if (rows.empty()) throw std::runtime_error("empty matrix file: " + path);
  const auto& header = rows.front().fields;
  if (header.empty() || header[0] != "date")
    throw std::runtime_error("matrix file missing 'date' header: " + path);
  WideMatrix wm;
  wm.tickers.assign(header.begin() + 1, header.end());
  const auto n = static_cast<Eigen::Index>(wm.tickers.size());
  wm.values.resize(static_cast<Eigen::Index>(rows.size()) - 1, n);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (static_cast<Eigen::Index>(row.fields.size()) != n + 1)
      throw std::runtime_error(path + ": line " + std::to_string(row.line) +
                               ": expected " + std::to_string(n + 1) +
                               " fields");
    wm.dates.push_back(row.fields[0]);
    for (Eigen::Index c = 0; c < n; ++c) {
      const std::string& f = row.fields[c + 1];
      double v = 0.0;
      auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw std::runtime_error(path + ": line " + std::to_string(row.line) +
                                 ": bad number '" + f + "'");
      wm.values(static_cast<Eigen::Index>(i) - 1, c) = v;
    }
  }
  return wm;
}

}  // namespace spikefolio::csv
