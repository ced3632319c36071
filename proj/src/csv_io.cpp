#include "kmanifold/csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string_view>
#include <vector>

#include "kmanifold/errors.hpp"

namespace kmanifold {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string where(const std::string& path, std::size_t line) { return path + ":" + std::to_string(line); }

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return in;
}

}  // namespace

Dataset read_csv(const std::string& path, bool has_header) {
  std::ifstream in = open_input(path);
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (has_header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    std::size_t count = 0;
    std::string_view rest(line);
    while (true) {
      const std::size_t comma = rest.find(',');
      const std::string_view field = trim(rest.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(where(path, line_no) + ": column " + std::to_string(count + 1) + ": cannot parse '" +
                         std::string(field) + "' as a number");
      }
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) cols = count;
    else if (count != cols)
      throw RaggedRows(where(path, line_no) + ": expected " + std::to_string(cols) + " fields, found " +
                       std::to_string(count));
    ++rows;
  }
  Dataset ds;
  ds.X = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  ds.provenance = path;
  return ds;
}

void write_csv(const Matrix& X, const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw InvalidArgument("cannot write " + path);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) std::fprintf(f.get(), j ? ",%.17g" : "%.17g", X(i, j));
    std::fputc('\n', f.get());
  }
}

ClusterLabels read_labels(const std::string& path) {
  std::ifstream in = open_input(path);
  ClusterLabels labels;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const std::string_view s = trim(line);
    if (s.empty()) continue;
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ParseError(where(path, line_no) + ": column 1: cannot parse '" + std::string(s) + "' as a label");
    labels.push_back(v);
  }
  return labels;
}

void write_labels(const ClusterLabels& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  for (int l : labels) out << l << '\n';
}

}  // namespace kmanifold
