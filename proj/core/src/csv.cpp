#include "sparsegd/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sparsegd::csv {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, ptr);
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

static std::vector<double> parse_line(const std::string& line, const std::filesystem::path& path) {
  std::vector<double> row;
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (p < end) {
    double value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc())
      throw std::runtime_error("malformed number in " + path.string() + ": " + line);
    row.push_back(value);
    p = next;
    if (p < end) {
      if (*p != ',') throw std::runtime_error("expected ',' in " + path.string() + ": " + line);
      ++p;
    }
  }
  return row;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(parse_line(line, path));
    if (rows.back().size() != rows.front().size())
      throw std::runtime_error("ragged rows in " + path.string());
  }
  if (rows.empty()) throw std::runtime_error("empty matrix file: " + path.string());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

Eigen::VectorXd read_vector(const std::filesystem::path& path) {
  Eigen::MatrixXd m = read_matrix(path);
  if (m.cols() != 1) throw std::runtime_error("expected one column in " + path.string());
  return m.col(0);
}

}  // namespace sparsegd::csv
