#include "sparsegd/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparsegd {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty input");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double position = (static_cast<double>(values.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(position));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(position));
  const double frac = position - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

SummarySeries quantile_summary(const std::vector<std::vector<double>>& series) {
  if (series.empty()) throw std::invalid_argument("quantile_summary: empty input");
  const std::size_t length = series.front().size();
  for (const auto& s : series)
    if (s.size() != length) throw std::invalid_argument("quantile_summary: unequal lengths");
  SummarySeries out;
  out.median.reserve(length);
  out.q25.reserve(length);
  out.q75.reserve(length);
  std::vector<double> column(series.size());
  for (std::size_t i = 0; i < length; ++i) {
    for (std::size_t s = 0; s < series.size(); ++s) column[s] = series[s][i];
    out.q25.push_back(quantile(column, 0.25));
    out.median.push_back(quantile(column, 0.5));
    out.q75.push_back(quantile(column, 0.75));
  }
  return out;
}

}  // namespace sparsegd
