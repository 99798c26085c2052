#pragma once

#include <vector>

namespace sparsegd {

// Quantile with linear interpolation at position (m-1) q over the sorted
// values, the convention used for the repetition summaries.
double quantile(std::vector<double> values, double q);

struct SummarySeries {
  std::vector<double> median;
  std::vector<double> q25;
  std::vector<double> q75;
};

// Pointwise quartile summary of equally long series; q25 <= median <= q75
// holds at every index by construction.
SummarySeries quantile_summary(const std::vector<std::vector<double>>& series);

}  // namespace sparsegd
