#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sparsegd::oned {

// One-dimensional reference sequences for the depth-N multiplicative
// dynamics. These are deliberately scalar re-implementations, independent of
// the vector optimizer, so they can serve as brute-force references in tests
// and as standalone analysis tools.

// x' = x (1 - 2 N eta (x - x_star + b) x^{(N-2)/N})^N, for x >= 0.
double signal_step(double x, double x_star, double b, double eta, int depth);

// Worst-case growth map x' = x (1 + 2 N eta B x^{(N-2)/N})^N for x >= 0.
double error_growth_step(double x, double bound, double eta, int depth);

// Time for which the worst-case growth sequence provably stays below
// sqrt(x0): (1 / (8 N (N-1) eta B)) (x0^{-(N-2)/N} - x0^{-(N-2)/(2N)}).
double error_containment_time(double x0, double bound, double eta, int depth);

struct PairState {
  double u = 0.0;
  double v = 0.0;

  double x(int depth) const;  // u^N - v^N
};

// u' = u (1 - 2 N eta (x - x_star + b) u^{N-2}),
// v' = v (1 + 2 N eta (x - x_star + b) v^{N-2}), with x = u^N - v^N.
// Requires u, v > 0.
PairState pair_step(PairState state, double x_star, double b, double eta, int depth);

enum class SequenceKind { signal, error_growth, pair };

struct ScalarSeqParams {
  double x_star = 0.0;   // target (signal / pair kinds)
  double alpha = 0.0;    // initial scale; signal and error kinds start at alpha^N
  double eta = 0.0;
  int depth = 2;
  double bound = 0.0;    // B, the error magnitude
  std::size_t steps = 0;
};

// Full history of the chosen sequence; history[0] is the initial state.
std::vector<double> simulate(const ScalarSeqParams& params, SequenceKind kind);
std::vector<PairState> simulate_pair(const ScalarSeqParams& params);

// Sequence CSV with header "t,x" (scalar kinds) or "t,u,v,x" (pair kind).
void write_sequence_csv(const std::filesystem::path& path, const std::vector<double>& history);
void write_pair_csv(const std::filesystem::path& path, const std::vector<PairState>& history,
                    int depth);

}  // namespace sparsegd::oned
