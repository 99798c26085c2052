#include "sparsegd/oned.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "sparsegd/csv.hpp"

namespace sparsegd::oned {

namespace {

// Plain left-to-right product. Keeps the arithmetic identical to the vector
// optimizer's integer power so the 1-d reduction comparison is exact.
double int_pow(double base, int exponent) {
  double out = 1.0;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

// x^{(N-2)/N} for x >= 0; the fractional power is only defined there.
double frac_pow(double x, int depth) {
  if (depth == 2) return 1.0;
  return std::pow(x, (static_cast<double>(depth) - 2.0) / static_cast<double>(depth));
}

void check_depth(int depth) {
  if (depth < 2) throw std::invalid_argument("depth must be >= 2");
}

}  // namespace

double PairState::x(int depth) const { return int_pow(u, depth) - int_pow(v, depth); }

double signal_step(double x, double x_star, double b, double eta, int depth) {
  check_depth(depth);
  if (x < 0.0) throw std::invalid_argument("signal_step: x must be >= 0");
  const double factor =
      1.0 - 2.0 * depth * eta * (x - x_star + b) * frac_pow(x, depth);
  return x * int_pow(factor, depth);
}

double error_growth_step(double x, double bound, double eta, int depth) {
  check_depth(depth);
  if (x < 0.0) throw std::invalid_argument("error_growth_step: x must be >= 0");
  const double factor = 1.0 + 2.0 * depth * eta * bound * frac_pow(x, depth);
  return x * int_pow(factor, depth);
}

double error_containment_time(double x0, double bound, double eta, int depth) {
  check_depth(depth);
  if (x0 <= 0.0 || x0 >= 1.0)
    throw std::invalid_argument("error_containment_time: needs 0 < x0 < 1");
  if (bound <= 0.0 || eta <= 0.0)
    throw std::invalid_argument("error_containment_time: needs B > 0 and eta > 0");
  const double n = static_cast<double>(depth);
  const double e1 = std::pow(x0, -(n - 2.0) / n);
  const double e2 = std::pow(x0, -(n - 2.0) / (2.0 * n));
  return (e1 - e2) / (8.0 * n * (n - 1.0) * eta * bound);
}

PairState pair_step(PairState state, double x_star, double b, double eta, int depth) {
  check_depth(depth);
  if (state.u <= 0.0 || state.v <= 0.0)
    throw std::invalid_argument("pair_step: u and v must be > 0");
  const double x = state.x(depth);
  const double drive = x - x_star + b;
  PairState next;
  next.u = state.u * (1.0 - 2.0 * depth * eta * drive * int_pow(state.u, depth - 2));
  next.v = state.v * (1.0 + 2.0 * depth * eta * drive * int_pow(state.v, depth - 2));
  return next;
}

std::vector<double> simulate(const ScalarSeqParams& params, SequenceKind kind) {
  if (kind == SequenceKind::pair)
    throw std::invalid_argument("simulate: use simulate_pair for the pair kind");
  if (params.alpha <= 0.0) throw std::invalid_argument("simulate: alpha must be > 0");
  if (params.eta <= 0.0) throw std::invalid_argument("simulate: eta must be > 0");
  std::vector<double> history;
  history.reserve(params.steps + 1);
  double x = int_pow(params.alpha, params.depth);
  history.push_back(x);
  for (std::size_t t = 0; t < params.steps; ++t) {
    x = kind == SequenceKind::signal
            ? signal_step(x, params.x_star, params.bound, params.eta, params.depth)
            : error_growth_step(x, params.bound, params.eta, params.depth);
    history.push_back(x);
  }
  return history;
}

std::vector<PairState> simulate_pair(const ScalarSeqParams& params) {
  if (params.alpha <= 0.0) throw std::invalid_argument("simulate_pair: alpha must be > 0");
  if (params.eta <= 0.0) throw std::invalid_argument("simulate_pair: eta must be > 0");
  std::vector<PairState> history;
  history.reserve(params.steps + 1);
  PairState state{params.alpha, params.alpha};
  history.push_back(state);
  for (std::size_t t = 0; t < params.steps; ++t) {
    state = pair_step(state, params.x_star, params.bound, params.eta, params.depth);
    history.push_back(state);
  }
  return history;
}

void write_sequence_csv(const std::filesystem::path& path, const std::vector<double>& history) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "t,x\n";
  for (std::size_t t = 0; t < history.size(); ++t)
    out << t << ',' << csv::format_double(history[t]) << '\n';
}

void write_pair_csv(const std::filesystem::path& path, const std::vector<PairState>& history,
                    int depth) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "t,u,v,x\n";
  for (std::size_t t = 0; t < history.size(); ++t) {
    out << t << ',' << csv::format_double(history[t].u) << ',' << csv::format_double(history[t].v)
        << ',' << csv::format_double(history[t].x(depth)) << '\n';
  }
}

}  // namespace sparsegd::oned
