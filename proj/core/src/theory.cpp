#include "sparsegd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparsegd::theory {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_positive(double value, const char* what) {
  if (!(value > 0.0)) throw std::invalid_argument(std::string(what) + " must be > 0");
}

double int_pow(double base, int exponent) {
  double out = 1.0;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

}  // namespace

std::optional<double> phi(double w_max, double w_min, double epsilon, int depth) {
  if (depth < 2) throw std::invalid_argument("phi: depth must be >= 2");
  if (depth == 2) return std::nullopt;
  check_positive(w_min, "phi: w_min");
  check_positive(epsilon, "phi: epsilon");
  if (w_max < w_min) throw std::invalid_argument("phi: w_max must be >= w_min");
  const double n = static_cast<double>(depth);
  const double t1 = std::pow(1.0 / 8.0, 2.0 / (n - 2.0));
  auto log_term = [&](double w, double exponent) {
    const double log = std::log(w / epsilon);
    if (log <= 0.0) return kInf;  // vacuous bound
    return std::pow(std::pow(w, (n - 2.0) / n) / log, exponent);
  };
  const double t2 = log_term(w_max, 2.0 / (n - 2.0));
  const double t3 = log_term(w_min, 4.0 / (n - 2.0));
  return std::min({t1, t2, t3});
}

std::optional<double> psi(double w_min, int depth) {
  if (depth < 2) throw std::invalid_argument("psi: depth must be >= 2");
  if (depth == 2) return std::nullopt;
  if (w_min < 0.0) throw std::invalid_argument("psi: w_min must be >= 0");
  const double n = static_cast<double>(depth);
  const double root = std::pow(w_min, 1.0 / n);
  const double a = std::pow(2.0 - std::pow(2.0, (n - 2.0) / n), 1.0 / (n - 2.0));
  const double b = std::pow(2.0, 3.0 / n) * std::pow(std::pow(2.0, 1.0 / n) - 1.0, 1.0 / (n - 2.0));
  return std::min(a, b) * root;
}

double zeta(double w_min, double noise_linf, double epsilon) {
  if (w_min < 0.0 || noise_linf < 0.0 || epsilon < 0.0)
    throw std::invalid_argument("zeta: inputs must be >= 0");
  return std::max({w_min / 5.0, 200.0 * noise_linf, 200.0 * epsilon});
}

AlphaMax alpha_max(Eigen::Index p, double epsilon, double w_max, double w_min, int depth,
                   Eigen::Index k) {
  if (p < 1) throw std::invalid_argument("alpha_max: p must be >= 1");
  check_positive(epsilon, "alpha_max: epsilon");
  if (depth < 2) throw std::invalid_argument("alpha_max: depth must be >= 2");
  AlphaMax out;
  out.value = std::pow(epsilon / (static_cast<double>(p) + 1.0), 4.0 / static_cast<double>(depth));
  if (k == 0 || depth == 2) return out;
  out.depth_terms_applicable = true;
  out.value = std::min({out.value, *phi(w_max, w_min, epsilon, depth), *psi(w_min, depth)});
  return out;
}

double eta_max(double alpha, int depth, double w_max) {
  check_positive(alpha, "eta_max: alpha");
  check_positive(w_max, "eta_max: w_max");
  if (depth < 2) throw std::invalid_argument("eta_max: depth must be >= 2");
  const double n = static_cast<double>(depth);
  return int_pow(alpha, depth) / (8.0 * n * n * std::pow(w_max, (3.0 * n - 2.0) / n));
}

double eta_max_null(double alpha, int depth, double zeta_value) {
  check_positive(alpha, "eta_max_null: alpha");
  check_positive(zeta_value, "eta_max_null: zeta");
  if (depth < 2) throw std::invalid_argument("eta_max_null: depth must be >= 2");
  const double n = static_cast<double>(depth);
  return 1.0 / (n * (n - 1.0) * zeta_value * std::pow(alpha, (n - 2.0) / 2.0));
}

std::optional<Window> stopping_window(double w_max, double w_min, double alpha, double eta,
                                      double zeta_value, double epsilon, int depth,
                                      double noise_linf) {
  if (depth < 2) throw std::invalid_argument("stopping_window: depth must be >= 2");
  if (depth == 2) return std::nullopt;
  check_positive(alpha, "stopping_window: alpha");
  check_positive(eta, "stopping_window: eta");
  check_positive(zeta_value, "stopping_window: zeta");
  check_positive(epsilon, "stopping_window: epsilon");
  check_positive(w_min, "stopping_window: w_min");
  if (w_max < w_min) throw std::invalid_argument("stopping_window: w_max must be >= w_min");

  const double n = static_cast<double>(depth);
  Window window;
  window.indicator_a = w_min / 5.0 > std::max(200.0 * noise_linf, 200.0 * epsilon);

  window.t1 = 75.0 / (16.0 * eta * n * n * std::pow(zeta_value, (2.0 * n - 2.0) / n)) *
                  std::log(std::abs(w_max - int_pow(alpha, depth)) / epsilon) +
              15.0 / (8.0 * n * (n - 2.0) * eta * zeta_value * std::pow(alpha, n - 2.0));
  window.t2 = 5.0 / (n * (n - 1.0) * eta * zeta_value) *
              (std::pow(alpha, -(n - 2.0)) - std::pow(alpha, -(n - 2.0) / 2.0));
  window.t3 = 6.0 / (eta * n * n * std::pow(w_min, (2.0 * n - 2.0) / n)) *
              std::log(w_min / epsilon);
  window.t4 = 25.0 / (n * (n - 1.0) * eta * w_min) *
              (std::pow(alpha, -(n - 2.0) / 2.0) - std::pow(alpha, -(n - 2.0) / 4.0));

  window.t_lower = window.t1 + (window.indicator_a ? window.t3 : 0.0);
  window.t_upper = window.t2 + (window.indicator_a ? window.t4 : 0.0);
  window.feasible = window.t_lower <= window.t_upper;
  return window;
}

double reported_iterations(double t) {
  constexpr double kMax = 9223372036854775807.0;  // 2^63 - 1
  return t > kMax ? kInf : t;
}

double window_size(const Window& window) { return window.t_upper - window.t_lower; }

namespace {

bool strictly_increasing(const std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) return false;
  return true;
}

}  // namespace

MonotoneReport window_monotone_in_depth(double w_max, double w_min, double alpha, double eta,
                                        double epsilon, double noise_linf,
                                        const std::vector<int>& depths) {
  const double z = zeta(w_min, noise_linf, epsilon);
  MonotoneReport report;
  report.hypotheses_ok = z >= 1.0 && w_max >= 1.0 && alpha <= std::exp(-5.0 / 3.0);
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] <= 2)
      throw std::invalid_argument("window_monotone_in_depth: window undefined at depth 2");
    if (i > 0 && depths[i] <= depths[i - 1]) report.hypotheses_ok = false;
    const auto window =
        stopping_window(w_max, w_min, alpha, eta, z, epsilon, depths[i], noise_linf);
    report.window_sizes.push_back(window_size(*window));
  }
  report.strictly_increasing = strictly_increasing(report.window_sizes);
  return report;
}

MonotoneReport window_monotone_in_alpha(double w_max, double w_min, double eta, double epsilon,
                                        double noise_linf, int depth,
                                        const std::vector<double>& alphas) {
  if (depth <= 2)
    throw std::invalid_argument("window_monotone_in_alpha: window undefined at depth 2");
  const double z = zeta(w_min, noise_linf, epsilon);
  MonotoneReport report;
  report.hypotheses_ok = true;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] < 1.0) || (i > 0 && !(alphas[i] < alphas[i - 1]))) report.hypotheses_ok = false;
    const auto window =
        stopping_window(w_max, w_min, alphas[i], eta, z, epsilon, depth, noise_linf);
    report.window_sizes.push_back(window_size(*window));
  }
  report.strictly_increasing = strictly_increasing(report.window_sizes);
  return report;
}

Decomposition decompose(const Eigen::VectorXd& w_plus, const Eigen::VectorXd& w_minus,
                        const SparseSignal& truth) {
  if (w_plus.size() != truth.p() || w_minus.size() != truth.p())
    throw std::invalid_argument("decompose: dimension mismatch");
  Decomposition out;
  out.signal = Eigen::VectorXd::Zero(truth.p());
  out.error = Eigen::VectorXd::Zero(truth.p());
  std::size_t next = 0;
  for (Eigen::Index i = 0; i < truth.p(); ++i) {
    const bool on_support = next < truth.support.size() && truth.support[next] == i;
    if (on_support) ++next;
    if (!on_support) {
      out.error[i] = w_plus[i] - w_minus[i];
    } else if (truth.values[i] > 0.0) {
      out.signal[i] = w_plus[i];
      out.error[i] = -w_minus[i];
    } else {
      out.signal[i] = -w_minus[i];
      out.error[i] = w_plus[i];
    }
  }
  return out;
}

ErrorTerms error_terms(const DesignMatrix& design, const Eigen::VectorXd& xi,
                       const Decomposition& decomposition, const SparseSignal& truth) {
  if (xi.size() != design.n()) throw std::invalid_argument("error_terms: xi dimension mismatch");
  if (decomposition.signal.size() != design.p() || truth.p() != design.p())
    throw std::invalid_argument("error_terms: dimension mismatch");
  const double n = static_cast<double>(design.n());
  const Eigen::MatrixXd& x = design.entries;
  ErrorTerms out;
  out.b = x.transpose() * (x * decomposition.error) / n - x.transpose() * xi / n;
  const Eigen::VectorXd gap = decomposition.signal - truth.values;
  out.p_term = x.transpose() * (x * gap) / n - gap;
  return out;
}

double predicted_error(ErrorRegime regime, const PredictedErrorInputs& inputs) {
  switch (regime) {
    case ErrorRegime::on_support_small_signal:
      return std::max(inputs.noise_linf, inputs.epsilon);
    case ErrorRegime::on_support_large_signal:
      return std::max({inputs.per_coord_noise,
                       static_cast<double>(inputs.k) * inputs.mu * inputs.support_noise_linf,
                       inputs.epsilon});
    case ErrorRegime::off_support:
      return std::pow(inputs.w0, 0.25);
  }
  throw std::invalid_argument("predicted_error: unknown regime");
}

TheoryReport make_report(const BoundsInput& inputs) {
  TheoryReport report;
  report.inputs = inputs;
  report.zeta = zeta(inputs.k > 0 ? inputs.w_min : 0.0, inputs.noise_linf, inputs.epsilon);
  report.alpha_max =
      alpha_max(inputs.p, inputs.epsilon, inputs.w_max, inputs.w_min, inputs.depth, inputs.k);
  if (inputs.k > 0) {
    report.phi = phi(inputs.w_max, inputs.w_min, inputs.epsilon, inputs.depth);
    report.psi = psi(inputs.w_min, inputs.depth);
    report.eta_max = eta_max(inputs.alpha, inputs.depth, inputs.w_max);
    // The window needs a candidate step size; without one the report stops at
    // the caps.
    if (inputs.depth > 2 && inputs.eta > 0.0) {
      report.window = stopping_window(inputs.w_max, inputs.w_min, inputs.alpha, inputs.eta,
                                      report.zeta, inputs.epsilon, inputs.depth, inputs.noise_linf);
    }
  } else {
    report.eta_max = eta_max_null(inputs.alpha, inputs.depth, report.zeta);
  }
  report.predicted_off_support = std::pow(int_pow(inputs.alpha, inputs.depth), 0.25);
  return report;
}

}  // namespace sparsegd::theory
