#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sparsegd/problem.hpp"

namespace sparsegd::theory {

// Closed-form quantities controlling when gradient descent on the depth-N
// parametrization provably recovers a sparse signal. Everything here is a
// pure function of scalars; logs are natural throughout. Quantities with a
// 1/(N-2) exponent are undefined at depth 2 and come back empty there.

// Initialization cap terms. Terms whose log(w / epsilon) is not positive are
// vacuous and treated as +infinity inside the minimum.
std::optional<double> phi(double w_max, double w_min, double epsilon, int depth);
std::optional<double> psi(double w_min, int depth);

// zeta = max(w_min / 5, 200 * noise_linf, 200 * epsilon).
double zeta(double w_min, double noise_linf, double epsilon);

struct AlphaMax {
  double value = 0.0;
  // False at depth 2 or k = 0, where only the (epsilon/(p+1))^{4/N} term
  // applies and the phi/psi terms are not defined or not required.
  bool depth_terms_applicable = false;
};

AlphaMax alpha_max(Eigen::Index p, double epsilon, double w_max, double w_min, int depth,
                   Eigen::Index k);

// Step size caps: the k >= 1 cap alpha^N / (8 N^2 w_max^{(3N-2)/N}) and the
// null-signal cap 1 / (N (N-1) zeta alpha^{(N-2)/2}).
double eta_max(double alpha, int depth, double w_max);
double eta_max_null(double alpha, int depth, double zeta_value);

struct Window {
  double t_lower = 0.0;  // T1 + 1(A) T3
  double t_upper = 0.0;  // T2 + 1(A) T4
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
  bool indicator_a = false;  // (1/5) w_min > max(200 noise_linf, 200 epsilon)
  bool feasible = false;     // t_lower <= t_upper
};

// Early-stopping window bounds; empty at depth 2. Values are kept in real
// arithmetic; use reported_iterations() when emitting them as counts.
std::optional<Window> stopping_window(double w_max, double w_min, double alpha, double eta,
                                      double zeta_value, double epsilon, int depth,
                                      double noise_linf);

// Iteration counts beyond 2^63 - 1 are reported as +infinity.
double reported_iterations(double t);

double window_size(const Window& window);

struct MonotoneReport {
  bool strictly_increasing = false;
  bool hypotheses_ok = false;
  std::vector<double> window_sizes;
};

// Window growth with depth at fixed alpha and eta. Hypotheses: zeta >= 1,
// w_max >= 1, alpha <= exp(-5/3), depths > 2 ascending. Violations only set
// hypotheses_ok = false; the sizes are still computed.
MonotoneReport window_monotone_in_depth(double w_max, double w_min, double alpha, double eta,
                                        double epsilon, double noise_linf,
                                        const std::vector<int>& depths);

// Window growth as alpha decreases at fixed depth > 2 and eta; alphas are
// expected descending and < 1.
MonotoneReport window_monotone_in_alpha(double w_max, double w_min, double eta, double epsilon,
                                        double noise_linf, int depth,
                                        const std::vector<double>& alphas);

struct Decomposition {
  Eigen::VectorXd signal;  // s: correct-sign mass on the support
  Eigen::VectorXd error;   // e: everything else; s + e = w exactly
};

Decomposition decompose(const Eigen::VectorXd& w_plus, const Eigen::VectorXd& w_minus,
                        const SparseSignal& truth);

struct ErrorTerms {
  Eigen::VectorXd b;       // (1/n) X^T X e - (1/n) X^T xi
  Eigen::VectorXd p_term;  // ((1/n) X^T X - I)(s - w*)
};

ErrorTerms error_terms(const DesignMatrix& design, const Eigen::VectorXd& xi,
                       const Decomposition& decomposition, const SparseSignal& truth);

enum class ErrorRegime { on_support_small_signal, on_support_large_signal, off_support };

struct PredictedErrorInputs {
  double per_coord_noise = 0.0;     // |(X^T xi / n)_i|
  double noise_linf = 0.0;          // ||X^T xi / n||_inf
  double support_noise_linf = 0.0;  // ||(X^T xi / n) . 1_S||_inf
  Eigen::Index k = 0;
  double mu = 0.0;
  double epsilon = 0.0;
  double w0 = 0.0;  // alpha^N
};

double predicted_error(ErrorRegime regime, const PredictedErrorInputs& inputs);

struct BoundsInput {
  double w_max = 0.0;
  double w_min = 0.0;
  double epsilon = 0.0;
  int depth = 2;
  Eigen::Index p = 1;
  Eigen::Index k = 0;
  double noise_linf = 0.0;
  double alpha = 0.0;  // candidate initialization
  double eta = 0.0;    // candidate step size
};

struct TheoryReport {
  BoundsInput inputs;
  std::optional<double> phi;
  std::optional<double> psi;
  double zeta = 0.0;
  AlphaMax alpha_max;
  double eta_max = 0.0;  // null-signal cap when k = 0
  std::optional<Window> window;
  double predicted_off_support = 0.0;  // (alpha^N)^{1/4}
};

TheoryReport make_report(const BoundsInput& inputs);

}  // namespace sparsegd::theory
