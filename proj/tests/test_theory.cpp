#include <cmath>
#include <random>

#include "doctest.h"
#include "sparsegd/problem.hpp"
#include "sparsegd/seeds.hpp"
#include "sparsegd/theory.hpp"

using namespace sparsegd;

TEST_CASE("phi anchors") {
  // min(1/8, 1/ln 1000, (1/ln 1000)^2) at N=4.
  CHECK(*theory::phi(1, 1, 1e-3, 4) == doctest::Approx(0.02095685522351266).epsilon(1e-10));
  // min(1/64, (1/ln 1000)^2, (1/ln 1000)^4) at N=3.
  CHECK(*theory::phi(1, 1, 1e-3, 3) == doctest::Approx(4.3918978085926986e-4).epsilon(1e-10));
  // log terms vacuous at epsilon = w: only the constant term binds.
  CHECK(*theory::phi(1, 1, 1, 4) == 0.125);
  CHECK_FALSE(theory::phi(1, 1, 1e-3, 2).has_value());
}

TEST_CASE("psi anchors") {
  // min(sqrt(2 - sqrt 2), 2^{3/4} sqrt(2^{1/4} - 1)).
  CHECK(*theory::psi(1, 4) == doctest::Approx(0.7315453070512228).epsilon(1e-10));
  // min((2 - 2^{1/3}) * 2, 2 (2^{1/3} - 1) * 2).
  CHECK(*theory::psi(8, 3) == doctest::Approx(1.0396841995794928).epsilon(1e-10));
  CHECK(*theory::psi(0, 5) == 0.0);
  CHECK_FALSE(theory::psi(1, 2).has_value());
}

TEST_CASE("zeta is the max of its three terms") {
  CHECK(theory::zeta(1, 0, 1e-3) == 0.2);
  CHECK(theory::zeta(10, 0.05, 1e-3) == 10.0);
  CHECK(theory::zeta(0, 0, 0) == 0.0);
}

TEST_CASE("alpha_max combines the dimension term with phi and psi") {
  const theory::AlphaMax full = theory::alpha_max(999, 1e-3, 1, 1, 4, 5);
  CHECK(full.value == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(full.depth_terms_applicable);

  const theory::AlphaMax null_case = theory::alpha_max(999, 1e-3, 0, 0, 4, 0);
  CHECK(null_case.value == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK_FALSE(null_case.depth_terms_applicable);

  const theory::AlphaMax depth2 = theory::alpha_max(999, 1e-3, 1, 1, 2, 5);
  CHECK(depth2.value == doctest::Approx(std::pow(1e-6, 2.0)).epsilon(1e-10));
  CHECK_FALSE(depth2.depth_terms_applicable);

  // Monotone in epsilon through the first term.
  CHECK(theory::alpha_max(999, 2e-3, 1, 1, 4, 0).value >
        theory::alpha_max(999, 1e-3, 1, 1, 4, 0).value);
}

TEST_CASE("step size caps") {
  CHECK(theory::eta_max(1e-3, 2, 1.0) == doctest::Approx(3.125e-8).epsilon(1e-12));
  // Quadrupling w_max at depth 2 shrinks the cap 16x ((3N-2)/N = 2).
  CHECK(theory::eta_max(1e-3, 2, 4.0) ==
        doctest::Approx(theory::eta_max(1e-3, 2, 1.0) / 16.0).epsilon(1e-12));
  CHECK(theory::eta_max_null(1e-2, 3, 0.2) == doctest::Approx(1.0 / 0.12).epsilon(1e-12));
}

namespace {

// Straight transcription of the window formulas, kept separate from the
// library implementation as the test reference.
struct WindowRef {
  double t_lower, t_upper;
  bool indicator;
};

WindowRef window_reference(double w_max, double w_min, double alpha, double eta, double zeta,
                           double eps, int n_depth, double noise) {
  const double n = n_depth;
  const bool a = w_min / 5.0 > std::max(200.0 * noise, 200.0 * eps);
  const double t1 =
      75.0 / (16.0 * eta * n * n * std::pow(zeta, (2 * n - 2) / n)) *
          std::log(std::abs(w_max - std::pow(alpha, n)) / eps) +
      15.0 / (8.0 * n * (n - 2) * eta * zeta * std::pow(alpha, n - 2));
  const double t2 = 5.0 / (n * (n - 1) * eta * zeta) *
                    (std::pow(alpha, -(n - 2)) - std::pow(alpha, -(n - 2) / 2));
  const double t3 =
      6.0 / (eta * n * n * std::pow(w_min, (2 * n - 2) / n)) * std::log(w_min / eps);
  const double t4 = 25.0 / (n * (n - 1) * eta * w_min) *
                    (std::pow(alpha, -(n - 2) / 2) - std::pow(alpha, -(n - 2) / 4));
  return {t1 + (a ? t3 : 0.0), t2 + (a ? t4 : 0.0), a};
}

}  // namespace

TEST_CASE("stopping window at the pinned evaluation point") {
  // (w_max = w_min = 1, alpha = 0.1, eta = 1e-3, zeta = 0.2, eps = 1e-3, N = 3,
  // noise = 0): the formulas evaluate to T_l = 62006.2097..., T_u = 28490.5097...,
  // infeasible (alpha violates alpha_max here, so that is expected).
  const auto window = theory::stopping_window(1, 1, 0.1, 1e-3, 0.2, 1e-3, 3, 0);
  REQUIRE(window.has_value());
  CHECK_FALSE(window->indicator_a);  // w_min/5 = 200 eps exactly, not strictly greater
  CHECK(window->t_lower == doctest::Approx(62006.20974240458).epsilon(1e-3));
  CHECK(window->t_upper == doctest::Approx(28490.509749298417).epsilon(1e-3));
  CHECK_FALSE(window->feasible);

  const WindowRef ref = window_reference(1, 1, 0.1, 1e-3, 0.2, 1e-3, 3, 0);
  CHECK(window->t_lower == doctest::Approx(ref.t_lower).epsilon(1e-12));
  CHECK(window->t_upper == doctest::Approx(ref.t_upper).epsilon(1e-12));
}

TEST_CASE("stopping window is feasible at an admissible alpha and eta") {
  // alpha = 4e-4 <= alpha_max(eps=1e-3, w=1, N=3) and eta = eta_max.
  const double alpha = 4e-4;
  const double eta = theory::eta_max(alpha, 3, 1.0);
  const auto window = theory::stopping_window(1, 1, alpha, eta, 0.2, 1e-3, 3, 0);
  REQUIRE(window.has_value());
  CHECK(window->feasible);
  CHECK(window->t_lower == doctest::Approx(8823668248161558.0).epsilon(1e-3));
  CHECK(window->t_upper == doctest::Approx(1.1484374999999998e16).epsilon(1e-3));
}

TEST_CASE("indicator A vanishes under large noise and drops the second stage") {
  const auto noisy = theory::stopping_window(1, 1, 0.1, 1e-3, 0.2, 1e-6, 3, 0.5);
  REQUIRE(noisy.has_value());
  CHECK_FALSE(noisy->indicator_a);  // (1/5) w_min <= 200 * noise
  CHECK(noisy->t_lower == doctest::Approx(noisy->t1).epsilon(1e-12));
  CHECK(noisy->t_upper == doctest::Approx(noisy->t2).epsilon(1e-12));

  const auto quiet = theory::stopping_window(1, 1, 0.1, 1e-3, 0.2, 1e-6, 3, 0.0);
  REQUIRE(quiet.has_value());
  CHECK(quiet->indicator_a);
  CHECK(quiet->t_lower == doctest::Approx(quiet->t1 + quiet->t3).epsilon(1e-12));
  CHECK(quiet->t_upper == doctest::Approx(quiet->t2 + quiet->t4).epsilon(1e-12));

  CHECK_FALSE(theory::stopping_window(1, 1, 0.1, 1e-3, 0.2, 1e-3, 2, 0).has_value());
}

TEST_CASE("feasibility holds whenever alpha and eta respect their caps") {
  // Property over 100 admissible draws: T_l <= T_u by the T1<=T2, T3<=T4 chains.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int depths[] = {3, 4, 5, 6};
  for (int trial = 0; trial < 100; ++trial) {
    const int depth = depths[trial % 4];
    const double w_min = 0.5 + 2.0 * unit(rng);
    const double w_max = w_min * (1.0 + unit(rng));
    const double epsilon = std::pow(10.0, -4.0 + 2.0 * unit(rng));  // 1e-4 .. 1e-2
    const double noise = unit(rng) < 0.5 ? 0.0 : 1e-4 * unit(rng);
    const double cap = theory::alpha_max(3000, epsilon, w_max, w_min, depth, 5).value;
    const double alpha = cap * (0.2 + 0.8 * unit(rng));
    const double eta = theory::eta_max(alpha, depth, w_max) * (0.2 + 0.8 * unit(rng));
    const double z = theory::zeta(w_min, noise, epsilon);
    const auto window =
        theory::stopping_window(w_max, w_min, alpha, eta, z, epsilon, depth, noise);
    REQUIRE(window.has_value());
    CHECK(window->t1 <= window->t2);
    CHECK(window->t3 <= window->t4);
    CHECK(window->feasible);
  }
}

TEST_CASE("initialization caps grow with depth in terms of w0 = alpha^N") {
  // w0_max(N+1) >= w0_max(N) for N = 3..8 (up to float rounding: the
  // dimension term (eps/(p+1))^{4/N} is exactly constant as w0).
  double previous = 0.0;
  for (int depth = 3; depth <= 8; ++depth) {
    const double cap = theory::alpha_max(3000, 1e-3, 1, 1, depth, 5).value;
    const double w0 = std::pow(cap, depth);
    CHECK(w0 >= previous * (1.0 - 1e-12));
    previous = w0;
  }
  // The depth-dependent content: phi expressed as w0 grows strictly.
  double phi_prev = 0.0;
  for (int depth = 3; depth <= 8; ++depth) {
    const double phi_w0 = std::pow(*theory::phi(1, 1, 1e-3, depth), depth);
    CHECK(phi_w0 > phi_prev);
    phi_prev = phi_w0;
  }
}

TEST_CASE("window size grows with depth under the stated hypotheses") {
  // zeta(w_min=5, 0, 1e-3) = 1, w_max = 5 >= 1, alpha = 0.15 <= exp(-5/3).
  const theory::MonotoneReport report =
      theory::window_monotone_in_depth(5, 5, 0.15, 1e-6, 1e-3, 0, {3, 4, 5});
  CHECK(report.hypotheses_ok);
  CHECK(report.strictly_increasing);
  REQUIRE(report.window_sizes.size() == 3);
  for (std::size_t i = 1; i < 3; ++i)
    CHECK(report.window_sizes[i] > report.window_sizes[i - 1]);

  // Violated hypotheses are reported but the sizes still come back.
  const theory::MonotoneReport warned =
      theory::window_monotone_in_depth(5, 5, 0.5, 1e-6, 1e-3, 0, {3, 4, 5});
  CHECK_FALSE(warned.hypotheses_ok);
  CHECK(warned.window_sizes.size() == 3);
}

TEST_CASE("window size grows as alpha shrinks at fixed depth") {
  const theory::MonotoneReport report =
      theory::window_monotone_in_alpha(5, 5, 1e-6, 1e-3, 0, 4, {0.15, 0.10, 0.05});
  CHECK(report.hypotheses_ok);
  CHECK(report.strictly_increasing);

  const theory::MonotoneReport single =
      theory::window_monotone_in_alpha(5, 5, 1e-6, 1e-3, 0, 4, {0.15});
  CHECK(single.strictly_increasing);  // trivially true

  const theory::MonotoneReport wrong_order =
      theory::window_monotone_in_alpha(5, 5, 1e-6, 1e-3, 0, 4, {0.05, 0.15});
  CHECK_FALSE(wrong_order.hypotheses_ok);
}

TEST_CASE("decompose splits the iterate into signal and error parts") {
  SUBCASE("empty support: everything is error") {
    const SparseSignal empty = gen_signal(3, {}, {});
    Eigen::VectorXd wp(3), wm(3);
    wp << 0.2, 0.4, 0.1;
    wm << 0.1, 0.1, 0.3;
    const theory::Decomposition d = theory::decompose(wp, wm, empty);
    CHECK(d.signal.isZero(0.0));
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(d.error[i] == wp[i] - wm[i]);
  }
  SUBCASE("hand-evaluated two-coordinate example") {
    const SparseSignal truth = gen_signal(2, {0}, {1.0});
    Eigen::VectorXd wp(2), wm(2);
    wp << 0.5, 0.1;
    wm << 0.2, 0.3;
    const theory::Decomposition d = theory::decompose(wp, wm, truth);
    CHECK(d.signal[0] == 0.5);
    CHECK(d.signal[1] == 0.0);
    CHECK(d.error[0] == -0.2);
    CHECK(d.error[1] == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(d.signal[0] + d.error[0] == doctest::Approx(0.3).epsilon(1e-15));
  }
  SUBCASE("non-negative specialization") {
    const SparseSignal truth = gen_signal(4, {1, 2}, {2.0, 0.5});
    Eigen::VectorXd wp(4), wm(4);
    wp << 0.3, 1.9, 0.6, 0.01;
    wm.setZero();
    const theory::Decomposition d = theory::decompose(wp, wm, truth);
    CHECK(d.signal[1] == 1.9);
    CHECK(d.signal[2] == 0.6);
    CHECK(d.error[0] == 0.3);
    CHECK(d.error[3] == 0.01);
    CHECK(d.error[1] == 0.0);
  }
}

TEST_CASE("decompose satisfies s + e = w bit for bit") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uniform(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index p = 20;
    std::vector<Eigen::Index> support{1, 5, 9, 13};
    std::vector<double> values{1.0, -0.5, 2.0, -3.0};
    const SparseSignal truth = gen_signal(p, support, values);
    Eigen::VectorXd wp(p), wm(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      wp[i] = uniform(rng);
      wm[i] = uniform(rng);
    }
    const theory::Decomposition d = theory::decompose(wp, wm, truth);
    for (Eigen::Index i = 0; i < p; ++i) CHECK(d.signal[i] + d.error[i] == wp[i] - wm[i]);
  }
}

TEST_CASE("error_terms definitions and degenerate cases") {
  const DesignMatrix design = gen_design(12, 6, DesignKind::gaussian, 17);
  const SparseSignal truth = gen_signal(6, {0, 3}, {1.0, -2.0});

  SUBCASE("e = 0 and xi = 0 give b = 0") {
    theory::Decomposition d;
    d.signal = truth.values;
    d.error = Eigen::VectorXd::Zero(6);
    const theory::ErrorTerms terms =
        theory::error_terms(design, Eigen::VectorXd::Zero(12), d, truth);
    CHECK(terms.b.norm() == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("orthonormal design gives p_term = 0") {
    DesignMatrix ortho;
    ortho.entries = Eigen::MatrixXd::Identity(6, 6) * std::sqrt(6.0);
    ortho.normalized = true;
    theory::Decomposition d;
    d.signal = Eigen::VectorXd::Random(6);
    d.error = Eigen::VectorXd::Zero(6);
    const theory::ErrorTerms terms = theory::error_terms(ortho, Eigen::VectorXd::Zero(6), d, truth);
    CHECK(terms.p_term.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("error_terms obey the coherence bounds against brute force") {
  // 100 small instances: ||(1/n) X^T X z||_inf <= p ||z||_inf for any z and
  // ||((1/n) X^T X - I) z||_inf <= k mu ||z||_inf for k-sparse z.
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 30, p = 50;
    const DesignMatrix design =
        gen_design(n, p, trial % 2 ? DesignKind::rademacher : DesignKind::gaussian,
                   derive_seed(60, static_cast<std::uint64_t>(trial)));
    const double mu = coherence(design);
    const Eigen::MatrixXd gram = design.entries.transpose() * design.entries / double(n);

    Eigen::VectorXd z = Eigen::VectorXd::Zero(p);
    for (Eigen::Index i = 0; i < p; ++i) z[i] = uniform(rng);
    CHECK((gram * z).cwiseAbs().maxCoeff() <=
          static_cast<double>(p) * z.cwiseAbs().maxCoeff() * (1.0 + 1e-12));

    // k-sparse vector, k <= 5.
    Eigen::VectorXd sparse = Eigen::VectorXd::Zero(p);
    const int k = 1 + static_cast<int>(rng() % 5);
    for (int j = 0; j < k; ++j) sparse[static_cast<Eigen::Index>(rng() % p)] = uniform(rng);
    int actual_k = 0;
    for (Eigen::Index i = 0; i < p; ++i) actual_k += sparse[i] != 0.0;
    const Eigen::VectorXd lhs = gram * sparse - sparse;
    CHECK(lhs.cwiseAbs().maxCoeff() <=
          actual_k * mu * sparse.cwiseAbs().maxCoeff() * (1.0 + 1e-12));
  }
}

TEST_CASE("predicted_error covers the three regimes") {
  theory::PredictedErrorInputs inputs;
  inputs.w0 = 1e-6;
  CHECK(theory::predicted_error(theory::ErrorRegime::off_support, inputs) ==
        doctest::Approx(0.03162277660168379).epsilon(1e-12));

  inputs.noise_linf = 0.0;
  inputs.epsilon = 1e-3;
  CHECK(theory::predicted_error(theory::ErrorRegime::on_support_small_signal, inputs) == 1e-3);

  inputs.per_coord_noise = 0.05;
  inputs.k = 4;
  inputs.mu = 0.01;
  inputs.support_noise_linf = 0.5;  // k mu * 0.5 = 0.02
  CHECK(theory::predicted_error(theory::ErrorRegime::on_support_large_signal, inputs) == 0.05);
}

TEST_CASE("reported iteration counts cap at 2^63 - 1") {
  CHECK(theory::reported_iterations(1e6) == 1e6);
  CHECK(std::isinf(theory::reported_iterations(1e19)));
}

TEST_CASE("make_report assembles the full bounds summary") {
  theory::BoundsInput inputs;
  inputs.w_max = 1.0;
  inputs.w_min = 1.0;
  inputs.epsilon = 1e-3;
  inputs.depth = 3;
  inputs.p = 3000;
  inputs.k = 5;
  inputs.noise_linf = 0.0;
  inputs.alpha = 4e-4;
  inputs.eta = theory::eta_max(4e-4, 3, 1.0);
  const theory::TheoryReport report = theory::make_report(inputs);
  CHECK(report.phi.has_value());
  CHECK(report.psi.has_value());
  CHECK(report.zeta == 0.2);
  REQUIRE(report.window.has_value());
  CHECK(report.window->feasible);
  CHECK(report.predicted_off_support ==
        doctest::Approx(std::pow(std::pow(4e-4, 3.0), 0.25)).epsilon(1e-12));

  theory::BoundsInput null_inputs = inputs;
  null_inputs.k = 0;
  const theory::TheoryReport null_report = theory::make_report(null_inputs);
  CHECK(null_report.eta_max ==
        doctest::Approx(theory::eta_max_null(4e-4, 3, null_report.zeta)).epsilon(1e-12));
}
