#include "sparsegd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "sparsegd/csv.hpp"

namespace sparsegd::dynamics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Left-to-right integer power, matching the scalar reference sequences so the
// 1-d reduction agrees bit for bit.
double int_pow(double base, int exponent) {
  double out = 1.0;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

Eigen::VectorXd elementwise_pow(const Eigen::VectorXd& v, int exponent) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = int_pow(v[i], exponent);
  return out;
}

void check_dims(const ModelState& state, const Problem& problem) {
  if (state.u.size() != problem.p())
    throw std::invalid_argument("model state dimension does not match the problem");
}

// Applies the multiplicative update in place; returns false when a factor
// crossed zero.
bool apply_update(Eigen::VectorXd& u, Eigen::VectorXd& v, const Eigen::VectorXd& r, double eta,
                  int depth) {
  bool stable = true;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double factor_u = 1.0 - 2.0 * depth * eta * r[i] * int_pow(u[i], depth - 2);
    const double factor_v = 1.0 + 2.0 * depth * eta * r[i] * int_pow(v[i], depth - 2);
    if (factor_u <= 0.0 || factor_v <= 0.0) stable = false;
    u[i] *= factor_u;
    v[i] *= factor_v;
  }
  return stable;
}

struct ErrorMetrics {
  double l2_err_sq = kNaN;
  double linf_signal_err = kNaN;
  double max_abs_off_support = kNaN;
};

ErrorMetrics error_metrics(const Eigen::VectorXd& w, const Problem& problem) {
  ErrorMetrics m;
  if (!problem.truth) return m;
  const SparseSignal& truth = *problem.truth;
  m.l2_err_sq = (w - truth.values).squaredNorm();
  m.linf_signal_err = 0.0;
  for (Eigen::Index idx : truth.support)
    m.linf_signal_err = std::max(m.linf_signal_err, std::abs(w[idx] - truth.values[idx]));
  m.max_abs_off_support = 0.0;
  std::size_t next = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (next < truth.support.size() && truth.support[next] == i) {
      ++next;
      continue;
    }
    m.max_abs_off_support = std::max(m.max_abs_off_support, std::abs(w[i]));
  }
  return m;
}

}  // namespace

ModelState make_state(Eigen::Index p, int depth, double alpha) {
  if (p < 1) throw std::invalid_argument("make_state: p must be >= 1");
  if (depth < 2) throw std::invalid_argument("make_state: depth must be >= 2");
  if (alpha <= 0.0) throw std::invalid_argument("make_state: alpha must be > 0");
  ModelState state;
  state.u = Eigen::VectorXd::Constant(p, alpha);
  state.v = Eigen::VectorXd::Constant(p, alpha);
  state.depth = depth;
  state.alpha = alpha;
  return state;
}

Eigen::VectorXd effective_weights(const ModelState& state) {
  Eigen::VectorXd w(state.u.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w[i] = int_pow(state.u[i], state.depth) - int_pow(state.v[i], state.depth);
  return w;
}

double loss(const ModelState& state, const Problem& problem) {
  check_dims(state, problem);
  const Eigen::VectorXd residual = problem.design.entries * effective_weights(state) - problem.y;
  return residual.squaredNorm() / static_cast<double>(problem.n());
}

Eigen::VectorXd residual_correlation(const ModelState& state, const Problem& problem) {
  check_dims(state, problem);
  const Eigen::VectorXd residual = problem.design.entries * effective_weights(state) - problem.y;
  return problem.design.entries.transpose() * residual / static_cast<double>(problem.n());
}

Gradient gradient(const ModelState& state, const Problem& problem) {
  const Eigen::VectorXd r = residual_correlation(state, problem);
  const double scale = 2.0 * state.depth;
  Gradient g;
  g.u = scale * r.cwiseProduct(elementwise_pow(state.u, state.depth - 1));
  g.v = -scale * r.cwiseProduct(elementwise_pow(state.v, state.depth - 1));
  return g;
}

ModelState step(const ModelState& state, const Problem& problem, double eta) {
  if (eta <= 0.0) throw std::invalid_argument("step: eta must be > 0");
  const Eigen::VectorXd r = residual_correlation(state, problem);
  ModelState next = state;
  next.stable = apply_update(next.u, next.v, r, eta, state.depth) && state.stable;
  return next;
}

Trajectory run(const Problem& problem, const RunOptions& options) {
  if (options.max_iter < 1) throw std::invalid_argument("run: max_iter must be >= 1");
  if (options.record_every < 1) throw std::invalid_argument("run: record_every must be >= 1");
  if (options.eta <= 0.0) throw std::invalid_argument("run: eta must be > 0");

  std::unordered_set<std::int64_t> extra(options.extra_record_iters.begin(),
                                         options.extra_record_iters.end());

  Trajectory trajectory;
  ModelState state = make_state(problem.p(), options.depth, options.alpha);

  const Eigen::MatrixXd& x = problem.design.entries;
  const double n = static_cast<double>(problem.n());
  Eigen::VectorXd w(problem.p()), residual(problem.n()), r(problem.p());

  double initial_loss = 0.0;
  bool unstable = false;

  for (std::int64_t t = 0;; ++t) {
    for (Eigen::Index i = 0; i < w.size(); ++i)
      w[i] = int_pow(state.u[i], state.depth) - int_pow(state.v[i], state.depth);
    residual.noalias() = x * w;
    residual -= problem.y;
    const double current_loss = residual.squaredNorm() / n;
    if (t == 0) initial_loss = current_loss;

    const bool finite = std::isfinite(current_loss);
    const bool blown = !finite || current_loss > options.divergence_factor * initial_loss;
    const bool diverged = unstable || blown;
    const bool reached_target =
        finite && options.stop_below_loss && current_loss <= *options.stop_below_loss;
    const bool last = diverged || reached_target || t == options.max_iter;
    const bool on_grid = t % options.record_every == 0 || extra.count(t) > 0;

    if (finite && (on_grid || last)) {
      const ErrorMetrics m = error_metrics(w, problem);
      trajectory.records.push_back({t, current_loss, m.l2_err_sq, m.linf_signal_err,
                                    m.max_abs_off_support});
      if (options.full_paths) trajectory.coordinate_paths.emplace_back(t, w);
    }
    if (last) {
      trajectory.status = diverged ? RunStatus::diverged
                          : reached_target ? RunStatus::completed
                                           : RunStatus::capped;
      break;
    }

    r.noalias() = x.transpose() * residual;
    r /= n;
    if (!apply_update(state.u, state.v, r, options.eta, state.depth)) {
      unstable = true;
      state.stable = false;
    }
  }

  trajectory.final_state = std::move(state);
  return trajectory;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "iter,loss,l2_err_sq,linf_signal_err,max_abs_off_support\n";
  auto field = [](double v) { return std::isnan(v) ? std::string() : csv::format_double(v); };
  for (const TrajectoryRecord& rec : trajectory.records) {
    out << rec.iter << ',' << csv::format_double(rec.loss) << ',' << field(rec.l2_err_sq) << ','
        << field(rec.linf_signal_err) << ',' << field(rec.max_abs_off_support) << '\n';
  }
}

void write_paths_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "iter";
  const Eigen::Index p =
      trajectory.coordinate_paths.empty() ? 0 : trajectory.coordinate_paths.front().second.size();
  for (Eigen::Index j = 0; j < p; ++j) out << ",w_" << (j + 1);
  out << '\n';
  for (const auto& [iter, w] : trajectory.coordinate_paths) {
    out << iter;
    for (Eigen::Index j = 0; j < p; ++j) out << ',' << csv::format_double(w[j]);
    out << '\n';
  }
}

}  // namespace sparsegd::dynamics
