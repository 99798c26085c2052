#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "sparsegd/problem.hpp"

namespace sparsegd::dynamics {

// Parameters u, v of the depth-N parametrization w = u^N - v^N. States are
// values: step() returns a new state and never mutates its input, so
// independent runs can share problems across threads.
struct ModelState {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  int depth = 2;
  double alpha = 0.0;
  // Cleared when a multiplicative factor crossed zero, i.e. the step size was
  // too large for the current iterate. Reported, never clipped.
  bool stable = true;
};

// Constant initialization u = v = alpha * 1.
ModelState make_state(Eigen::Index p, int depth, double alpha);

Eigen::VectorXd effective_weights(const ModelState& state);

double loss(const ModelState& state, const Problem& problem);

// r = (1/n) X^T (X w - y), the correlation of the residual with the columns.
Eigen::VectorXd residual_correlation(const ModelState& state, const Problem& problem);

struct Gradient {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};

// g_u = (2N/n) X^T(Xw - y) . u^{N-1},  g_v = -(2N/n) X^T(Xw - y) . v^{N-1}.
Gradient gradient(const ModelState& state, const Problem& problem);

// One multiplicative update u . (1 - 2 N eta r . u^{N-2}),
// v . (1 + 2 N eta r . v^{N-2}); algebraically equal to (u,v) - eta * grad.
ModelState step(const ModelState& state, const Problem& problem, double eta);

enum class RunStatus { completed, diverged, capped };

struct TrajectoryRecord {
  std::int64_t iter = 0;
  double loss = 0.0;
  // Oracle-mode error metrics; NaN when the problem has no stored truth.
  double l2_err_sq = 0.0;
  double linf_signal_err = 0.0;
  double max_abs_off_support = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  // (iter, w) pairs on the recording grid when full_paths was requested.
  std::vector<std::pair<std::int64_t, Eigen::VectorXd>> coordinate_paths;
  RunStatus status = RunStatus::capped;
  ModelState final_state;
};

struct RunOptions {
  int depth = 2;
  double alpha = 0.0;
  double eta = 0.0;
  std::int64_t max_iter = 1;
  std::int64_t record_every = 100;
  bool full_paths = false;
  // A run is declared diverged once the loss is non-finite or exceeds this
  // multiple of the initial loss.
  double divergence_factor = 1e3;
  // Extra iterations to record besides the regular grid (sorted not required).
  std::vector<std::int64_t> extra_record_iters;
  // Optional early stop once the loss falls to or below this value; the run
  // then finishes with status `completed`.
  std::optional<double> stop_below_loss;
};

// Gradient descent from u = v = alpha * 1. Iteration 0, the regular grid and
// the final iterate are always recorded; records only hold finite losses.
Trajectory run(const Problem& problem, const RunOptions& options);

// Header: iter,loss,l2_err_sq,linf_signal_err,max_abs_off_support. Error
// columns are written empty when the metric is NaN (non-oracle mode).
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);

// Wide file with header iter,w_1,...,w_p on the recording grid.
void write_paths_csv(const std::filesystem::path& path, const Trajectory& trajectory);

}  // namespace sparsegd::dynamics
