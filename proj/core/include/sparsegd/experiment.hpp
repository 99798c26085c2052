#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparsegd/dynamics.hpp"
#include "sparsegd/problem.hpp"
#include "sparsegd/quantiles.hpp"
#include "sparsegd/theory.hpp"

namespace sparsegd::experiment {

enum class EtaRule {
  depth_scaled,  // 1 / (5 N^2), scaled to the depth
  safe,   // the theory step-size cap for the configured signal
  fixed,  // explicit eta
};

enum class SignalKind {
  spike,           // gamma on the first k coordinates
  values,          // explicit values on the first coordinates
  dense_gaussian,  // i.i.d. standard normal entries (kernel-regime setting)
};

struct ExperimentConfig {
  std::string preset;  // informational; empty for fully explicit configs

  Eigen::Index n = 500;
  Eigen::Index p = 3000;
  Eigen::Index k = 5;
  double gamma = 1.0;
  std::vector<double> support_values;  // for SignalKind::values
  SignalKind signal_kind = SignalKind::spike;
  double sigma = 0.5;
  DesignKind design_kind = DesignKind::rademacher;

  std::vector<int> depths{2, 3, 5};
  double w0 = 1e-6;  // initialization as alpha^N unless w0_is_alpha
  bool w0_is_alpha = false;
  EtaRule eta_rule = EtaRule::depth_scaled;
  double eta = 0.0;  // for EtaRule::fixed

  std::int64_t max_iter = 10000;
  std::vector<std::int64_t> max_iter_per_depth;  // optional, parallel to depths
  std::int64_t record_every = 100;
  bool full_paths = false;

  int reps = 30;
  std::uint64_t base_seed = 1;
  std::string output_dir = "sparsegd-out";
  bool emit_svg = false;
  int threads = 0;  // 0 = hardware concurrency

  // Theory-report inputs. A non-positive epsilon selects the sub-Gaussian
  // default 2 sqrt(sigma^2 log(2p) / n).
  double epsilon = 0.0;
  double c_gamma = 0.01;
  std::int64_t theory_iter_cap = 100000000;  // cap when scheduling window iterations

  // Ridge comparison (kernel preset).
  bool compare_ridge = false;
  double lambda_min = 1e-4;
  double lambda_max = 1e4;
  int lambda_count = 25;
  int folds = 5;
};

// Named presets reproducing the simulation settings at desk scale:
// convergence, large_init, window, incremental, kernel.
ExperimentConfig preset_config(const std::string& name);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& config);

struct RepResult {
  std::uint64_t rep_seed = 0;
  dynamics::RunStatus status = dynamics::RunStatus::capped;
  std::vector<std::int64_t> iters;  // recording grid
  std::vector<double> metric;       // l2 error in oracle mode, loss otherwise
  std::int64_t best_iter = 0;       // empirically best recorded iterate
  double best_metric = 0.0;
  // Iterate at the theory window midpoint, when feasible and reachable.
  std::optional<std::int64_t> window_mid_iter;
  std::optional<double> window_mid_metric;
  double plateau_length = 0.0;  // iterations within 1.5x of the best metric
  std::optional<double> ridge_l2_err;
  std::optional<double> ridge_lambda;
};

struct DepthResult {
  int depth = 2;
  double alpha = 0.0;
  double eta = 0.0;
  theory::TheoryReport report;
  std::vector<RepResult> reps;
  std::vector<std::int64_t> summary_iters;
  SummarySeries summary;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<DepthResult> depth_results;
  std::filesystem::path manifest_path;
};

// Runs all repetitions for all depths, writes per-rep trajectory CSVs, a
// summary CSV and a theory report per depth, optional SVG plots, and a
// manifest listing every output with its seeds.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Contiguous stretch of iterations around the best recorded metric over
// which the metric stays within `factor` times the best.
double plateau_length(const std::vector<std::int64_t>& iters, const std::vector<double>& metric,
                      double factor = 1.5);

}  // namespace sparsegd::experiment
