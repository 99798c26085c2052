#include "sparsegd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "report_json.hpp"
#include "sparsegd/csv.hpp"
#include "sparsegd/plot.hpp"
#include "sparsegd/ridge.hpp"
#include "sparsegd/seeds.hpp"

namespace sparsegd::experiment {

using nlohmann::json;

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "convergence") {
    // Recovery across depths: n=500, p=3000, k=5, gamma=1, sigma=0.5,
    // alpha^N = 1e-6, eta = 1/(5 N^2).
    c.depths = {2, 3, 5};
    c.w0 = 1e-6;
    c.eta_rule = EtaRule::depth_scaled;
    c.max_iter_per_depth = {1500, 10000, 26000};
    c.record_every = 50;
    c.reps = 10;
  } else if (name == "large_init") {
    // Deliberately large alpha^N = 2e-3: depth 2 fails, deeper recovers.
    c.depths = {2, 3, 4};
    c.w0 = 2e-3;
    c.eta_rule = EtaRule::depth_scaled;
    c.max_iter_per_depth = {600, 2500, 5000};
    c.record_every = 10;
    c.reps = 10;
  } else if (name == "window") {
    // Early-stopping window growth: n=100, p=200, alpha^N = 1e-5, eta = 0.01.
    c.n = 100;
    c.p = 200;
    c.depths = {2, 3, 4};
    c.w0 = 1e-5;
    c.eta_rule = EtaRule::fixed;
    c.eta = 0.01;
    c.max_iter = 60000;
    c.record_every = 50;
    c.reps = 10;
  } else if (name == "incremental") {
    // Distinct learning phases for support values [1,2,3,4], alpha^N = 1e-4,
    // eta = 1e-3.
    c.k = 4;
    c.signal_kind = SignalKind::values;
    c.support_values = {1.0, 2.0, 3.0, 4.0};
    c.depths = {2, 3, 5};
    c.w0 = 1e-4;
    c.eta_rule = EtaRule::fixed;
    c.eta = 1e-3;
    c.max_iter_per_depth = {4000, 12000, 40000};
    c.record_every = 100;
    c.reps = 1;
    c.full_paths = true;
  } else if (name == "kernel") {
    // Large initialization alpha^N = 1000, dense gaussian signal, sigma = 25;
    // compared against 5-fold cross-validated ridge.
    c.n = 500;
    c.p = 100;
    c.signal_kind = SignalKind::dense_gaussian;
    c.sigma = 25.0;
    c.depths = {2, 3, 4};
    c.w0 = 1000.0;
    c.eta_rule = EtaRule::fixed;
    c.eta = 1e-7;
    // The deeper parametrizations sweep through their ridge-like sweet spot
    // within a few steps at this initialization scale, so record densely over
    // a short horizon.
    c.max_iter = 2000;
    c.record_every = 1;
    c.reps = 10;
    c.compare_ridge = true;
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return c;
}

namespace {

std::string signal_kind_name(SignalKind kind) {
  switch (kind) {
    case SignalKind::spike: return "spike";
    case SignalKind::values: return "values";
    case SignalKind::dense_gaussian: return "dense_gaussian";
  }
  return "spike";
}

SignalKind signal_kind_from(const std::string& name) {
  if (name == "spike") return SignalKind::spike;
  if (name == "values") return SignalKind::values;
  if (name == "dense_gaussian") return SignalKind::dense_gaussian;
  throw std::invalid_argument("unknown signal kind: " + name);
}

std::string eta_rule_name(EtaRule rule) {
  switch (rule) {
    case EtaRule::depth_scaled: return "depth_scaled";
    case EtaRule::safe: return "safe";
    case EtaRule::fixed: return "fixed";
  }
  return "depth_scaled";
}

EtaRule eta_rule_from(const std::string& name) {
  if (name == "depth_scaled") return EtaRule::depth_scaled;
  if (name == "safe") return EtaRule::safe;
  if (name == "fixed") return EtaRule::fixed;
  throw std::invalid_argument("unknown eta rule: " + name);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["preset"] = c.preset;
  j["n"] = c.n;
  j["p"] = c.p;
  j["k"] = c.k;
  j["gamma"] = c.gamma;
  j["support_values"] = c.support_values;
  j["signal_kind"] = signal_kind_name(c.signal_kind);
  j["sigma"] = c.sigma;
  j["design_kind"] = c.design_kind == DesignKind::rademacher ? "rademacher" : "gaussian";
  j["depths"] = c.depths;
  j["w0"] = c.w0;
  j["w0_is_alpha"] = c.w0_is_alpha;
  j["eta_rule"] = eta_rule_name(c.eta_rule);
  j["eta"] = c.eta;
  j["max_iter"] = c.max_iter;
  j["max_iter_per_depth"] = c.max_iter_per_depth;
  j["record_every"] = c.record_every;
  j["full_paths"] = c.full_paths;
  j["reps"] = c.reps;
  j["base_seed"] = c.base_seed;
  j["output_dir"] = c.output_dir;
  j["emit_svg"] = c.emit_svg;
  j["threads"] = c.threads;
  j["epsilon"] = c.epsilon;
  j["c_gamma"] = c.c_gamma;
  j["theory_iter_cap"] = c.theory_iter_cap;
  j["compare_ridge"] = c.compare_ridge;
  j["lambda_min"] = c.lambda_min;
  j["lambda_max"] = c.lambda_max;
  j["lambda_count"] = c.lambda_count;
  j["folds"] = c.folds;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("preset") && !j["preset"].get<std::string>().empty())
    c = preset_config(j["preset"].get<std::string>());
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  get("n", c.n);
  get("p", c.p);
  get("k", c.k);
  get("gamma", c.gamma);
  get("support_values", c.support_values);
  if (j.contains("signal_kind")) c.signal_kind = signal_kind_from(j["signal_kind"]);
  get("sigma", c.sigma);
  if (j.contains("design_kind"))
    c.design_kind = j["design_kind"] == "gaussian" ? DesignKind::gaussian : DesignKind::rademacher;
  get("depths", c.depths);
  get("w0", c.w0);
  get("w0_is_alpha", c.w0_is_alpha);
  if (j.contains("eta_rule")) c.eta_rule = eta_rule_from(j["eta_rule"]);
  get("eta", c.eta);
  get("max_iter", c.max_iter);
  get("max_iter_per_depth", c.max_iter_per_depth);
  get("record_every", c.record_every);
  get("full_paths", c.full_paths);
  get("reps", c.reps);
  get("base_seed", c.base_seed);
  get("output_dir", c.output_dir);
  get("emit_svg", c.emit_svg);
  get("threads", c.threads);
  get("epsilon", c.epsilon);
  get("c_gamma", c.c_gamma);
  get("theory_iter_cap", c.theory_iter_cap);
  get("compare_ridge", c.compare_ridge);
  get("lambda_min", c.lambda_min);
  get("lambda_max", c.lambda_max);
  get("lambda_count", c.lambda_count);
  get("folds", c.folds);
  return c;
}

SparseSignal make_truth(const ExperimentConfig& c, std::uint64_t signal_seed) {
  switch (c.signal_kind) {
    case SignalKind::spike: {
      std::vector<Eigen::Index> support;
      std::vector<double> values;
      for (Eigen::Index i = 0; i < c.k; ++i) {
        support.push_back(i);
        values.push_back(c.gamma);
      }
      return gen_signal(c.p, support, values);
    }
    case SignalKind::values: {
      std::vector<Eigen::Index> support;
      for (std::size_t i = 0; i < c.support_values.size(); ++i)
        support.push_back(static_cast<Eigen::Index>(i));
      return gen_signal(c.p, support, c.support_values);
    }
    case SignalKind::dense_gaussian: {
      const NoiseVector draws = gen_noise(c.p, 1.0, signal_seed);
      std::vector<Eigen::Index> support;
      std::vector<double> values;
      for (Eigen::Index i = 0; i < c.p; ++i) {
        support.push_back(i);
        // A zero draw would be rejected as a support value; vanishing odds,
        // but nudge it instead of failing the run.
        values.push_back(draws.entries[i] == 0.0 ? 1e-12 : draws.entries[i]);
      }
      return gen_signal(c.p, support, values);
    }
  }
  throw std::logic_error("unreachable");
}

double resolve_eta(const ExperimentConfig& c, int depth, double alpha,
                   const theory::TheoryReport& report) {
  switch (c.eta_rule) {
    case EtaRule::depth_scaled:
      return 1.0 / (5.0 * depth * depth);
    case EtaRule::safe:
      return report.eta_max;
    case EtaRule::fixed:
      if (c.eta <= 0.0) throw std::invalid_argument("eta_rule fixed requires eta > 0");
      return c.eta;
  }
  (void)alpha;
  throw std::logic_error("unreachable");
}

std::string rep_tag(int depth, int rep) {
  std::ostringstream out;
  out << "N" << depth << "_rep" << rep;
  return out.str();
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  return config_from_json(json::parse(in));
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config: " + path.string());
  out << config_to_json(config).dump(2) << '\n';
}

double plateau_length(const std::vector<std::int64_t>& iters, const std::vector<double>& metric,
                      double factor) {
  if (iters.size() != metric.size() || iters.empty())
    throw std::invalid_argument("plateau_length: bad inputs");
  std::size_t best = 0;
  for (std::size_t i = 1; i < metric.size(); ++i)
    if (metric[i] < metric[best]) best = i;
  const double cutoff = metric[best] * factor;
  std::size_t lo = best, hi = best;
  while (lo > 0 && metric[lo - 1] <= cutoff) --lo;
  while (hi + 1 < metric.size() && metric[hi + 1] <= cutoff) ++hi;
  return static_cast<double>(iters[hi] - iters[lo]);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.reps < 1) throw std::invalid_argument("run_experiment: reps must be >= 1");
  if (!config.max_iter_per_depth.empty() &&
      config.max_iter_per_depth.size() != config.depths.size())
    throw std::invalid_argument("run_experiment: max_iter_per_depth must match depths");

  const std::filesystem::path out_dir(config.output_dir);
  std::filesystem::create_directories(out_dir);

  ExperimentResult result;
  result.config = config;

  const double noise_proxy = noise_linf_bound(config.sigma, config.n, config.p);
  const double epsilon = config.epsilon > 0.0 ? config.epsilon : std::max(noise_proxy / 2.0, 1e-12);

  json manifest;
  manifest["config"] = config_to_json(config);
  manifest["outputs"] = json::array();
  json depth_entries = json::array();

  for (std::size_t d = 0; d < config.depths.size(); ++d) {
    const int depth = config.depths[d];
    const std::int64_t max_iter =
        config.max_iter_per_depth.empty() ? config.max_iter : config.max_iter_per_depth[d];
    const double alpha =
        config.w0_is_alpha ? config.w0 : std::pow(config.w0, 1.0 / static_cast<double>(depth));

    // Theory report for the configured parameters; per-run noise uses the
    // sub-Gaussian proxy since the report covers all repetitions.
    const SparseSignal nominal_truth = make_truth(config, derive_seed(config.base_seed, 99));
    theory::BoundsInput bounds;
    bounds.w_max = nominal_truth.k() > 0 ? nominal_truth.w_max : 0.0;
    bounds.w_min = nominal_truth.k() > 0 ? nominal_truth.w_min : 0.0;
    bounds.epsilon = epsilon;
    bounds.depth = depth;
    bounds.p = config.p;
    bounds.k = nominal_truth.k();
    bounds.noise_linf = noise_proxy;
    bounds.alpha = alpha;

    DepthResult depth_result;
    depth_result.depth = depth;
    depth_result.alpha = alpha;
    {
      theory::TheoryReport pre = theory::make_report(bounds);
      depth_result.eta = resolve_eta(config, depth, alpha, pre);
      bounds.eta = depth_result.eta;
    }
    depth_result.report = theory::make_report(bounds);

    // Window midpoint on the iteration grid, when the theory window is
    // feasible and reachable: ceil(T_l), floor(T_u), capped.
    std::optional<std::int64_t> window_mid;
    if (depth_result.report.window && depth_result.report.window->feasible) {
      const double lo = std::ceil(depth_result.report.window->t_lower);
      const double hi = std::floor(std::min(depth_result.report.window->t_upper,
                                            static_cast<double>(config.theory_iter_cap)));
      if (lo <= hi && lo <= static_cast<double>(max_iter))
        window_mid = static_cast<std::int64_t>(std::min((lo + hi) / 2.0,
                                                        static_cast<double>(max_iter)));
    }

    depth_result.reps.resize(static_cast<std::size_t>(config.reps));
    std::atomic<int> next_rep{0};
    std::exception_ptr worker_error;
    std::mutex worker_error_mutex;
    const int worker_count =
        std::max(1, std::min(config.threads > 0
                                 ? config.threads
                                 : static_cast<int>(std::thread::hardware_concurrency()),
                             config.reps));

    auto run_rep = [&](int rep) {
      const std::uint64_t rep_seed = config.base_seed + static_cast<std::uint64_t>(rep);
      Problem problem;
      {
        const DesignMatrix design =
            gen_design(config.n, config.p, config.design_kind, derive_seed(rep_seed, 0));
        const NoiseVector noise = gen_noise(config.n, config.sigma, derive_seed(rep_seed, 1));
        const SparseSignal truth = make_truth(config, derive_seed(rep_seed, 2));
        problem = assemble(design, truth, noise);
        problem.seed_meta = {derive_seed(rep_seed, 0), derive_seed(rep_seed, 1),
                             derive_seed(rep_seed, 2)};
      }

      dynamics::RunOptions options;
      options.depth = depth;
      options.alpha = alpha;
      options.eta = depth_result.eta;
      options.max_iter = max_iter;
      options.record_every = config.record_every;
      options.full_paths = config.full_paths;
      if (window_mid) options.extra_record_iters.push_back(*window_mid);
      const dynamics::Trajectory trajectory = dynamics::run(problem, options);

      RepResult& r = depth_result.reps[static_cast<std::size_t>(rep)];
      r.rep_seed = rep_seed;
      r.status = trajectory.status;
      for (const auto& rec : trajectory.records) {
        r.iters.push_back(rec.iter);
        r.metric.push_back(problem.oracle_mode() ? std::sqrt(rec.l2_err_sq) : rec.loss);
      }
      std::size_t best = 0;
      for (std::size_t i = 1; i < r.metric.size(); ++i)
        if (r.metric[i] < r.metric[best]) best = i;
      r.best_iter = r.iters[best];
      r.best_metric = r.metric[best];
      r.plateau_length = plateau_length(r.iters, r.metric);
      if (window_mid) {
        for (std::size_t i = 0; i < r.iters.size(); ++i) {
          if (r.iters[i] == *window_mid) {
            r.window_mid_iter = *window_mid;
            r.window_mid_metric = r.metric[i];
            break;
          }
        }
      }
      if (config.compare_ridge && problem.truth) {
        const auto grid =
            ridge::log_spaced_grid(config.lambda_min, config.lambda_max, config.lambda_count);
        const ridge::RidgeFit fit = ridge::ridge_cv(problem.design.entries, problem.y, grid,
                                                    config.folds, derive_seed(rep_seed, 3));
        r.ridge_lambda = fit.lambda;
        r.ridge_l2_err = (fit.weights - problem.truth->values).norm();
      }

      dynamics::write_trajectory_csv(out_dir / ("traj_" + rep_tag(depth, rep) + ".csv"),
                                     trajectory);
      if (config.full_paths)
        dynamics::write_paths_csv(out_dir / ("paths_" + rep_tag(depth, rep) + ".csv"),
                                  trajectory);
    };

    auto worker = [&]() {
      try {
        for (int rep = next_rep.fetch_add(1); rep < config.reps; rep = next_rep.fetch_add(1))
          run_rep(rep);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(worker_error_mutex);
        if (!worker_error) worker_error = std::current_exception();
      }
    };

    std::vector<std::thread> pool;
    for (int t = 0; t < worker_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (worker_error) std::rethrow_exception(worker_error);

    // Align reps on the common prefix of the recording grid (divergence can
    // shorten individual runs) and summarize pointwise.
    std::size_t common = depth_result.reps.front().metric.size();
    for (const RepResult& r : depth_result.reps) common = std::min(common, r.metric.size());
    std::vector<std::vector<double>> series;
    for (const RepResult& r : depth_result.reps)
      series.emplace_back(r.metric.begin(), r.metric.begin() + static_cast<std::ptrdiff_t>(common));
    depth_result.summary_iters.assign(depth_result.reps.front().iters.begin(),
                                      depth_result.reps.front().iters.begin() +
                                          static_cast<std::ptrdiff_t>(common));
    depth_result.summary = quantile_summary(series);

    const std::string summary_name = "summary_N" + std::to_string(depth) + ".csv";
    {
      std::ofstream out(out_dir / summary_name);
      if (!out) throw std::runtime_error("cannot write summary CSV");
      out << "iter,median,q25,q75\n";
      for (std::size_t i = 0; i < common; ++i) {
        out << depth_result.summary_iters[i] << ',' << csv::format_double(depth_result.summary.median[i])
            << ',' << csv::format_double(depth_result.summary.q25[i]) << ','
            << csv::format_double(depth_result.summary.q75[i]) << '\n';
      }
    }

    const std::string theory_name = "theory_N" + std::to_string(depth) + ".json";
    {
      std::ofstream out(out_dir / theory_name);
      out << detail::theory_report_json(depth_result.report).dump(2) << '\n';
    }

    if (config.emit_svg) {
      plot::Series median_series;
      median_series.label = "N=" + std::to_string(depth) + " median";
      plot::Band band;
      for (std::size_t i = 0; i < common; ++i) {
        const double x = static_cast<double>(depth_result.summary_iters[i]);
        median_series.x.push_back(x);
        median_series.y.push_back(depth_result.summary.median[i]);
        band.x.push_back(x);
        band.lower.push_back(depth_result.summary.q25[i]);
        band.upper.push_back(depth_result.summary.q75[i]);
      }
      plot::PlotStyle style;
      style.title = config.preset.empty() ? "l2 error" : config.preset;
      style.y_label = "l2 error";
      style.log_y = true;
      plot::write_svg(out_dir / ("plot_N" + std::to_string(depth) + ".svg"), {median_series}, band,
                      style);
      manifest["outputs"].push_back("plot_N" + std::to_string(depth) + ".svg");
    }

    json depth_json;
    depth_json["N"] = depth;
    depth_json["alpha"] = depth_result.alpha;
    depth_json["eta"] = depth_result.eta;
    depth_json["max_iter"] = max_iter;
    depth_json["theory"] = detail::theory_report_json(depth_result.report);
    depth_json["summary_csv"] = summary_name;
    depth_json["reps"] = json::array();
    for (int rep = 0; rep < config.reps; ++rep) {
      const RepResult& r = depth_result.reps[static_cast<std::size_t>(rep)];
      json rep_json;
      rep_json["rep"] = rep;
      rep_json["seed"] = r.rep_seed;
      rep_json["status"] = r.status == dynamics::RunStatus::diverged  ? "diverged"
                           : r.status == dynamics::RunStatus::capped ? "capped"
                                                                     : "completed";
      rep_json["trajectory_csv"] = "traj_" + rep_tag(depth, rep) + ".csv";
      rep_json["best_iter"] = r.best_iter;
      rep_json["best_metric"] = r.best_metric;
      rep_json["plateau_length"] = r.plateau_length;
      rep_json["window_mid_iter"] =
          r.window_mid_iter ? json(*r.window_mid_iter) : json(nullptr);
      rep_json["window_mid_metric"] =
          r.window_mid_metric ? json(*r.window_mid_metric) : json(nullptr);
      rep_json["ridge_lambda"] = r.ridge_lambda ? json(*r.ridge_lambda) : json(nullptr);
      rep_json["ridge_l2_err"] = r.ridge_l2_err ? json(*r.ridge_l2_err) : json(nullptr);
      depth_json["reps"].push_back(rep_json);
      manifest["outputs"].push_back("traj_" + rep_tag(depth, rep) + ".csv");
      if (config.full_paths)
        manifest["outputs"].push_back("paths_" + rep_tag(depth, rep) + ".csv");
    }
    depth_entries.push_back(depth_json);
    manifest["outputs"].push_back(summary_name);
    manifest["outputs"].push_back(theory_name);

    result.depth_results.push_back(std::move(depth_result));
  }

  manifest["depths"] = depth_entries;
  result.manifest_path = out_dir / "manifest.json";
  {
    std::ofstream out(result.manifest_path);
    if (!out) throw std::runtime_error("cannot write manifest.json");
    out << manifest.dump(2) << '\n';
  }
  return result;
}

}  // namespace sparsegd::experiment
