// Command line front end: problem generation, diagnostics, optimization runs,
// reference sequences, the ridge baseline, experiment presets and plotting.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure (a diverged run
// outside the experiment driver).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sparsegd/csv.hpp"
#include "sparsegd/dynamics.hpp"
#include "sparsegd/experiment.hpp"
#include "sparsegd/oned.hpp"
#include "sparsegd/plot.hpp"
#include "sparsegd/problem.hpp"
#include "sparsegd/ridge.hpp"
#include "sparsegd/seeds.hpp"
#include "sparsegd/theory.hpp"

namespace {

using nlohmann::json;
using namespace sparsegd;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct DivergedRun : std::runtime_error {
  using std::runtime_error::runtime_error;
};

DesignKind parse_kind(const std::string& name) {
  if (name == "rademacher") return DesignKind::rademacher;
  if (name == "gaussian") return DesignKind::gaussian;
  throw CLI::ValidationError("--kind", "must be rademacher or gaussian");
}

json window_json(const theory::TheoryReport& report) {
  // Same encoding as the experiment manifest: iteration counts past 2^63-1
  // become the string "inf".
  auto num = [](double v) -> json {
    const double r = theory::reported_iterations(v);
    return std::isinf(r) ? json("inf") : json(r);
  };
  json j;
  j["phi"] = report.phi ? json(*report.phi) : json(nullptr);
  j["psi"] = report.psi ? json(*report.psi) : json(nullptr);
  j["zeta"] = report.zeta;
  j["alpha_max"] = report.alpha_max.value;
  j["alpha_max_includes_depth_terms"] = report.alpha_max.depth_terms_applicable;
  j["eta_max"] = report.eta_max;
  j["T_l"] = report.window ? num(report.window->t_lower) : json(nullptr);
  j["T_u"] = report.window ? num(report.window->t_upper) : json(nullptr);
  j["feasible"] = report.window ? json(report.window->feasible) : json(nullptr);
  j["indicator_A"] = report.window ? json(report.window->indicator_a) : json(nullptr);
  j["predicted_off_support"] = report.predicted_off_support;
  return j;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"sparse recovery with deep diagonal parametrizations"};
  app.require_subcommand(1);

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a problem bundle directory");
  struct {
    std::int64_t n = 500, p = 3000, k = 5;
    double gamma = 1.0, sigma = 0.5;
    std::string kind = "rademacher", out = "problem";
    std::uint64_t seed = 1;
    std::vector<std::int64_t> support;
    std::vector<double> values;
    bool dense_gaussian = false;
  } g;
  gen->add_option("--n", g.n, "sample count");
  gen->add_option("--p", g.p, "dimension");
  gen->add_option("--k", g.k, "support size for the spike signal");
  gen->add_option("--gamma", g.gamma, "spike magnitude");
  gen->add_option("--sigma", g.sigma, "noise scale");
  gen->add_option("--kind", g.kind, "design kind: rademacher|gaussian");
  gen->add_option("--seed", g.seed, "base seed");
  gen->add_option("--out", g.out, "output directory");
  gen->add_option("--support", g.support, "explicit support indices");
  gen->add_option("--values", g.values, "explicit support values");
  gen->add_flag("--dense-gaussian", g.dense_gaussian, "dense N(0,1) signal");

  // ---- coherence ----------------------------------------------------------
  auto* coh = app.add_subcommand("coherence", "coherence and incoherence check");
  struct {
    std::string problem;
    std::int64_t n = 500, p = 3000, k = 0;
    double r = 1.0, c_gamma = 0.01;
    std::string kind = "rademacher";
    std::uint64_t seed = 1;
  } ch;
  coh->add_option("--problem", ch.problem, "problem bundle directory");
  coh->add_option("--n", ch.n, "sample count (when generating)");
  coh->add_option("--p", ch.p, "dimension (when generating)");
  coh->add_option("--kind", ch.kind, "design kind (when generating)");
  coh->add_option("--seed", ch.seed, "design seed (when generating)");
  coh->add_option("--k", ch.k, "sparsity for the incoherence threshold");
  coh->add_option("--r", ch.r, "signal condition number");
  coh->add_option("--c-gamma", ch.c_gamma, "incoherence constant");

  // ---- bounds ---------------------------------------------------------------
  auto* bounds_cmd = app.add_subcommand("bounds", "theory report as JSON");
  theory::BoundsInput bi;
  bi.w_max = 1.0;
  bi.w_min = 1.0;
  bi.epsilon = 1e-3;
  bi.depth = 3;
  bi.p = 3000;
  bi.k = 5;
  bi.alpha = 1e-2;
  bi.eta = 1e-3;
  double bounds_w0 = 0.0, bounds_sigma = -1.0;
  std::int64_t bounds_n = 500;
  std::string bounds_problem;
  bounds_cmd->add_option("--problem", bounds_problem,
                         "fill w_max/w_min/k/p and the exact noise from a bundle");
  bounds_cmd->add_option("--wmax", bi.w_max, "largest |w*| on the support");
  bounds_cmd->add_option("--wmin", bi.w_min, "smallest |w*| on the support");
  bounds_cmd->add_option("--epsilon", bi.epsilon, "precision");
  bounds_cmd->add_option("--depth,-N", bi.depth, "depth N");
  bounds_cmd->add_option("--p", bi.p, "dimension");
  bounds_cmd->add_option("--k", bi.k, "sparsity (0 for the null signal)");
  bounds_cmd->add_option("--alpha", bi.alpha, "initialization alpha");
  bounds_cmd->add_option("--w0", bounds_w0, "initialization as alpha^N");
  bounds_cmd->add_option("--eta", bi.eta, "step size");
  bounds_cmd->add_option("--noise-linf", bi.noise_linf, "||X^T xi / n||_inf or proxy");
  bounds_cmd->add_option("--sigma", bounds_sigma, "use the sub-Gaussian proxy at this sigma");
  bounds_cmd->add_option("--n", bounds_n, "sample count for the proxy");

  // ---- run ------------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "gradient descent on a problem bundle");
  struct {
    std::string problem, out = "trajectory.csv", paths_out;
    int depth = 3;
    double alpha = 0.0, w0 = 0.0, eta = 0.0;
    std::string eta_rule;
    std::int64_t max_iter = 10000, record_every = 100;
    double divergence_factor = 1e3;
    bool full_paths = false;
  } rn;
  run_cmd->add_option("--problem", rn.problem, "problem bundle directory")->required();
  run_cmd->add_option("--depth,-N", rn.depth, "depth N");
  run_cmd->add_option("--alpha", rn.alpha, "initialization alpha");
  run_cmd->add_option("--w0", rn.w0, "initialization as alpha^N");
  run_cmd->add_option("--eta", rn.eta, "step size");
  run_cmd->add_option("--eta-rule", rn.eta_rule, "depth_scaled|safe instead of --eta");
  run_cmd->add_option("--max-iter", rn.max_iter, "iteration cap");
  run_cmd->add_option("--record-every", rn.record_every, "recording stride");
  run_cmd->add_option("--divergence-factor", rn.divergence_factor, "loss blowup factor");
  run_cmd->add_flag("--full-paths", rn.full_paths, "record coordinate paths");
  run_cmd->add_option("--out", rn.out, "trajectory CSV path");
  run_cmd->add_option("--paths-out", rn.paths_out, "coordinate paths CSV path");

  // ---- oracle -----------------------------------------------------------------
  auto* oracle_cmd = app.add_subcommand("oracle", "one-dimensional reference sequences");
  struct {
    std::string kind = "signal", out = "sequence.csv";
    double target = 1.0, alpha = 0.1, b = 0.0, eta = 0.01;
    int depth = 3;
    std::int64_t steps = 100;
  } oc;
  oracle_cmd->add_option("--kind", oc.kind, "signal|error_growth|pair");
  oracle_cmd->add_option("--target", oc.target, "x*");
  oracle_cmd->add_option("--alpha", oc.alpha, "initial scale");
  oracle_cmd->add_option("--b", oc.b, "error term magnitude B");
  oracle_cmd->add_option("--eta", oc.eta, "step size");
  oracle_cmd->add_option("--depth,-N", oc.depth, "depth N");
  oracle_cmd->add_option("--steps", oc.steps, "number of steps");
  oracle_cmd->add_option("--out", oc.out, "sequence CSV path");

  // ---- ridge ---------------------------------------------------------------
  auto* ridge_cmd = app.add_subcommand("ridge", "cross-validated ridge baseline");
  struct {
    std::string problem;
    double lambda_min = 1e-4, lambda_max = 1e4;
    int count = 25, folds = 5;
    std::uint64_t seed = 1;
  } rg;
  ridge_cmd->add_option("--problem", rg.problem, "problem bundle directory")->required();
  ridge_cmd->add_option("--lambda-min", rg.lambda_min, "grid minimum");
  ridge_cmd->add_option("--lambda-max", rg.lambda_max, "grid maximum");
  ridge_cmd->add_option("--lambda-count", rg.count, "grid size (log-spaced)");
  ridge_cmd->add_option("--folds", rg.folds, "cross validation folds");
  ridge_cmd->add_option("--seed", rg.seed, "shuffle seed");

  // ---- experiment -------------------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "run a preset or configured experiment");
  struct {
    std::string preset, config, out;
    int reps = 0;
    std::int64_t base_seed = -1;
    bool svg = false;
    int threads = 0;
  } ex;
  exp_cmd->add_option("--preset", ex.preset,
                      "convergence|large_init|window|incremental|kernel");
  exp_cmd->add_option("--config", ex.config, "JSON config file");
  exp_cmd->add_option("--reps", ex.reps, "override repetitions");
  exp_cmd->add_option("--base-seed", ex.base_seed, "override base seed");
  exp_cmd->add_option("--out", ex.out, "output directory");
  exp_cmd->add_flag("--svg", ex.svg, "emit SVG plots");
  exp_cmd->add_option("--threads", ex.threads, "worker threads (0 = auto)");

  // ---- plot ----------------------------------------------------------------
  auto* plot_cmd = app.add_subcommand("plot", "render a summary CSV as SVG");
  struct {
    std::string summary, out = "plot.svg", title;
    bool log_y = false;
  } pl;
  plot_cmd->add_option("--summary", pl.summary, "summary CSV (iter,median,q25,q75)")->required();
  plot_cmd->add_option("--out", pl.out, "SVG path");
  plot_cmd->add_option("--title", pl.title, "plot title");
  plot_cmd->add_flag("--log-y", pl.log_y, "logarithmic y axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  if (gen->parsed()) {
    const DesignMatrix design = gen_design(g.n, g.p, parse_kind(g.kind), derive_seed(g.seed, 0));
    const NoiseVector noise = gen_noise(g.n, g.sigma, derive_seed(g.seed, 1));
    SparseSignal truth;
    if (g.dense_gaussian) {
      const NoiseVector draws = gen_noise(g.p, 1.0, derive_seed(g.seed, 2));
      std::vector<Eigen::Index> support;
      std::vector<double> values;
      for (Eigen::Index i = 0; i < g.p; ++i) {
        support.push_back(i);
        values.push_back(draws.entries[i] == 0.0 ? 1e-12 : draws.entries[i]);
      }
      truth = gen_signal(g.p, support, values);
    } else if (!g.support.empty()) {
      std::vector<Eigen::Index> support(g.support.begin(), g.support.end());
      truth = gen_signal(g.p, support, g.values);
    } else {
      std::vector<Eigen::Index> support;
      std::vector<double> values;
      for (std::int64_t i = 0; i < g.k; ++i) {
        support.push_back(i);
        values.push_back(g.gamma);
      }
      truth = gen_signal(g.p, support, values);
    }
    Problem problem = assemble(design, truth, noise);
    problem.seed_meta = {derive_seed(g.seed, 0), derive_seed(g.seed, 1), derive_seed(g.seed, 2)};
    save_problem(g.out, problem);
    std::cout << "wrote problem bundle to " << g.out << '\n';
    return kExitOk;
  }

  if (coh->parsed()) {
    DesignMatrix design;
    if (!ch.problem.empty()) {
      design = load_problem(ch.problem).design;
    } else {
      design = gen_design(ch.n, ch.p, parse_kind(ch.kind), ch.seed);
    }
    json out;
    out["mu"] = coherence(design);
    if (ch.k > 0) {
      const IncoherenceReport report = check_incoherence(design, ch.k, ch.r, ch.c_gamma);
      out["threshold"] = report.threshold;
      out["pass"] = report.pass;
    }
    std::cout << out.dump(2) << '\n';
    return kExitOk;
  }

  if (bounds_cmd->parsed()) {
    if (!bounds_problem.empty()) {
      // The exact ||X^T xi / n||_inf when the noise is stored, the
      // sub-Gaussian proxy otherwise.
      const Problem problem = load_problem(bounds_problem);
      bi.p = problem.p();
      bi.noise_linf = noise_linf_value(problem);
      if (problem.truth && problem.truth->k() > 0) {
        bi.k = problem.truth->k();
        bi.w_max = problem.truth->w_max;
        bi.w_min = problem.truth->w_min;
      } else if (problem.truth) {
        bi.k = 0;
      }
    }
    if (bounds_w0 > 0.0) bi.alpha = std::pow(bounds_w0, 1.0 / static_cast<double>(bi.depth));
    if (bounds_sigma >= 0.0) bi.noise_linf = noise_linf_bound(bounds_sigma, bounds_n, bi.p);
    std::cout << window_json(theory::make_report(bi)).dump(2) << '\n';
    return kExitOk;
  }

  if (run_cmd->parsed()) {
    const Problem problem = load_problem(rn.problem);
    dynamics::RunOptions options;
    options.depth = rn.depth;
    options.alpha = rn.w0 > 0.0 ? std::pow(rn.w0, 1.0 / static_cast<double>(rn.depth)) : rn.alpha;
    if (options.alpha <= 0.0)
      throw CLI::ValidationError("--alpha", "provide --alpha or --w0 > 0");
    if (!rn.eta_rule.empty()) {
      if (rn.eta_rule == "depth_scaled") {
        options.eta = 1.0 / (5.0 * rn.depth * rn.depth);
      } else if (rn.eta_rule == "safe") {
        if (!problem.truth) throw CLI::ValidationError("--eta-rule", "safe needs an oracle bundle");
        options.eta = theory::eta_max(options.alpha, rn.depth, problem.truth->w_max);
      } else {
        throw CLI::ValidationError("--eta-rule", "must be depth_scaled or safe");
      }
    } else {
      options.eta = rn.eta;
    }
    options.max_iter = rn.max_iter;
    options.record_every = rn.record_every;
    options.full_paths = rn.full_paths || !rn.paths_out.empty();
    options.divergence_factor = rn.divergence_factor;
    const dynamics::Trajectory trajectory = dynamics::run(problem, options);
    dynamics::write_trajectory_csv(rn.out, trajectory);
    if (!rn.paths_out.empty()) dynamics::write_paths_csv(rn.paths_out, trajectory);
    std::cout << "status: "
              << (trajectory.status == dynamics::RunStatus::diverged  ? "diverged"
                  : trajectory.status == dynamics::RunStatus::capped ? "capped"
                                                                     : "completed")
              << ", records: " << trajectory.records.size() << '\n';
    if (trajectory.status == dynamics::RunStatus::diverged)
      throw DivergedRun("run diverged (step size too large for this instance)");
    return kExitOk;
  }

  if (oracle_cmd->parsed()) {
    oned::ScalarSeqParams params;
    params.x_star = oc.target;
    params.alpha = oc.alpha;
    params.eta = oc.eta;
    params.depth = oc.depth;
    params.bound = oc.b;
    params.steps = static_cast<std::size_t>(oc.steps);
    if (oc.kind == "pair") {
      oned::write_pair_csv(oc.out, oned::simulate_pair(params), oc.depth);
    } else if (oc.kind == "signal") {
      oned::write_sequence_csv(oc.out, oned::simulate(params, oned::SequenceKind::signal));
    } else if (oc.kind == "error_growth") {
      oned::write_sequence_csv(oc.out, oned::simulate(params, oned::SequenceKind::error_growth));
    } else {
      throw CLI::ValidationError("--kind", "must be signal, error_growth or pair");
    }
    std::cout << "wrote " << oc.out << '\n';
    return kExitOk;
  }

  if (ridge_cmd->parsed()) {
    const Problem problem = load_problem(rg.problem);
    const auto grid = ridge::log_spaced_grid(rg.lambda_min, rg.lambda_max, rg.count);
    const ridge::RidgeFit fit =
        ridge::ridge_cv(problem.design.entries, problem.y, grid, rg.folds, rg.seed);
    json out;
    out["lambda"] = fit.lambda;
    out["cv_scores"] = fit.cv_scores;
    out["lambda_grid"] = grid;
    out["train_mse"] = (problem.design.entries * fit.weights - problem.y).squaredNorm() /
                       static_cast<double>(problem.n());
    if (problem.truth) out["l2_err"] = (fit.weights - problem.truth->values).norm();
    std::cout << out.dump(2) << '\n';
    return kExitOk;
  }

  if (exp_cmd->parsed()) {
    experiment::ExperimentConfig config;
    if (!ex.config.empty()) {
      config = experiment::load_config(ex.config);
    } else if (!ex.preset.empty()) {
      config = experiment::preset_config(ex.preset);
    } else {
      throw CLI::ValidationError("experiment", "provide --preset or --config");
    }
    if (ex.reps > 0) config.reps = ex.reps;
    if (ex.base_seed >= 0) config.base_seed = static_cast<std::uint64_t>(ex.base_seed);
    if (!ex.out.empty()) config.output_dir = ex.out;
    if (const char* env = std::getenv("SPARSEGD_OUTPUT_DIR")) config.output_dir = env;
    if (ex.svg) config.emit_svg = true;
    if (ex.threads > 0) config.threads = ex.threads;
    const experiment::ExperimentResult result = experiment::run_experiment(config);
    std::cout << "manifest: " << result.manifest_path.string() << '\n';
    return kExitOk;
  }

  if (plot_cmd->parsed()) {
    std::ifstream in(pl.summary);
    if (!in) throw CLI::ValidationError("--summary", "cannot open " + pl.summary);
    std::string header;
    std::getline(in, header);
    plot::Series median{"median", {}, {}};
    plot::Band band;
    double iter, med, q25, q75;
    char comma;
    while (in >> iter >> comma >> med >> comma >> q25 >> comma >> q75) {
      median.x.push_back(iter);
      median.y.push_back(med);
      band.x.push_back(iter);
      band.lower.push_back(q25);
      band.upper.push_back(q75);
    }
    if (median.x.empty()) throw CLI::ValidationError("--summary", "no rows in " + pl.summary);
    plot::PlotStyle style;
    style.title = pl.title;
    style.y_label = "metric";
    style.log_y = pl.log_y;
    plot::write_svg(pl.out, {median}, band, style);
    std::cout << "wrote " << pl.out << '\n';
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const DivergedRun& err) {
    std::cerr << "numerical failure: " << err.what() << '\n';
    return kExitNumerical;
  } catch (const CLI::Error& err) {
    std::cerr << err.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  }
}
