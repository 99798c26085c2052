#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "sparsegd/csv.hpp"
#include "sparsegd/problem.hpp"

namespace sparsegd {

using nlohmann::json;

static std::string kind_name(DesignKind kind) {
  return kind == DesignKind::rademacher ? "rademacher" : "gaussian";
}

void save_problem(const std::filesystem::path& dir, const Problem& problem) {
  std::filesystem::create_directories(dir);
  csv::write_matrix(dir / "X.csv", problem.design.entries);
  csv::write_vector(dir / "y.csv", problem.y);

  json meta;
  meta["n"] = problem.n();
  meta["p"] = problem.p();
  meta["kind"] = kind_name(problem.design.kind);
  meta["normalized"] = problem.design.normalized;
  meta["seeds"] = {{"design", problem.seed_meta.design},
                   {"noise", problem.seed_meta.noise},
                   {"signal", problem.seed_meta.signal}};
  if (problem.truth) {
    meta["k"] = problem.truth->k();
    csv::write_vector(dir / "wstar.csv", problem.truth->values);
  }
  if (problem.noise) {
    meta["sigma"] = problem.noise->sigma;
    csv::write_vector(dir / "xi.csv", problem.noise->entries);
  }
  std::ofstream out(dir / "meta.json");
  if (!out) throw std::runtime_error("save_problem: cannot write meta.json");
  out << meta.dump(2) << '\n';
}

Problem load_problem(const std::filesystem::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw std::runtime_error("load_problem: missing meta.json in " + dir.string());
  json meta = json::parse(in);

  Problem problem;
  problem.design.entries = csv::read_matrix(dir / "X.csv");
  problem.design.normalized = meta.value("normalized", false);
  problem.design.kind =
      meta.value("kind", "rademacher") == "gaussian" ? DesignKind::gaussian : DesignKind::rademacher;
  problem.y = csv::read_vector(dir / "y.csv");
  if (problem.y.size() != problem.n())
    throw std::runtime_error("load_problem: y length does not match X");

  if (meta.contains("seeds")) {
    problem.seed_meta.design = meta["seeds"].value("design", std::uint64_t{0});
    problem.seed_meta.noise = meta["seeds"].value("noise", std::uint64_t{0});
    problem.seed_meta.signal = meta["seeds"].value("signal", std::uint64_t{0});
  }

  if (std::filesystem::exists(dir / "wstar.csv")) {
    const Eigen::VectorXd values = csv::read_vector(dir / "wstar.csv");
    std::vector<Eigen::Index> support;
    std::vector<double> nonzeros;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (values[i] != 0.0) {
        support.push_back(i);
        nonzeros.push_back(values[i]);
      }
    }
    problem.truth = gen_signal(values.size(), support, nonzeros);
  }
  if (std::filesystem::exists(dir / "xi.csv")) {
    NoiseVector noise;
    noise.entries = csv::read_vector(dir / "xi.csv");
    noise.sigma = meta.value("sigma", 0.0);
    if (noise.entries.size() != problem.n())
      throw std::runtime_error("load_problem: xi length does not match X");
    problem.noise = std::move(noise);
  }
  return problem;
}

}  // namespace sparsegd
