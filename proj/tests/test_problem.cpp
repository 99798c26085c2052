#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "sparsegd/csv.hpp"
#include "sparsegd/problem.hpp"
#include "sparsegd/seeds.hpp"

using namespace sparsegd;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("sparsegd_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("gen_design produces normalized rademacher designs") {
  const DesignMatrix d = gen_design(500, 3000, DesignKind::rademacher, 7);
  CHECK(d.n() == 500);
  CHECK(d.p() == 3000);
  CHECK(d.normalized);
  for (Eigen::Index i = 0; i < d.n(); ++i)
    for (Eigen::Index j = 0; j < 40; ++j) CHECK(std::abs(d.entries(i, j)) == 1.0);
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    const double col = d.entries.col(j).squaredNorm() / static_cast<double>(d.n());
    CHECK(std::abs(col - 1.0) <= 1e-12);
  }
}

TEST_CASE("gen_design handles the 1x1 case and rejects zero dimensions") {
  const DesignMatrix d = gen_design(1, 1, DesignKind::rademacher, 0);
  CHECK(std::abs(d.entries(0, 0)) == 1.0);
  CHECK_THROWS_AS(gen_design(0, 5, DesignKind::rademacher, 0), std::invalid_argument);
  CHECK_THROWS_AS(gen_design(5, 0, DesignKind::gaussian, 0), std::invalid_argument);
}

TEST_CASE("gen_design is deterministic given the seed") {
  const DesignMatrix a = gen_design(4, 2, DesignKind::gaussian, 42);
  const DesignMatrix b = gen_design(4, 2, DesignKind::gaussian, 42);
  const DesignMatrix c = gen_design(4, 2, DesignKind::gaussian, 43);
  CHECK(a.entries == b.entries);
  CHECK(a.entries != c.entries);
  for (Eigen::Index j = 0; j < a.p(); ++j)
    CHECK(std::abs(a.entries.col(j).squaredNorm() / 4.0 - 1.0) <= 1e-12);
}

TEST_CASE("coherence of orthogonal columns is zero and duplicates give one") {
  DesignMatrix ortho;
  ortho.entries = Eigen::MatrixXd::Identity(4, 4) * 2.0;  // columns of norm sqrt(n)=2
  ortho.normalized = true;
  CHECK(coherence(ortho) == 0.0);

  DesignMatrix dup = gen_design(16, 3, DesignKind::rademacher, 3);
  dup.entries.col(2) = dup.entries.col(0);
  CHECK(coherence(dup) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coherence of the two-column example is 1/sqrt(2)") {
  // Columns (1,0) and (1,1)/sqrt(2), scaled by sqrt(n): inner product 1/sqrt(2).
  DesignMatrix d;
  d.entries.resize(2, 2);
  const double s = std::sqrt(2.0);
  d.entries << s, 1.0, 0.0, 1.0;
  d.normalized = true;
  CHECK(std::abs(d.entries.col(0).squaredNorm() / 2.0 - 1.0) <= 1e-12);
  CHECK(std::abs(d.entries.col(1).squaredNorm() / 2.0 - 1.0) <= 1e-12);
  CHECK(coherence(d) == doctest::Approx(0.7071067811865476).epsilon(1e-12));
}

TEST_CASE("coherence rejects unnormalized designs and p < 2") {
  DesignMatrix d;
  d.entries = Eigen::MatrixXd::Random(3, 3);
  d.normalized = false;
  CHECK_THROWS_AS(coherence(d), std::invalid_argument);
  const DesignMatrix single = gen_design(4, 1, DesignKind::rademacher, 0);
  CHECK_THROWS_AS(coherence(single), std::invalid_argument);
}

TEST_CASE("coherence is invariant to column permutation and sign flips") {
  const DesignMatrix base = gen_design(20, 8, DesignKind::gaussian, 11);
  const double mu = coherence(base);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    DesignMatrix shuffled = base;
    std::vector<Eigen::Index> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Eigen::Index j = 0; j < 8; ++j) {
      shuffled.entries.col(j) = base.entries.col(perm[static_cast<std::size_t>(j)]);
      if (rng() % 2) shuffled.entries.col(j) *= -1.0;
    }
    CHECK(coherence(shuffled) == doctest::Approx(mu).epsilon(1e-12));
  }
}

TEST_CASE("check_incoherence applies the c_gamma/(k r) threshold") {
  DesignMatrix ortho;
  ortho.entries = Eigen::MatrixXd::Identity(8, 8) * std::sqrt(8.0);
  ortho.normalized = true;
  // mu = 0 passes for any k, r.
  CHECK(check_incoherence(ortho, 5, 1.0, 0.01).pass);

  DesignMatrix d = gen_design(100, 40, DesignKind::rademacher, 1);
  const IncoherenceReport report = check_incoherence(d, 5, 1.0, 0.01);
  CHECK(report.threshold == doctest::Approx(0.002).epsilon(1e-15));
  CHECK(report.pass == (report.mu <= 0.002));
  // Arithmetic of the rule itself.
  const IncoherenceReport loose = check_incoherence(d, 5, 1.0, 100.0);
  CHECK(loose.threshold == doctest::Approx(20.0).epsilon(1e-15));
  CHECK(loose.pass);
}

TEST_CASE("rademacher coherence at simulation scale stays in [0,1] and is deterministic") {
  // n=500, p=3000: the value is computed, never assumed.
  const DesignMatrix d1 = gen_design(500, 3000, DesignKind::rademacher, 21);
  const DesignMatrix d2 = gen_design(500, 3000, DesignKind::rademacher, 21);
  const double mu1 = coherence(d1);
  CHECK(mu1 >= 0.0);
  CHECK(mu1 <= 1.0);
  CHECK(mu1 == coherence(d2));
  const IncoherenceReport report = check_incoherence(d1, 5, 1.0, 0.01);
  CHECK(report.mu == mu1);
  CHECK(report.threshold == doctest::Approx(0.002).epsilon(1e-15));
}

TEST_CASE("gen_signal derives support statistics") {
  std::vector<Eigen::Index> first5{0, 1, 2, 3, 4};
  const SparseSignal spike = gen_signal(3000, first5, {1, 1, 1, 1, 1});
  CHECK(spike.k() == 5);
  CHECK(spike.w_max == 1.0);
  CHECK(spike.w_min == 1.0);
  CHECK(spike.condition_number == 1.0);

  const SparseSignal staircase = gen_signal(200, {10, 20, 30, 40}, {1, 2, 3, 4});
  CHECK(staircase.w_max == 4.0);
  CHECK(staircase.w_min == 1.0);
  CHECK(staircase.condition_number == 4.0);

  const SparseSignal null_signal = gen_signal(10, {}, {});
  CHECK(null_signal.k() == 0);
  CHECK(null_signal.values.isZero(0.0));
}

TEST_CASE("gen_signal rejects duplicates, zero values and bad indices") {
  CHECK_THROWS_AS(gen_signal(10, {1, 1}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(gen_signal(10, {1}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(gen_signal(10, {10}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(gen_signal(10, {-1}, {1.0}), std::invalid_argument);
}

TEST_CASE("gen_noise scales shared standard normals") {
  const NoiseVector zero = gen_noise(10, 0.0, 99);
  CHECK(zero.entries.isZero(0.0));
  CHECK_THROWS_AS(gen_noise(10, -0.1, 0), std::invalid_argument);

  const NoiseVector small = gen_noise(500, 0.5, 1);
  const NoiseVector large = gen_noise(500, 25.0, 1);
  for (Eigen::Index i = 0; i < 500; ++i)
    CHECK(large.entries[i] == doctest::Approx(50.0 * small.entries[i]).epsilon(1e-15));

  const double sample_std =
      std::sqrt(small.entries.squaredNorm() / static_cast<double>(small.entries.size()));
  CHECK(sample_std >= 0.4);
  CHECK(sample_std <= 0.6);
}

TEST_CASE("assemble forms y = X w* + xi and the noise can be re-derived exactly") {
  SUBCASE("degenerate zero case") {
    const DesignMatrix d = gen_design(4, 3, DesignKind::rademacher, 0);
    const SparseSignal w = gen_signal(3, {}, {});
    const NoiseVector xi = gen_noise(4, 0.0, 0);
    const Problem problem = assemble(d, w, xi);
    CHECK(problem.y.isZero(0.0));
  }
  SUBCASE("scalar case") {
    DesignMatrix d;
    d.entries.resize(1, 1);
    d.entries << 1.0;
    d.normalized = true;
    const SparseSignal w = gen_signal(1, {0}, {1.0});
    NoiseVector xi;
    xi.entries.resize(1);
    xi.entries << 0.5;
    xi.sigma = 0.5;
    const Problem problem = assemble(d, w, xi);
    CHECK(problem.y[0] == 1.5);
  }
  SUBCASE("stored noise is re-derived from y - X w* to machine rounding") {
    const DesignMatrix d = gen_design(50, 80, DesignKind::gaussian, 5);
    const SparseSignal w = gen_signal(80, {3, 17, 41}, {0.5, -2.0, 1.25});
    const NoiseVector xi = gen_noise(50, 0.7, 6);
    const Problem problem = assemble(d, w, xi);
    const Eigen::VectorXd rederived = problem.y - d.entries * w.values;
    for (Eigen::Index i = 0; i < 50; ++i)
      CHECK(std::abs(rederived[i] - xi.entries[i]) <=
            1e-12 * std::max(1.0, std::abs(problem.y[i])));
  }
  SUBCASE("dimension mismatch") {
    const DesignMatrix d = gen_design(4, 3, DesignKind::rademacher, 0);
    const SparseSignal w = gen_signal(5, {}, {});
    const NoiseVector xi = gen_noise(4, 0.0, 0);
    CHECK_THROWS_AS(assemble(d, w, xi), std::invalid_argument);
  }
}

TEST_CASE("noise_linf_bound evaluates the sub-Gaussian proxy") {
  CHECK(noise_linf_bound(0.5, 500, 3000) == doctest::Approx(0.18654237854396724).epsilon(1e-12));
  CHECK(noise_linf_bound(0.0, 10, 10) == 0.0);
  // 1/sqrt(n) scaling: quadrupling n halves the bound.
  const double base = noise_linf_bound(1.0, 100, 64);
  CHECK(noise_linf_bound(1.0, 400, 64) == doctest::Approx(base / 2.0).epsilon(1e-12));
}

TEST_CASE("noise_linf_bound dominates the empirical value in >= 95% of trials") {
  // sigma = 0.5, n = 500, p = 3000, 200 seeded noise draws on a fixed design.
  const DesignMatrix d = gen_design(500, 3000, DesignKind::rademacher, 77);
  const double bound = noise_linf_bound(0.5, 500, 3000);
  int covered = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const NoiseVector xi = gen_noise(500, 0.5, derive_seed(1234, static_cast<std::uint64_t>(trial)));
    const double value =
        (d.entries.transpose() * xi.entries / 500.0).cwiseAbs().maxCoeff();
    if (value <= bound) ++covered;
  }
  CHECK(covered >= 190);
}

TEST_CASE("load_signal reads csv vectors") {
  const auto dir = temp_dir("csv_signal");
  {
    std::ofstream out(dir / "w.csv");
    out << "0\n1\n0\n";
  }
  const Eigen::VectorXd w = load_signal(dir / "w.csv", SignalFileFormat::csv_vector);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == 1.0);
  CHECK(w[2] == 0.0);
  CHECK_THROWS(load_signal(dir / "missing.csv", SignalFileFormat::csv_vector));
}

TEST_CASE("load_signal reads 8-bit P5 images scaled to [0,1]") {
  const auto dir = temp_dir("pgm_signal");
  {
    std::ofstream out(dir / "img.pgm", std::ios::binary);
    out << "P5\n2 1\n255\n";
    const unsigned char px[2] = {0, 255};
    out.write(reinterpret_cast<const char*>(px), 2);
  }
  const Eigen::VectorXd w = load_signal(dir / "img.pgm", SignalFileFormat::pgm8);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == 1.0);

  {
    std::ofstream out(dir / "img16.pgm", std::ios::binary);
    out << "P5\n2 1\n65535\n";
    const unsigned char px[4] = {0, 0, 255, 255};
    out.write(reinterpret_cast<const char*>(px), 4);
  }
  CHECK_THROWS(load_signal(dir / "img16.pgm", SignalFileFormat::pgm8));
}

TEST_CASE("problem bundles round-trip through the directory format") {
  const auto dir = temp_dir("bundle");
  const DesignMatrix d = gen_design(12, 20, DesignKind::rademacher, 3);
  const SparseSignal w = gen_signal(20, {2, 7}, {1.5, -0.25});
  const NoiseVector xi = gen_noise(12, 0.3, 4);
  Problem problem = assemble(d, w, xi);
  problem.seed_meta = {3, 4, 0};
  save_problem(dir, problem);

  CHECK(std::filesystem::exists(dir / "meta.json"));
  CHECK(std::filesystem::exists(dir / "X.csv"));
  CHECK(std::filesystem::exists(dir / "y.csv"));
  CHECK(std::filesystem::exists(dir / "wstar.csv"));
  CHECK(std::filesystem::exists(dir / "xi.csv"));

  const Problem loaded = load_problem(dir);
  CHECK(loaded.design.normalized);
  CHECK(loaded.design.entries == problem.design.entries);
  CHECK(loaded.y == problem.y);
  REQUIRE(loaded.truth.has_value());
  CHECK(loaded.truth->values == problem.truth->values);
  CHECK(loaded.truth->support == problem.truth->support);
  REQUIRE(loaded.noise.has_value());
  CHECK(loaded.noise->entries == problem.noise->entries);
  CHECK(loaded.noise->sigma == 0.3);
  CHECK(loaded.seed_meta.design == 3);
}

TEST_CASE("csv matrices round-trip bit for bit") {
  const auto dir = temp_dir("csv_roundtrip");
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uniform(-1e6, 1e6);
  Eigen::MatrixXd m(7, 5);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = uniform(rng) * std::pow(10.0, int(rng() % 30) - 15);
  csv::write_matrix(dir / "m.csv", m);
  const Eigen::MatrixXd back = csv::read_matrix(dir / "m.csv");
  CHECK(back == m);
}
