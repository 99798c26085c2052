#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace sparsegd {

enum class DesignKind { rademacher, gaussian };

// n x p design whose columns are scaled so that X/sqrt(n) has unit l2
// columns. Every routine that needs the coherence definition checks the
// `normalized` flag instead of silently renormalizing.
struct DesignMatrix {
  Eigen::MatrixXd entries;
  bool normalized = false;
  DesignKind kind = DesignKind::rademacher;  // generation metadata

  Eigen::Index n() const { return entries.rows(); }
  Eigen::Index p() const { return entries.cols(); }
};

struct SparseSignal {
  Eigen::VectorXd values;           // length p, zeros off the support
  std::vector<Eigen::Index> support;  // indices of nonzeros, ascending
  double w_max = 0.0;               // max |w*_i| over the support
  double w_min = 0.0;               // min |w*_i| over the support
  double condition_number = 1.0;    // w_max / w_min, 1 for empty support

  Eigen::Index k() const { return static_cast<Eigen::Index>(support.size()); }
  Eigen::Index p() const { return values.size(); }
};

struct NoiseVector {
  Eigen::VectorXd entries;
  double sigma = 0.0;  // sub-Gaussian scale used to draw the entries
};

struct SeedMeta {
  std::uint64_t design = 0;
  std::uint64_t noise = 0;
  std::uint64_t signal = 0;
};

// Observations y = X w* + xi. Truth and noise are retained in oracle mode so
// error metrics can be computed against them.
struct Problem {
  DesignMatrix design;
  Eigen::VectorXd y;
  std::optional<SparseSignal> truth;
  std::optional<NoiseVector> noise;
  SeedMeta seed_meta;

  Eigen::Index n() const { return design.n(); }
  Eigen::Index p() const { return design.p(); }
  bool oracle_mode() const { return truth.has_value(); }
};

DesignMatrix gen_design(Eigen::Index n, Eigen::Index p, DesignKind kind, std::uint64_t seed);

// Coherence of X/sqrt(n): the largest absolute inner product between
// distinct unit-normalized columns. Requires a normalized design and p >= 2.
double coherence(const DesignMatrix& design);

struct IncoherenceReport {
  double mu = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// Checks mu <= c_gamma / (k r), the working form of the mu ~ 1/(k r)
// hypothesis with its unspecified constant exposed as c_gamma.
IncoherenceReport check_incoherence(const DesignMatrix& design, Eigen::Index k,
                                    double condition_number, double c_gamma = 0.01);

SparseSignal gen_signal(Eigen::Index p, const std::vector<Eigen::Index>& support,
                        const std::vector<double>& values);

// sigma * standard normal draws; sigma = 0 gives the zero vector. The
// underlying standard normals depend only on (n, seed), so scaling sigma
// rescales the same draws.
NoiseVector gen_noise(Eigen::Index n, double sigma, std::uint64_t seed);

Problem assemble(const DesignMatrix& design, const SparseSignal& truth, const NoiseVector& noise);

// High-probability proxy for ||X^T xi / n||_inf when xi is sigma-sub-Gaussian:
// 2 sqrt(2 sigma^2 log(2p) / n).
double noise_linf_bound(double sigma, Eigen::Index n, Eigen::Index p);

// Exact ||X^T xi / n||_inf when the noise is stored, else the proxy above.
double noise_linf_value(const Problem& problem);

enum class SignalFileFormat { csv_vector, pgm8 };

// csv_vector: one real per line. pgm8: binary "P5" 8-bit grayscale with
// maxval 255, flattened row-major and scaled to [0, 1].
Eigen::VectorXd load_signal(const std::filesystem::path& path, SignalFileFormat format);

// Problem bundle directory: meta.json, X.csv, y.csv and, in oracle mode,
// wstar.csv and xi.csv.
void save_problem(const std::filesystem::path& dir, const Problem& problem);
Problem load_problem(const std::filesystem::path& dir);

}  // namespace sparsegd
