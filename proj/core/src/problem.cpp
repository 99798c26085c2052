#include "sparsegd/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

namespace sparsegd {

DesignMatrix gen_design(Eigen::Index n, Eigen::Index p, DesignKind kind, std::uint64_t seed) {
  if (n < 1 || p < 1) throw std::invalid_argument("gen_design: n and p must be >= 1");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd x(n, p);
  if (kind == DesignKind::rademacher) {
    std::uniform_int_distribution<int> bit(0, 1);
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index i = 0; i < n; ++i) x(i, j) = bit(rng) ? 1.0 : -1.0;
  } else {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index i = 0; i < n; ++i) x(i, j) = gauss(rng);
  }
  // Rescale so each column of X/sqrt(n) has unit l2 norm. For +-1 entries the
  // factor is exactly one.
  const double target = std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < p; ++j) {
    const double norm = x.col(j).norm();
    if (norm == 0.0) throw std::runtime_error("gen_design: zero column cannot be normalized");
    if (norm != target) x.col(j) *= target / norm;
  }
  return DesignMatrix{std::move(x), true, kind};
}

double coherence(const DesignMatrix& design) {
  if (!design.normalized)
    throw std::invalid_argument("coherence: design must have normalized columns");
  if (design.p() < 2) throw std::invalid_argument("coherence: needs p >= 2");
  const Eigen::MatrixXd gram =
      design.entries.transpose() * design.entries / static_cast<double>(design.n());
  double mu = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j) mu = std::max(mu, std::abs(gram(i, j)));
  return mu;
}

IncoherenceReport check_incoherence(const DesignMatrix& design, Eigen::Index k,
                                    double condition_number, double c_gamma) {
  if (k < 1) throw std::invalid_argument("check_incoherence: k must be >= 1");
  if (condition_number < 1.0)
    throw std::invalid_argument("check_incoherence: condition number must be >= 1");
  if (c_gamma <= 0.0) throw std::invalid_argument("check_incoherence: c_gamma must be > 0");
  IncoherenceReport report;
  report.mu = coherence(design);
  report.threshold = c_gamma / (static_cast<double>(k) * condition_number);
  report.pass = report.mu <= report.threshold;
  return report;
}

SparseSignal gen_signal(Eigen::Index p, const std::vector<Eigen::Index>& support,
                        const std::vector<double>& values) {
  if (p < 1) throw std::invalid_argument("gen_signal: p must be >= 1");
  if (support.size() != values.size())
    throw std::invalid_argument("gen_signal: support and values must have equal length");
  std::set<Eigen::Index> seen;
  SparseSignal signal;
  signal.values = Eigen::VectorXd::Zero(p);
  for (std::size_t i = 0; i < support.size(); ++i) {
    const Eigen::Index idx = support[i];
    if (idx < 0 || idx >= p) throw std::invalid_argument("gen_signal: index out of range");
    if (!seen.insert(idx).second) throw std::invalid_argument("gen_signal: duplicate index");
    if (!std::isfinite(values[i]) || values[i] == 0.0)
      throw std::invalid_argument("gen_signal: support values must be finite and nonzero");
    signal.values[idx] = values[i];
  }
  signal.support.assign(seen.begin(), seen.end());
  if (!signal.support.empty()) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Eigen::Index idx : signal.support) {
      const double a = std::abs(signal.values[idx]);
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    signal.w_min = lo;
    signal.w_max = hi;
    signal.condition_number = hi / lo;
  }
  return signal;
}

NoiseVector gen_noise(Eigen::Index n, double sigma, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_noise: n must be >= 1");
  if (sigma < 0.0) throw std::invalid_argument("gen_noise: sigma must be >= 0");
  NoiseVector noise;
  noise.sigma = sigma;
  noise.entries = Eigen::VectorXd::Zero(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) noise.entries[i] = sigma * gauss(rng);
  return noise;
}

Problem assemble(const DesignMatrix& design, const SparseSignal& truth, const NoiseVector& noise) {
  if (truth.p() != design.p()) throw std::invalid_argument("assemble: signal dimension mismatch");
  if (noise.entries.size() != design.n())
    throw std::invalid_argument("assemble: noise dimension mismatch");
  Problem problem;
  problem.y = design.entries * truth.values + noise.entries;
  problem.design = design;
  problem.truth = truth;
  problem.noise = noise;
  return problem;
}

double noise_linf_bound(double sigma, Eigen::Index n, Eigen::Index p) {
  if (sigma < 0.0) throw std::invalid_argument("noise_linf_bound: sigma must be >= 0");
  if (n < 1 || p < 1) throw std::invalid_argument("noise_linf_bound: n and p must be >= 1");
  return 2.0 * std::sqrt(2.0 * sigma * sigma * std::log(2.0 * static_cast<double>(p)) /
                         static_cast<double>(n));
}

double noise_linf_value(const Problem& problem) {
  if (problem.noise) {
    return (problem.design.entries.transpose() * problem.noise->entries /
            static_cast<double>(problem.n()))
        .cwiseAbs()
        .maxCoeff();
  }
  return noise_linf_bound(0.0, problem.n(), problem.p());
}

static Eigen::VectorXd load_csv_signal(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_signal: cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t consumed = 0;
    const double v = std::stod(line, &consumed);
    if (consumed != line.size())
      throw std::runtime_error("load_signal: malformed line '" + line + "'");
    values.push_back(v);
  }
  if (values.empty()) throw std::runtime_error("load_signal: empty file " + path.string());
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

namespace {

// Reads one whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  return token;
}

}  // namespace

static Eigen::VectorXd load_pgm8_signal(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_signal: cannot open " + path.string());
  if (pgm_token(in) != "P5") throw std::runtime_error("load_signal: not a binary P5 PGM");
  const long width = std::stol(pgm_token(in));
  const long height = std::stol(pgm_token(in));
  const long maxval = std::stol(pgm_token(in));
  if (width < 1 || height < 1) throw std::runtime_error("load_signal: bad PGM dimensions");
  if (maxval != 255) throw std::runtime_error("load_signal: only maxval 255 PGM is supported");
  std::vector<unsigned char> pixels(static_cast<std::size_t>(width * height));
  in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size()))
    throw std::runtime_error("load_signal: truncated PGM pixel data");
  Eigen::VectorXd out(static_cast<Eigen::Index>(pixels.size()));
  for (std::size_t i = 0; i < pixels.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = static_cast<double>(pixels[i]) / 255.0;
  return out;
}

Eigen::VectorXd load_signal(const std::filesystem::path& path, SignalFileFormat format) {
  switch (format) {
    case SignalFileFormat::csv_vector:
      return load_csv_signal(path);
    case SignalFileFormat::pgm8:
      return load_pgm8_signal(path);
  }
  throw std::invalid_argument("load_signal: unknown format");
}

}  // namespace sparsegd
