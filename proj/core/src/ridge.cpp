#include "sparsegd/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sparsegd::ridge {

Eigen::VectorXd ridge_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
  if (x.rows() != y.size()) throw std::invalid_argument("ridge_fit: dimension mismatch");
  if (lambda < 0.0) throw std::invalid_argument("ridge_fit: lambda must be >= 0");
  const double n = static_cast<double>(x.rows());
  Eigen::MatrixXd a = x.transpose() * x / n;
  a.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = x.transpose() * y / n;
  if (lambda == 0.0) {
    // A consistent rank-deficient system would still solve cleanly, so the
    // unregularized case needs an explicit invertibility check.
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
      throw std::runtime_error("ridge_fit: X^T X is singular at lambda = 0");
  }
  const Eigen::VectorXd w = a.ldlt().solve(rhs);
  const double residual = (a * w - rhs).norm();
  const double scale = std::max(rhs.norm(), 1.0);
  if (!w.allFinite() || residual > 1e-8 * scale)
    throw std::runtime_error("ridge_fit: normal equations are singular or ill-conditioned");
  return w;
}

RidgeFit ridge_cv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  const std::vector<double>& lambda_grid, int folds, std::uint64_t seed) {
  if (lambda_grid.empty()) throw std::invalid_argument("ridge_cv: empty lambda grid");
  if (folds < 2) throw std::invalid_argument("ridge_cv: folds must be >= 2");
  const Eigen::Index n = x.rows();
  if (folds > n) throw std::invalid_argument("ridge_cv: more folds than samples");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  // Contiguous blocks of the shuffled order.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;  // [begin, end)
  for (int f = 0; f < folds; ++f)
    blocks.emplace_back(n * f / folds, n * (f + 1) / folds);

  RidgeFit fit;
  fit.cv_scores.assign(lambda_grid.size(), 0.0);
  for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
    double total_mse = 0.0;
    for (const auto& [begin, end] : blocks) {
      const Eigen::Index holdout = end - begin;
      Eigen::MatrixXd x_train(n - holdout, x.cols());
      Eigen::VectorXd y_train(n - holdout);
      Eigen::MatrixXd x_val(holdout, x.cols());
      Eigen::VectorXd y_val(holdout);
      Eigen::Index it = 0, iv = 0;
      for (Eigen::Index pos = 0; pos < n; ++pos) {
        const Eigen::Index row = order[static_cast<std::size_t>(pos)];
        if (pos >= begin && pos < end) {
          x_val.row(iv) = x.row(row);
          y_val[iv++] = y[row];
        } else {
          x_train.row(it) = x.row(row);
          y_train[it++] = y[row];
        }
      }
      const Eigen::VectorXd w = ridge_fit(x_train, y_train, lambda_grid[g]);
      total_mse += (x_val * w - y_val).squaredNorm() / static_cast<double>(holdout);
    }
    fit.cv_scores[g] = total_mse / folds;
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < lambda_grid.size(); ++g) {
    const bool better = fit.cv_scores[g] < fit.cv_scores[best] ||
                        (fit.cv_scores[g] == fit.cv_scores[best] && lambda_grid[g] < lambda_grid[best]);
    if (better) best = g;
  }
  fit.lambda = lambda_grid[best];
  fit.weights = ridge_fit(x, y, fit.lambda);
  return fit;
}

std::vector<double> log_spaced_grid(double lambda_min, double lambda_max, int count) {
  if (count < 1) throw std::invalid_argument("log_spaced_grid: count must be >= 1");
  if (lambda_min <= 0.0 || lambda_max < lambda_min)
    throw std::invalid_argument("log_spaced_grid: need 0 < min <= max");
  std::vector<double> grid;
  if (count == 1) return {lambda_min};
  const double step = (std::log(lambda_max) - std::log(lambda_min)) / (count - 1);
  for (int i = 0; i < count; ++i) grid.push_back(std::exp(std::log(lambda_min) + step * i));
  return grid;
}

}  // namespace sparsegd::ridge
