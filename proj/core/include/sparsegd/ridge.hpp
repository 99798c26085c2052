#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace sparsegd::ridge {

// Ridge regression argmin_w (1/n)||Xw - y||^2 + lambda ||w||^2, solved through
// the normal equations (X^T X / n + lambda I) w = X^T y / n.
Eigen::VectorXd ridge_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda);

struct RidgeFit {
  Eigen::VectorXd weights;
  double lambda = 0.0;
  std::vector<double> cv_scores;  // mean validation MSE per grid entry
};

// k-fold cross validation over the grid: contiguous blocks of a seeded
// shuffle, smallest lambda wins ties, final refit on all data.
RidgeFit ridge_cv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  const std::vector<double>& lambda_grid, int folds, std::uint64_t seed);

std::vector<double> log_spaced_grid(double lambda_min, double lambda_max, int count);

}  // namespace sparsegd::ridge
