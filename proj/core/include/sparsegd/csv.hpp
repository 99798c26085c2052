#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace sparsegd::csv {

// Shortest round-trip decimal form, '.' separator, locale independent.
// Emitting via std::to_chars keeps repeated runs byte-identical.
std::string format_double(double x);

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v);

Eigen::MatrixXd read_matrix(const std::filesystem::path& path);
Eigen::VectorXd read_vector(const std::filesystem::path& path);

}  // namespace sparsegd::csv
