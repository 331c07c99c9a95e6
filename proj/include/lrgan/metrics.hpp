#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace lrgan {

/// Gaussian kernel bandwidth: a fixed positive value, or nullopt for the median
/// heuristic (median pairwise distance of the pooled sample).
using Bandwidth = std::optional<double>;

/// Points used for the median heuristic: at most this many leading rows of each set.
inline constexpr Eigen::Index kMedianHeuristicRows = 500;

double median_heuristic_bandwidth(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Unbiased MMD^2 with k(a, b) = exp(-|a - b|^2 / (2 h^2)).
double mmd_rbf(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Bandwidth bandwidth);

/// 2-Wasserstein distance between the empirical laws of two 1D samples.
double wasserstein1d(std::vector<double> a, std::vector<double> b);

/// Mean over `projections` seeded random unit directions of the 1D 2-Wasserstein
/// distance between the projected samples.
double sliced_wasserstein(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int projections,
                          std::uint64_t seed);

/// Fraction of samples whose nearest centre is each row of `centres`.
Eigen::VectorXd nearest_mode_shares(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& centres);

}  // namespace lrgan
