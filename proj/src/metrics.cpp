#include "lrgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrgan/random.hpp"

namespace lrgan {

double median_heuristic_bandwidth(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const Eigen::Index nx = std::min(x.rows(), kMedianHeuristicRows);
  const Eigen::Index ny = std::min(y.rows(), kMedianHeuristicRows);
  Eigen::MatrixXd pool(nx + ny, x.cols());
  pool << x.topRows(nx), y.topRows(ny);
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(pool.rows() * (pool.rows() - 1) / 2));
  for (Eigen::Index i = 0; i < pool.rows(); ++i)
    for (Eigen::Index j = i + 1; j < pool.rows(); ++j)
      dist.push_back((pool.row(i) - pool.row(j)).norm());
  if (dist.empty()) return 0.0;
  auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  return *mid;
}

namespace {

// Sum of k over all (i, j) pairs, optionally skipping i == j.
double kernel_sum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double inv_two_h2,
                  bool skip_diagonal) {
  const Eigen::VectorXd na = a.rowwise().squaredNorm();
  const Eigen::VectorXd nb = b.rowwise().squaredNorm();
  Eigen::ArrayXXd d2 = (-2.0 * (a * b.transpose())).array();
  d2.colwise() += na.array();
  d2.rowwise() += nb.transpose().array();
  double total = (-inv_two_h2 * d2.max(0.0)).exp().sum();
  if (skip_diagonal) total -= static_cast<double>(std::min(a.rows(), b.rows()));
  return total;
}

}  // namespace

double mmd_rbf(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Bandwidth bandwidth) {
  if (x.rows() < 2 || y.rows() < 2) throw std::invalid_argument("mmd_rbf: need >= 2 samples each");
  if (x.cols() != y.cols()) throw std::invalid_argument("mmd_rbf: dimension mismatch");
  const double h = bandwidth ? *bandwidth : median_heuristic_bandwidth(x, y);
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("mmd_rbf: degenerate bandwidth");
  const double inv = 1.0 / (2.0 * h * h);
  const double m = static_cast<double>(x.rows());
  const double n = static_cast<double>(y.rows());
  const double kxx = kernel_sum(x, x, inv, true) / (m * (m - 1.0));
  const double kyy = kernel_sum(y, y, inv, true) / (n * (n - 1.0));
  const double kxy = kernel_sum(x, y, inv, false) / (m * n);
  return kxx + kyy - 2.0 * kxy;
}

double wasserstein1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1d: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() == b.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s / static_cast<double>(a.size()));
  }
  // Integrate the squared quantile difference over the merged breakpoints.
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double t = 0.0, s = 0.0;
  while (i < a.size() && j < b.size()) {
    const double ta = static_cast<double>(i + 1) / na;
    const double tb = static_cast<double>(j + 1) / nb;
    const double next = std::min(ta, tb);
    s += (next - t) * (a[i] - b[j]) * (a[i] - b[j]);
    t = next;
    if (ta <= next) ++i;
    if (tb <= next) ++j;
  }
  return std::sqrt(s);
}

double sliced_wasserstein(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int projections,
                          std::uint64_t seed) {
  if (x.cols() != y.cols()) throw std::invalid_argument("sliced_wasserstein: arity mismatch");
  if (projections < 1) throw std::invalid_argument("sliced_wasserstein: need >= 1 projection");
  Rng rng(seed);
  const Eigen::Index d = x.cols();
  double total = 0.0;
  Eigen::VectorXd dir(d);
  for (int p = 0; p < projections; ++p) {
    do {
      for (Eigen::Index k = 0; k < d; ++k) dir[k] = rng.normal();
    } while (dir.norm() == 0.0);
    dir.normalize();
    const Eigen::VectorXd px = x * dir;
    const Eigen::VectorXd py = y * dir;
    total += wasserstein1d(std::vector<double>(px.data(), px.data() + px.size()),
                           std::vector<double>(py.data(), py.data() + py.size()));
  }
  return total / projections;
}

Eigen::VectorXd nearest_mode_shares(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& centres) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(centres.rows());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    Eigen::Index best = 0;
    (centres.rowwise() - samples.row(i)).rowwise().squaredNorm().minCoeff(&best);
    counts[best] += 1.0;
  }
  return counts / static_cast<double>(std::max<Eigen::Index>(samples.rows(), 1));
}

}  // namespace lrgan
