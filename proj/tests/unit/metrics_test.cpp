#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lrgan/metrics.hpp"
#include "lrgan/synth_data.hpp"

using namespace lrgan;

namespace {

// Unbiased MMD^2 by explicit double loops.
double mmd_loops(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double h) {
  const auto k = [h](const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
    return std::exp(-(a - b).squaredNorm() / (2 * h * h));
  };
  const double n = static_cast<double>(x.rows()), m = static_cast<double>(y.rows());
  double xx = 0, yy = 0, xy = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.rows(); ++j)
      if (i != j) xx += k(x.row(i), x.row(j));
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < y.rows(); ++j)
      if (i != j) yy += k(y.row(i), y.row(j));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < y.rows(); ++j) xy += k(x.row(i), y.row(j));
  return xx / (n * (n - 1)) + yy / (m * (m - 1)) - 2 * xy / (n * m);
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("MMD of identical sets vanishes") {
  const Eigen::MatrixXd x = sample(DensitySpec::standard_normal(2), 300, 1);
  CHECK(mmd_rbf(x, x, 1.0) <= 1e-12);
  CHECK(mmd_rbf(x, x, std::nullopt) <= 1e-12);
}

TEST_CASE("MMD matches the direct double sum") {
  const Eigen::MatrixXd x = sample(DensitySpec::standard_normal(2), 60, 2);
  const Eigen::MatrixXd y = sample(DensitySpec::normal(0.5, 1.5), 45, 3);
  Eigen::MatrixXd yy(45, 2);
  yy << y, y.reverse();
  CHECK(mmd_rbf(x, yy, 0.8) == doctest::Approx(mmd_loops(x, yy, 0.8)).epsilon(1e-10));
}

TEST_CASE("MMD null and separated regimes") {
  const DensitySpec g = DensitySpec::normal(0, 1);
  CHECK(std::abs(mmd_rbf(sample(g, 1000, 10), sample(g, 1000, 11), std::nullopt)) <= 0.01);
  CHECK(mmd_rbf(sample(g, 1000, 12), sample(DensitySpec::normal(5, 1), 1000, 13), 1.0) >= 0.5);
  CHECK_THROWS(mmd_rbf(sample(g, 10, 1), sample(g, 10, 2), -1.0));
}

TEST_CASE("median heuristic") {
  Eigen::MatrixXd x(2, 1), y(1, 1);
  x << 0, 1;
  y << 3;
  CHECK(median_heuristic_bandwidth(x, y) == doctest::Approx(2.0));
}

TEST_CASE("one-dimensional Wasserstein") {
  const Eigen::MatrixXd x = sample(DensitySpec::normal(0, 1), 500, 5);
  std::vector<double> a(x.data(), x.data() + x.size());
  CHECK(wasserstein1d(a, a) == 0.0);
  std::vector<double> b = a;
  for (double& v : b) v += 1.25;
  CHECK(wasserstein1d(a, b) == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(wasserstein1d({0.0, 1.0}, {1.0, 0.0}) == 0.0);
}

TEST_CASE("sliced Wasserstein of shifted Gaussians") {
  const Eigen::MatrixXd x = sample(DensitySpec::standard_normal(2), 10000, 21);
  Eigen::MatrixXd y = sample(DensitySpec::standard_normal(2), 10000, 22);
  y.col(0).array() += 3.0;
  // Projected laws are N(0,1) and N(3 cos t, 1), so W2 = 3 |cos t| with mean 6 / pi.
  const double analytic = 6.0 / std::numbers::pi;
  CHECK(sliced_wasserstein(x, y, 64, 7) == doctest::Approx(analytic).epsilon(0.15));
  CHECK(sliced_wasserstein(x, x, 64, 7) == 0.0);
  CHECK(sliced_wasserstein(x, y, 64, 7) == sliced_wasserstein(x, y, 64, 7));
}

TEST_CASE("nearest mode shares") {
  Eigen::MatrixXd centres(2, 2);
  centres << 0, 0, 10, 0;
  Eigen::MatrixXd pts(4, 2);
  pts << 1, 0, 9, 1, 11, 0, 2, 2;
  const Eigen::VectorXd s = nearest_mode_shares(pts, centres);
  CHECK(s[0] == 0.5);
  CHECK(s[1] == 0.5);
}

}
