#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "lrgan/metrics.hpp"
#include "lrgan/random.hpp"
#include "lrgan/synth_data.hpp"

using namespace lrgan;

namespace {

Gaussian gauss1(double mean, double var) {
  return {Eigen::VectorXd::Constant(1, mean), Eigen::MatrixXd::Constant(1, 1, var)};
}

DensitySpec two_bumps() {
  return DensitySpec(Mixture{{{0.5, gauss1(-2, 1)}, {0.5, gauss1(2, 1)}}});
}

Eigen::VectorXd at(double x) { return Eigen::VectorXd::Constant(1, x); }

std::string expect_data_error(const std::string& text, DataError::Kind kind) {
  try {
    parse_samples(text);
  } catch (const DataError& e) {
    CHECK(e.kind() == kind);
    return e.what();
  }
  FAIL("expected DataError");
  return {};
}

}  // namespace

TEST_SUITE("synth_data") {

TEST_CASE("random stream is pinned") {
  Rng a(123), b(123);
  for (int i = 0; i < 10; ++i) CHECK(a.bits() == b.bits());
  std::mt19937_64 reference(5);
  Rng c(5);
  const std::uint64_t raw = reference();
  CHECK(c.uniform() == static_cast<double>(raw >> 11) * 0x1.0p-53);
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("standard 2D Gaussian sample moments") {
  const Eigen::MatrixXd x = sample(DensitySpec::standard_normal(2), 100000, 2024);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  CHECK(std::abs(mean[0]) < 0.02);
  CHECK(std::abs(mean[1]) < 0.02);
  const Eigen::MatrixXd centred = x.rowwise() - mean;
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(x.rows() - 1);
  CHECK((cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("sampling is deterministic and seed dependent") {
  const DensitySpec ring(Ring{8, 2.0, 0.02});
  CHECK(sample(ring, 50, 7) == sample(ring, 50, 7));
  CHECK(sample(ring, 50, 7) != sample(ring, 50, 8));
}

TEST_CASE("uniform box samples stay inside") {
  const DensitySpec box(UniformBox{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)});
  const Eigen::MatrixXd x = sample(box, 5000, 3);
  CHECK(x.minCoeff() >= 0.0);
  CHECK(x.maxCoeff() < 1.0);
}

TEST_CASE("ring modes are evenly populated") {
  const DensitySpec ring(Ring{8, 2.0, 0.02});
  const Eigen::MatrixXd centres = ring.ring_centres();
  CHECK(centres.rows() == 8);
  CHECK(centres.row(0).norm() == doctest::Approx(2.0));
  CHECK(centres(2, 1) == doctest::Approx(2.0));
  const Eigen::VectorXd shares = nearest_mode_shares(sample(ring, 8000, 11), centres);
  CHECK(shares.sum() == doctest::Approx(1.0));
  CHECK(shares.minCoeff() >= 0.08);
  CHECK(shares.maxCoeff() <= 0.17);
}

TEST_CASE("density values") {
  CHECK(pdf(DensitySpec::normal(0, 1), at(0)) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)));
  const DensitySpec unit(UniformBox{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)});
  CHECK(pdf(unit, at(0.5)) == 1.0);
  CHECK(pdf(unit, at(1.5)) == 0.0);
  CHECK(std::isinf(log_pdf(unit, at(1.5))));
  CHECK(pdf(two_bumps(), at(0)) ==
        doctest::Approx(std::exp(-2.0) / std::sqrt(2 * std::numbers::pi)).epsilon(1e-12));

  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.5, 0.5, 1.0;
  const DensitySpec g(Gaussian{Eigen::VectorXd::Zero(2), cov});
  Eigen::VectorXd x(2);
  x << 0.3, -0.7;
  const double quad = x.dot(cov.inverse() * x);
  CHECK(pdf(g, x) == doctest::Approx(std::exp(-0.5 * quad) /
                                     (2 * std::numbers::pi * std::sqrt(cov.determinant()))));

  const DensitySpec ring(Ring{4, 1.0, 0.5});
  const Mixture m = ring.as_mixture();
  CHECK(m.components.size() == 4);
  CHECK(m.components[0].weight == doctest::Approx(0.25));
  CHECK_THROWS_AS(unit.as_mixture(), SpecError);
}

TEST_CASE("true log ratio") {
  for (double x : {-3.0, 0.0, 2.5}) {
    CHECK(true_log_ratio(two_bumps(), two_bumps(), at(x)) == doctest::Approx(0.0));
    const double mu = 1.7;
    CHECK(true_log_ratio(DensitySpec::normal(0, 1), DensitySpec::normal(mu, 1), at(x)) ==
          doctest::Approx(mu * x - mu * mu / 2));
  }
  CHECK(true_log_ratio(DensitySpec::normal(0, 1), DensitySpec::normal(0, 3), at(0)) ==
        doctest::Approx(-std::log(3.0)));
  const DensitySpec unit(UniformBox{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)});
  CHECK_THROWS_AS(true_log_ratio(unit, DensitySpec::normal(0, 1), at(2.0)), UndefinedRatio);
  CHECK(std::isinf(true_log_ratio(DensitySpec::normal(0, 1), unit, at(2.0))));
}

TEST_CASE("invalid specs") {
  CHECK_THROWS_AS(DensitySpec(Gaussian{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, -1)}),
                  SpecError);
  CHECK_THROWS_AS(DensitySpec(Mixture{{{0.3, gauss1(0, 1)}, {0.3, gauss1(1, 1)}}}), SpecError);
  CHECK_THROWS_AS(DensitySpec(Ring{0, 1.0, 0.1}), SpecError);
  CHECK_THROWS_AS(DensitySpec(UniformBox{Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1)}),
                  SpecError);
  CHECK_THROWS_AS(pdf(DensitySpec::normal(0, 1), Eigen::VectorXd::Zero(2)), SpecError);
}

TEST_CASE("sample files") {
  const Eigen::MatrixXd m = parse_samples("1,2\n3,4\n");
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 2, 3, 4;
  CHECK(m == expected);
  CHECK(std::string(expect_data_error("", DataError::Kind::Empty)) == "empty dataset");
  CHECK(expect_data_error("1,2\n3\n", DataError::Kind::Ragged).find("line 2") != std::string::npos);
  CHECK(expect_data_error("1,x\n", DataError::Kind::NonNumeric).find("line 1") != std::string::npos);
  CHECK_THROWS_AS(load_samples("/nonexistent/samples.csv"), DataError);

  const Eigen::MatrixXd x = sample(DensitySpec::standard_normal(2), 25, 4);
  const auto path = std::filesystem::temp_directory_path() / "lrgan_samples_roundtrip.csv";
  write_samples(path, x);
  CHECK(load_samples(path) == x);
  std::filesystem::remove(path);
  CHECK(parse_samples(format_samples(x)) == x);
}

TEST_CASE("shortest round-trip decimals") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(4.0) == "4");
  CHECK(format_double(-2.5e-7) == "-2.5e-07");
  for (double v : {1.0 / 3.0, 1e300, -7.123456789012345e-5}) CHECK(std::stod(format_double(v)) == v);
}

}
