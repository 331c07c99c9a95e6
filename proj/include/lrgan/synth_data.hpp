#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lrgan {

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct MixtureComponent {
  double weight;
  Gaussian component;
};

struct Mixture {
  std::vector<MixtureComponent> components;
};

/// Equal-weight mixture of `modes` isotropic 2D Gaussians placed at angles
/// 2 pi j / modes on a circle of the given radius.
struct Ring {
  int modes;
  double radius;
  double sigma;
};

struct UniformBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

class DensitySpec {
 public:
  using Variant = std::variant<Gaussian, Mixture, Ring, UniformBox>;

  DensitySpec(Variant v);  // validates

  static DensitySpec normal(double mean, double sigma);
  static DensitySpec standard_normal(int dim);

  const Variant& variant() const { return v_; }
  int dimension() const { return dim_; }

  /// The mixture view of a ring (and of a single Gaussian); throws for uniform boxes.
  Mixture as_mixture() const;
  /// Centres of the ring modes (modes x 2); throws for non-ring specs.
  Eigen::MatrixXd ring_centres() const;

 private:
  Variant v_;
  int dim_ = 1;
};

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// n i.i.d. draws, one per row. Gaussians use x = mean + L z with L the Cholesky
/// factor and z from Rng::normal(); mixtures draw the component by inverse-CDF on
/// one uniform, then the Gaussian.
Eigen::MatrixXd sample(const DensitySpec& spec, std::size_t n, std::uint64_t seed);

double pdf(const DensitySpec& spec, const Eigen::VectorXd& x);
double log_pdf(const DensitySpec& spec, const Eigen::VectorXd& x);

class UndefinedRatio : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// log g(x) - log f(x). Throws UndefinedRatio where f vanishes; returns -inf where
/// only g vanishes.
double true_log_ratio(const DensitySpec& f, const DensitySpec& g, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// Sample files: headerless CSV, one sample per line.

class DataError : public std::runtime_error {
 public:
  enum class Kind { Io, Empty, Ragged, NonNumeric };
  DataError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

Eigen::MatrixXd load_samples(const std::filesystem::path& path);
Eigen::MatrixXd parse_samples(const std::string& text);
/// Shortest round-trip decimal form of every value.
std::string format_samples(const Eigen::MatrixXd& samples);
void write_samples(const std::filesystem::path& path, const Eigen::MatrixXd& samples);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace lrgan
