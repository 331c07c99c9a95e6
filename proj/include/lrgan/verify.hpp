#pragma once

// Numerical certification of the inner maximiser, the outer minimiser at r = 1,
// the min-max value and the derivative recipe for a loss pair.

#include <string>
#include <vector>

#include "lrgan/loss_family.hpp"

namespace lrgan {

struct Check {
  std::string name;
  double probe = 0;
  double expected = 0;
  double observed = 0;
  double abs_error = 0;
  double tolerance = 0;
  bool pass = false;
};

struct VerificationReport {
  std::string loss_name;
  std::vector<Check> checks;
  bool passed = true;
  bool skipped = false;
  std::string skip_reason;

  /// Records a check whose error is `error` (relative or absolute, caller's choice).
  void add(std::string name, double probe, double expected, double observed, double error,
           double tolerance);
  void merge(const VerificationReport& other);
};

struct VerifyTolerances {
  double argmax = 1e-4;
  double minimizer = 1e-3;
  double value = 1e-6;
  double derivative = 1e-5;
  double envelope = 1e-5;
};

/// Samples used by the inner scan and the outer grid.
inline constexpr int kInnerGridPoints = 1024;
inline constexpr double kInnerRefineWidth = 1e-8;
inline constexpr double kUnboundedProbe = 30.0;
inline constexpr int kOuterGridPoints = 601;

struct InnerArgmax {
  double argmax = 0;  // +-inf when the maximum escapes the probe window
  bool at_infinity = false;
  int direction = 0;  // +1 or -1 when at_infinity
};

/// Maximiser of phi(D) + r psi(D) over the interior of the loss range by grid
/// scan followed by golden-section refinement.
InnerArgmax inner_argmax(const LossPair& loss, double r);

/// Probe window [lo, hi] used by inner_argmax.
std::pair<double, double> inner_window(const RangeInterval& range);

/// phi(omega(r)) + r psi~(omega(r)) with psi normalised at omega(1).
/// Throws RatioNotRecoverable for limit losses and std::invalid_argument for r < 0.
double concentrated_objective(const LossPair& loss, double r);

/// Argmax accuracy on `r_grid`, minimiser at r = 1 and minimum value phi(omega(1)).
VerificationReport check_theorem1(const LossPair& loss, const std::vector<double>& r_grid,
                                  const VerifyTolerances& tol = {});

/// max_D phi(D) + psi(D) against phi(omega(1)) + psi(omega(1)), unnormalised.
VerificationReport check_corollary_value(const LossPair& loss, double tol = 1e-6);

/// Central differences of the closed forms against phi_prime, psi_prime.
VerificationReport check_derivatives(const LossPair& loss, int n_points, double tol = 1e-5);

/// d/dr of the concentrated objective against psi~(omega(r)) on [0.2, 5], and
/// strict monotonicity of psi~(omega(r)) on the outer grid.
VerificationReport check_envelope(const LossPair& loss, double tol = 1e-5);

/// Points where the derivatives are discontinuous (hinge corners).
std::vector<double> derivative_kinks(const LossPair& loss);

/// Every applicable check for one loss.
VerificationReport verify_loss(const LossPair& loss, const VerifyTolerances& tol = {},
                               int derivative_points = 100);

std::vector<double> default_ratio_grid();  // {0.1, 0.5, 1, 2, 10}

std::string format_report_table(const std::vector<VerificationReport>& reports);
/// One JSON object per check, newline separated.
std::string format_report_jsonl(const std::vector<VerificationReport>& reports);

}  // namespace lrgan
