#pragma once

// The ideal min-max problem over likelihood-ratio fields on a discretised
// support: the inner maximiser is taken exactly, and the ratio field is moved
// by projected gradient descent onto {r >= 0, sum r_i f_i = 1}.

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrgan/loss_family.hpp"
#include "lrgan/synth_data.hpp"

namespace lrgan {

struct DiscreteDensity {
  Eigen::MatrixXd support;  // one point per row, 1 or 2 columns
  Eigen::VectorXd mass;
  std::vector<std::string> warnings;

  Eigen::Index size() const { return mass.size(); }
  Eigen::Index dim() const { return support.cols(); }
  /// Throws std::invalid_argument when masses are negative, do not sum to 1
  /// within 1e-12, or support points repeat.
  void validate() const;

  static DiscreteDensity uniform(Eigen::Index n);  // support 0..n-1 on a line
};

struct RatioField {
  Eigen::VectorXd values;
};

/// Sum of r_i f_i minus one.
double constraint_residual(const RatioField& r, const DiscreteDensity& f);
bool is_feasible(const RatioField& r, const DiscreteDensity& f, double tol = 1e-8);

struct TraceRecord {
  long iteration = 0;
  double objective = 0;
  double linf_to_one = 0;
  double constraint_residual = 0;
};
using SolveTrace = std::vector<TraceRecord>;

/// How the gradient step is measured. Euclidean steps by f_i psi~(omega(r_i))
/// and restores the constraint by shifting along f. DensityWeighted is the
/// steepest descent in the inner product sum f_i u_i v_i: every point moves by
/// psi~(omega(r_i)) and the constraint is restored by a constant shift. Both
/// agree when f is uniform.
enum class StepMetric { DensityWeighted, Euclidean };

std::string step_metric_name(StepMetric m);
StepMetric step_metric_from_name(const std::string& name);

struct SolverOptions {
  double step = 0;  // 0 selects 0.1 / max_i f_i
  long max_iters = 100000;
  double tol = 1e-10;  // on the sup-norm change of r between iterations
  StepMetric metric = StepMetric::DensityWeighted;
  int max_halvings = 30;
  int divergence_patience = 50;
  long log_every = 1;
};

struct SolveResult {
  RatioField field;
  SolveTrace trace;
  bool converged = false;
  long iterations = 0;
};

class SolverDiverged : public std::runtime_error {
 public:
  SolverDiverged(const std::string& what, SolveTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const SolveTrace& trace() const { return trace_; }

 private:
  SolveTrace trace_;
};

SolveResult solve_minmax_grid(const LossPair& loss, const DiscreteDensity& f,
                              const RatioField& r_init, const SolverOptions& options = {});

/// sum_i f_i [phi(omega(r_i)) + r_i psi(omega(r_i))] with the raw psi.
double minmax_value(const LossPair& loss, const RatioField& r, const DiscreteDensity& f);

/// The same sum with psi~ = psi - psi(omega(1)); this is what the solver descends.
double normalized_objective(const LossPair& loss, const RatioField& r, const DiscreteDensity& f);

inline constexpr double kProjectionResidual = 1e-10;
inline constexpr int kProjectionMaxIters = 1000;

/// Projection of y onto {r >= 0, sum r_i f_i = 1} by Dykstra's alternating
/// clip and shift, in the metric selected by `metric`.
Eigen::VectorXd project_feasible(const Eigen::VectorXd& y, const Eigen::VectorXd& f,
                                 StepMetric metric = StepMetric::DensityWeighted);

/// |z_i| for standard normal draws z_i, rescaled to be feasible.
RatioField random_feasible_field(const DiscreteDensity& f, std::uint64_t seed);

struct Window {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Window interval(double lo, double hi);
  static Window box(double x0, double x1, double y0, double y1);
};

/// Cell-centre discretisation on n_points per axis (n_points^2 cells in 2D),
/// masses renormalised to 1. Warns when the captured mass is below 0.99 and
/// throws SpecError below 0.5.
DiscreteDensity discretize(const DensitySpec& spec, int n_points, const Window& window);

/// Tab-separated: iteration, objective, linf_to_one, constraint_residual.
std::string format_trace(const SolveTrace& trace);
/// Tab-separated: support coordinates, mass, r.
std::string format_field(const DiscreteDensity& f, const RatioField& r);

}  // namespace lrgan
