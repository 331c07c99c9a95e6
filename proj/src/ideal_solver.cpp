#include "lrgan/ideal_solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lrgan/random.hpp"

namespace lrgan {

namespace {

// Ratios below this are evaluated at the floor so log-type transforms stay finite.
constexpr double kRatioFloor = 1e-12;

double transformed(const LossPair& loss, double r) {
  return clamp_interior(loss.range, loss.omega.forward(std::max(r, kRatioFloor)));
}

}  // namespace

void DiscreteDensity::validate() const {
  if (support.rows() != mass.size())
    throw std::invalid_argument("DiscreteDensity: support and mass lengths differ");
  if (mass.size() == 0) throw std::invalid_argument("DiscreteDensity: empty support");
  if ((mass.array() < 0.0).any()) throw std::invalid_argument("DiscreteDensity: negative mass");
  if (std::abs(mass.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("DiscreteDensity: masses do not sum to 1");
  std::set<std::vector<double>> seen;
  for (Eigen::Index i = 0; i < support.rows(); ++i) {
    std::vector<double> p;
    for (Eigen::Index k = 0; k < support.cols(); ++k) p.push_back(support(i, k));
    if (!seen.insert(p).second) throw std::invalid_argument("DiscreteDensity: repeated support point");
  }
}

DiscreteDensity DiscreteDensity::uniform(Eigen::Index n) {
  DiscreteDensity d;
  d.support = Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
  d.mass = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return d;
}

double constraint_residual(const RatioField& r, const DiscreteDensity& f) {
  return r.values.dot(f.mass) - 1.0;
}

bool is_feasible(const RatioField& r, const DiscreteDensity& f, double tol) {
  return r.values.size() == f.size() && (r.values.array() >= 0.0).all() &&
         std::abs(constraint_residual(r, f)) <= tol;
}

std::string step_metric_name(StepMetric m) {
  return m == StepMetric::DensityWeighted ? "density" : "euclidean";
}

StepMetric step_metric_from_name(const std::string& name) {
  if (name == "density") return StepMetric::DensityWeighted;
  if (name == "euclidean") return StepMetric::Euclidean;
  throw std::invalid_argument("unknown step metric '" + name + "' (expected density or euclidean)");
}

double minmax_value(const LossPair& loss, const RatioField& r, const DiscreteDensity& f) {
  if (r.values.size() != f.size()) throw std::invalid_argument("minmax_value: length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double d = transformed(loss, r.values[i]);
    total += f.mass[i] * (phi_value(loss, d) + r.values[i] * psi_value(loss, d));
  }
  return total;
}

double normalized_objective(const LossPair& loss, const RatioField& r, const DiscreteDensity& f) {
  const double shift = loss.psi_normalized ? 0.0 : psi_value(loss, loss.omega.at_one());
  return minmax_value(loss, r, f) - shift * r.values.dot(f.mass);
}

Eigen::VectorXd project_feasible(const Eigen::VectorXd& y, const Eigen::VectorXd& f,
                                 StepMetric metric) {
  // Shift direction u with <u, f> = 1 in the chosen metric's sense.
  const Eigen::VectorXd u = metric == StepMetric::DensityWeighted
                                ? Eigen::VectorXd::Constant(f.size(), 1.0 / f.sum())
                                : Eigen::VectorXd(f / f.squaredNorm());
  const auto shift = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v + u * (1.0 - v.dot(f));
  };
  Eigen::VectorXd x = shift(y);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(y.size());
  for (int it = 0; it < kProjectionMaxIters; ++it) {
    if (x.minCoeff() >= -kProjectionResidual) break;
    const Eigen::VectorXd clipped = (x + p).cwiseMax(0.0);
    p = x + p - clipped;
    x = shift(clipped);
  }
  return x.cwiseMax(0.0);
}

RatioField random_feasible_field(const DiscreteDensity& f, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(f.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::abs(rng.normal());
  v /= v.dot(f.mass);
  return {v};
}

SolveResult solve_minmax_grid(const LossPair& loss, const DiscreteDensity& f,
                              const RatioField& r_init, const SolverOptions& options) {
  if (!loss.ratio_invertible) throw RatioNotRecoverable(loss.name);
  f.validate();
  if (!is_feasible(r_init, f)) throw std::invalid_argument("solve_minmax_grid: r_init is not feasible");
  if (options.step < 0.0 || options.tol <= 0.0 || options.max_iters < 0)
    throw std::invalid_argument("solve_minmax_grid: invalid options");

  const double fmax = f.mass.maxCoeff();
  double step = options.step > 0.0 ? options.step : 0.1 / fmax;
  const double psi_one = psi_value(loss, loss.omega.at_one());
  const auto gradient = [&](const Eigen::VectorXd& r) {
    Eigen::VectorXd g(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) g[i] = psi_value(loss, transformed(loss, r[i])) - psi_one;
    if (options.metric == StepMetric::DensityWeighted) return Eigen::VectorXd(g * fmax);
    return Eigen::VectorXd(g.cwiseProduct(f.mass));
  };
  const auto objective = [&](const Eigen::VectorXd& r) { return normalized_objective(loss, {r}, f); };
  const auto record = [&](long it, const Eigen::VectorXd& r, double obj) {
    return TraceRecord{it, obj, (r.array() - 1.0).abs().maxCoeff(), r.dot(f.mass) - 1.0};
  };

  SolveResult result;
  Eigen::VectorXd r = r_init.values;
  double obj = objective(r);
  result.trace.push_back(record(0, r, obj));
  int increases = 0;
  for (long it = 1; it <= options.max_iters; ++it) {
    const Eigen::VectorXd g = gradient(r);
    if (g.lpNorm<Eigen::Infinity>() == 0.0) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd next;
    double next_obj = 0;
    for (int h = 0;; ++h) {
      next = project_feasible(r - step * g, f.mass, options.metric);
      next_obj = objective(next);
      if (next_obj <= obj || h >= options.max_halvings) break;
      step *= 0.5;
    }
    increases = next_obj > obj ? increases + 1 : 0;
    const double change = (next - r).lpNorm<Eigen::Infinity>();
    r = std::move(next);
    obj = next_obj;
    result.iterations = it;
    if (it % options.log_every == 0) result.trace.push_back(record(it, r, obj));
    if (increases >= options.divergence_patience)
      throw SolverDiverged("diverged: objective increased for " + std::to_string(increases) +
                               " consecutive iterations",
                           result.trace);
    if (change < options.tol) {
      result.converged = true;
      break;
    }
  }
  if (result.trace.back().iteration != result.iterations) result.trace.push_back(record(result.iterations, r, obj));
  result.field.values = r;
  return result;
}

Window Window::interval(double lo, double hi) {
  Window w;
  w.lower = Eigen::VectorXd::Constant(1, lo);
  w.upper = Eigen::VectorXd::Constant(1, hi);
  return w;
}

Window Window::box(double x0, double x1, double y0, double y1) {
  Window w;
  w.lower = Eigen::Vector2d(x0, y0);
  w.upper = Eigen::Vector2d(x1, y1);
  return w;
}

DiscreteDensity discretize(const DensitySpec& spec, int n_points, const Window& window) {
  const Eigen::Index d = spec.dimension();
  if (d != 1 && d != 2) throw SpecError("discretize: only 1D and 2D densities are supported");
  if (n_points < 2) throw SpecError("discretize: n_points must be >= 2");
  if (window.lower.size() != d || window.upper.size() != d)
    throw SpecError("discretize: window dimension does not match the density");
  if (((window.upper - window.lower).array() <= 0.0).any())
    throw SpecError("discretize: window must have positive volume");

  const Eigen::VectorXd width = (window.upper - window.lower) / n_points;
  const Eigen::Index cells = d == 1 ? n_points : static_cast<Eigen::Index>(n_points) * n_points;
  DiscreteDensity out;
  out.support.resize(cells, d);
  out.mass.resize(cells);
  const double volume = width.prod();
  Eigen::VectorXd x(d);
  for (Eigen::Index c = 0; c < cells; ++c) {
    const Eigen::Index i = c % n_points;
    x[0] = window.lower[0] + (static_cast<double>(i) + 0.5) * width[0];
    if (d == 2) x[1] = window.lower[1] + (static_cast<double>(c / n_points) + 0.5) * width[1];
    out.support.row(c) = x.transpose();
    out.mass[c] = pdf(spec, x) * volume;
  }
  const double captured = out.mass.sum();
  if (!(captured >= 0.5))
    throw SpecError("discretize: window captures only " + format_double(captured) + " of the mass");
  if (captured < 0.99)
    out.warnings.push_back("window captures only " + format_double(captured) + " of the mass");
  out.mass /= captured;
  return out;
}

std::string format_trace(const SolveTrace& trace) {
  std::ostringstream out;
  out << "iteration\tobjective\tlinf_to_one\tconstraint_residual\n";
  for (const auto& t : trace)
    out << t.iteration << '\t' << format_double(t.objective) << '\t' << format_double(t.linf_to_one)
        << '\t' << format_double(t.constraint_residual) << '\n';
  return out.str();
}

std::string format_field(const DiscreteDensity& f, const RatioField& r) {
  std::ostringstream out;
  out << (f.dim() == 1 ? "x" : "x\ty") << "\tmass\tr\n";
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    for (Eigen::Index k = 0; k < f.dim(); ++k) out << format_double(f.support(i, k)) << '\t';
    out << format_double(f.mass[i]) << '\t' << format_double(r.values[i]) << '\n';
  }
  return out.str();
}

}  // namespace lrgan
