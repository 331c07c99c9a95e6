#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lrgan/ideal_solver.hpp"
#include "lrgan/random.hpp"
#include "lrgan/verify.hpp"

using namespace lrgan;

namespace {

const LossPair& loss(const char* name) { return catalogue_lookup(name).loss; }

// Exact projection by bisection on the multiplier: the minimiser is
// max(y - tau w, 0) with w = 1 in the density metric and w = f in the Euclidean one.
Eigen::VectorXd bisect_projection(const Eigen::VectorXd& y, const Eigen::VectorXd& f,
                                  bool density_metric) {
  const Eigen::VectorXd w = density_metric ? Eigen::VectorXd::Ones(y.size()) : f;
  const auto mass = [&](double tau) { return (y - tau * w).cwiseMax(0.0).dot(f); };
  double lo = -1e6, hi = 1e6;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > 1.0 ? lo : hi) = mid;
  }
  return (y - 0.5 * (lo + hi) * w).cwiseMax(0.0);
}

double linf_to_one(const RatioField& r) { return (r.values.array() - 1.0).abs().maxCoeff(); }

}  // namespace

TEST_SUITE("ideal_solver") {

TEST_CASE("balanced field is a fixed point") {
  const DiscreteDensity f = discretize(DensitySpec::normal(0, 1), 64, Window::interval(-5, 5));
  const RatioField ones{Eigen::VectorXd::Ones(f.size())};
  for (const char* name : {"MSE", "CrossEntropy", "B2"}) {
    const SolveResult res = solve_minmax_grid(loss(name), f, ones);
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(linf_to_one(res.field) == 0.0);
  }
}

TEST_CASE("MSE on a uniform support from a random start") {
  const DiscreteDensity f = DiscreteDensity::uniform(64);
  const SolveResult res = solve_minmax_grid(loss("MSE"), f, random_feasible_field(f, 3));
  CHECK(res.converged);
  CHECK(linf_to_one(res.field) <= 1e-3);
  CHECK(std::abs(constraint_residual(res.field, f)) < 1e-9);
  CHECK(minmax_value(loss("MSE"), res.field, f) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(!res.trace.empty());
  CHECK(res.trace.back().objective <= res.trace.front().objective);
}

TEST_CASE("CrossEntropy on a discretised Gaussian from a skewed start") {
  const DiscreteDensity f = discretize(DensitySpec::normal(0, 1), 64, Window::interval(-5, 5));
  Eigen::VectorXd v(f.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = i < v.size() / 2 ? 2.0 : 1.0;
  v /= v.dot(f.mass);
  const LossPair& ce = loss("CrossEntropy");
  const SolveResult res = solve_minmax_grid(ce, f, RatioField{v});
  CHECK(res.converged);
  CHECK(linf_to_one(res.field) <= 1e-3);
  CHECK(normalized_objective(ce, res.field, f) ==
        doctest::Approx(concentrated_objective(ce, 1.0)).epsilon(1e-9));
}

TEST_CASE("Euclidean metric agrees on a uniform support") {
  const DiscreteDensity f = DiscreteDensity::uniform(16);
  SolverOptions opts;
  opts.metric = StepMetric::Euclidean;
  const SolveResult res = solve_minmax_grid(loss("A3"), f, random_feasible_field(f, 9), opts);
  CHECK(res.converged);
  CHECK(linf_to_one(res.field) <= 1e-3);
  CHECK(step_metric_from_name(step_metric_name(StepMetric::Euclidean)) == StepMetric::Euclidean);
  CHECK_THROWS(step_metric_from_name("manhattan"));
}

TEST_CASE("limit losses and infeasible starts are refused") {
  const DiscreteDensity f = DiscreteDensity::uniform(8);
  const RatioField ones{Eigen::VectorXd::Ones(8)};
  CHECK_THROWS_AS(solve_minmax_grid(loss("Wasserstein"), f, ones), RatioNotRecoverable);
  const RatioField bad{Eigen::VectorXd::Constant(8, 2.0)};
  CHECK_THROWS_AS(solve_minmax_grid(loss("MSE"), f, bad), std::invalid_argument);
}

TEST_CASE("min-max value of the balanced field") {
  const DiscreteDensity f = discretize(DensitySpec::normal(1, 2), 40, Window::interval(-9, 11));
  const RatioField ones{Eigen::VectorXd::Ones(f.size())};
  CHECK(minmax_value(loss("MSE"), ones, f) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(minmax_value(loss("CrossEntropy"), ones, f) ==
        doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-12));
  for (const auto& e : catalogue()) {
    if (!e.loss.ratio_invertible) continue;
    const double z = e.loss.omega.at_one();
    CHECK(minmax_value(e.loss, ones, f) == doctest::Approx(e.loss.phi(z) + e.loss.psi(z)));
  }
}

TEST_CASE("projection matches the bisection oracle") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 5 + trial;
    Eigen::VectorXd f(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      f[i] = 0.1 + rng.uniform();
      y[i] = 3.0 * rng.normal();
    }
    f /= f.sum();
    for (bool density : {true, false}) {
      const StepMetric m = density ? StepMetric::DensityWeighted : StepMetric::Euclidean;
      const Eigen::VectorXd p = project_feasible(y, f, m);
      const Eigen::VectorXd q = bisect_projection(y, f, density);
      CHECK((p - q).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(p.minCoeff() >= 0.0);
      CHECK(std::abs(p.dot(f) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("random feasible fields") {
  const DiscreteDensity f = discretize(DensitySpec::normal(0, 1), 32, Window::interval(-4, 4));
  const RatioField a = random_feasible_field(f, 5);
  CHECK(is_feasible(a, f));
  CHECK(random_feasible_field(f, 5).values == a.values);
  CHECK(random_feasible_field(f, 6).values != a.values);
}

TEST_CASE("discretisation") {
  const DiscreteDensity g = discretize(DensitySpec::normal(0, 1), 64, Window::interval(-5, 5));
  CHECK(g.mass.sum() == doctest::Approx(1.0).epsilon(1e-14));
  for (Eigen::Index i = 0; i < 32; ++i) CHECK(std::abs(g.mass[i] - g.mass[63 - i]) < 1e-12);
  CHECK(g.warnings.empty());

  const DiscreteDensity u = discretize(
      DensitySpec(UniformBox{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)}), 10,
      Window::interval(0, 1));
  for (Eigen::Index i = 0; i < 10; ++i) CHECK(u.mass[i] == doctest::Approx(0.1).epsilon(1e-12));

  Gaussian left{Eigen::VectorXd::Constant(1, -2.0), Eigen::MatrixXd::Identity(1, 1)};
  Gaussian right{Eigen::VectorXd::Constant(1, 2.0), Eigen::MatrixXd::Identity(1, 1)};
  const DensitySpec mix(Mixture{{{0.5, left}, {0.5, right}}});
  const DiscreteDensity m = discretize(mix, 128, Window::interval(-8, 8));
  CHECK(m.mass.head(64).sum() == doctest::Approx(0.5).epsilon(1e-6));

  const DiscreteDensity narrow = discretize(DensitySpec::normal(0, 1), 20, Window::interval(-2, 2));
  CHECK(!narrow.warnings.empty());
  CHECK_THROWS_AS(discretize(DensitySpec::normal(0, 1), 20, Window::interval(3, 9)), SpecError);

  const DiscreteDensity ring = discretize(DensitySpec(Ring{8, 2.0, 0.3}), 40,
                                          Window::box(-4, 4, -4, 4));
  CHECK(ring.size() == 1600);
  CHECK(ring.dim() == 2);
  CHECK(ring.mass.sum() == doctest::Approx(1.0));
  CHECK_NOTHROW(ring.validate());
}

TEST_CASE("density validation") {
  DiscreteDensity d = DiscreteDensity::uniform(4);
  CHECK_NOTHROW(d.validate());
  d.mass[0] = -0.1;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d = DiscreteDensity::uniform(4);
  d.mass *= 2.0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d = DiscreteDensity::uniform(4);
  d.support(1, 0) = d.support(0, 0);
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("trace and field formatting") {
  const DiscreteDensity f = DiscreteDensity::uniform(4);
  const SolveResult res = solve_minmax_grid(loss("MSE"), f, random_feasible_field(f, 1));
  const std::string trace = format_trace(res.trace);
  CHECK(trace.rfind("iteration\tobjective\tlinf_to_one\tconstraint_residual\n", 0) == 0);
  const std::string field = format_field(f, res.field);
  CHECK(std::count(field.begin(), field.end(), '\n') >= 4);
}

}
