#include "lrgan/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lrgan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

template <typename F>
double golden_max(const F& f, double a, double b, double width) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > width) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (n - 1));
  return g;
}

// Vertex of the parabola through (x - h, y0), (x, y1), (x + h, y2).
double parabola_vertex(double x, double h, double y0, double y1, double y2) {
  const double curv = y0 - 2.0 * y1 + y2;
  if (!(curv > 0.0)) return x;
  return x + 0.5 * h * (y0 - y2) / curv;
}

double rel_error(double expected, double observed, double floor) {
  return std::abs(observed - expected) / std::max(std::abs(expected), floor);
}

// Interior derivative probes for each range kind.
std::vector<double> derivative_points(const RangeInterval& range, int n) {
  std::vector<double> z(static_cast<std::size_t>(n));
  const auto kind = range.kind();
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
    double v = 0;
    switch (kind.value_or(RangeKind::Real)) {
      case RangeKind::NonNegative: v = std::pow(10.0, -2.0 + 4.0 * t); break;
      case RangeKind::Unit: v = 0.01 + 0.98 * t; break;
      case RangeKind::Real: v = -5.0 + 10.0 * t; break;
      case RangeKind::Symmetric: v = -0.99 + 1.98 * t; break;
    }
    z[static_cast<std::size_t>(i)] = v;
  }
  return z;
}

}  // namespace

void VerificationReport::add(std::string name, double probe, double expected, double observed,
                             double error, double tolerance) {
  Check c{std::move(name), probe, expected, observed, error, tolerance, error <= tolerance};
  passed = passed && c.pass;
  checks.push_back(std::move(c));
}

void VerificationReport::merge(const VerificationReport& other) {
  for (const auto& c : other.checks) {
    checks.push_back(c);
    passed = passed && c.pass;
  }
  if (other.skipped && skip_reason.find(other.skip_reason) == std::string::npos)
    skip_reason += (skip_reason.empty() ? "" : "; ") + other.skip_reason;
}

std::pair<double, double> inner_window(const RangeInterval& range) {
  const double lo = std::isfinite(range.lower) ? range.lower + kBoundaryEps : -kUnboundedProbe;
  const double hi = std::isfinite(range.upper) ? range.upper - kBoundaryEps : kUnboundedProbe;
  return {lo, hi};
}

InnerArgmax inner_argmax(const LossPair& loss, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("inner_argmax: r must be >= 0");
  const auto objective = [&](double d) { return phi_value(loss, d) + r * psi_value(loss, d); };
  const auto [lo, hi] = inner_window(loss.range);
  std::vector<double> grid(kInnerGridPoints), val(kInnerGridPoints);
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / (kInnerGridPoints - 1);
    val[i] = objective(grid[i]);
    if (val[i] > val[best]) best = i;
  }
  const std::size_t last = grid.size() - 1;
  if (best == last && !std::isfinite(loss.range.upper) && val[last] > val[last - 1])
    return {kInf, true, +1};
  if (best == 0 && !std::isfinite(loss.range.lower) && val[0] > val[1]) return {-kInf, true, -1};
  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[std::min(best + 1, last)];
  return {golden_max(objective, a, b, kInnerRefineWidth), false, 0};
}

double concentrated_objective(const LossPair& loss, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("concentrated_objective: r must be >= 0");
  if (!loss.ratio_invertible) throw RatioNotRecoverable(loss.name);
  const double d = loss.omega.forward(r);
  const double shift = loss.psi_normalized ? 0.0 : psi_value(loss, loss.omega.at_one());
  return phi_value(loss, d) + r * (psi_value(loss, d) - shift);
}

std::vector<double> default_ratio_grid() { return {0.1, 0.5, 1.0, 2.0, 10.0}; }

VerificationReport check_theorem1(const LossPair& loss, const std::vector<double>& r_grid,
                                  const VerifyTolerances& tol) {
  VerificationReport rep;
  rep.loss_name = loss.name;
  if (!loss.ratio_invertible) {
    rep.skipped = true;
    rep.skip_reason = "skipped: ratio not recoverable";
    return rep;
  }
  for (double r : r_grid) {
    const auto am = inner_argmax(loss, r);
    const double expect = loss.omega.forward(r);
    const double err = am.at_infinity ? kInf : std::abs(am.argmax - expect);
    rep.add("inner_argmax", r, expect, am.argmax, err, tol.argmax);
  }

  const auto grid = log_grid(1e-3, 1e3, kOuterGridPoints);
  std::size_t best = 0;
  std::vector<double> val(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    val[i] = concentrated_objective(loss, grid[i]);
    if (val[i] < val[best]) best = i;
  }
  const std::size_t nearest_one = static_cast<std::size_t>(
      std::min_element(grid.begin(), grid.end(),
                       [](double a, double b) { return std::abs(std::log(a)) < std::abs(std::log(b)); }) -
      grid.begin());
  rep.add("outer_grid_argmin", static_cast<double>(best), grid[nearest_one], grid[best],
          best == nearest_one ? 0.0 : kInf, 0.0);

  double x = grid[best];
  double h = (best + 1 < grid.size() ? grid[best + 1] : grid[best]) - grid[best];
  for (double next_h : {1e-2, 1e-3, 1e-4}) {
    h = std::min(h, x * 0.5);
    x = parabola_vertex(x, h, concentrated_objective(loss, x - h), concentrated_objective(loss, x),
                        concentrated_objective(loss, x + h));
    h = next_h;
  }
  rep.add("outer_minimizer", 1.0, 1.0, x, std::abs(x - 1.0), tol.minimizer);

  const double expected_value = phi_value(loss, loss.omega.at_one());
  const double observed_value = std::min(val[best], concentrated_objective(loss, x));
  rep.add("outer_min_value", 1.0, expected_value, observed_value,
          std::abs(observed_value - expected_value), tol.value);
  return rep;
}

VerificationReport check_corollary_value(const LossPair& loss, double tol) {
  VerificationReport rep;
  rep.loss_name = loss.name;
  const double w1 = loss.omega.at_one();
  const double expected = phi_value(loss, w1) + psi_value(loss, w1);
  const auto am = inner_argmax(loss, 1.0);
  const double observed =
      am.at_infinity ? kInf : phi_value(loss, am.argmax) + psi_value(loss, am.argmax);
  rep.add("minmax_value", 1.0, expected, observed, std::abs(observed - expected), tol);
  return rep;
}

std::vector<double> derivative_kinks(const LossPair& loss) {
  if (lowercase(loss.name) == "hinge") return {-1.0, 1.0};
  return {};
}

VerificationReport check_derivatives(const LossPair& loss, int n_points, double tol) {
  VerificationReport rep;
  rep.loss_name = loss.name;
  if (!loss.has_closed_forms()) {
    rep.skipped = true;
    rep.skip_reason = "skipped: no closed forms";
    return rep;
  }
  const auto kinks = derivative_kinks(loss);
  const auto fd = [](const ScalarFn& f, double z) {
    const double h = 1e-6 * std::max(1.0, std::abs(z));
    return (f(z + h) - f(z - h)) / (2.0 * h);
  };
  for (double z : derivative_points(loss.range, n_points)) {
    if (std::any_of(kinks.begin(), kinks.end(), [&](double k) { return std::abs(z - k) < 1e-3; }))
      continue;
    const double dphi = loss.phi_prime(z), dpsi = loss.psi_prime(z);
    const double nphi = fd(loss.phi, z), npsi = fd(loss.psi, z);
    rep.add("phi_prime", z, dphi, nphi, rel_error(dphi, nphi, 1e-12), tol);
    rep.add("psi_prime", z, dpsi, npsi, rel_error(dpsi, npsi, 1e-12), tol);
  }
  return rep;
}

VerificationReport check_envelope(const LossPair& loss, double tol) {
  VerificationReport rep;
  rep.loss_name = loss.name;
  if (!loss.ratio_invertible) {
    rep.skipped = true;
    rep.skip_reason = "skipped: ratio not recoverable";
    return rep;
  }
  const double shift = loss.psi_normalized ? 0.0 : psi_value(loss, loss.omega.at_one());
  const auto psi_tilde = [&](double r) { return psi_value(loss, loss.omega.forward(r)) - shift; };
  for (double r : log_grid(0.2, 5.0, 25)) {
    const double h = 1e-5 * r;
    const double numeric =
        (concentrated_objective(loss, r + h) - concentrated_objective(loss, r - h)) / (2.0 * h);
    const double expect = psi_tilde(r);
    rep.add("envelope_derivative", r, expect, numeric, rel_error(expect, numeric, 1e-3), tol);
  }
  const auto grid = log_grid(1e-3, 1e3, kOuterGridPoints);
  double prev = psi_tilde(grid.front());
  std::size_t violations = 0;
  double first_bad = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = psi_tilde(grid[i]);
    if (!(v > prev)) {
      if (violations++ == 0) first_bad = grid[i];
    }
    prev = v;
  }
  rep.add("psi_tilde_increasing", first_bad, 0.0, static_cast<double>(violations),
          static_cast<double>(violations), 0.0);
  return rep;
}

VerificationReport verify_loss(const LossPair& loss, const VerifyTolerances& tol,
                               int derivative_points) {
  VerificationReport rep;
  rep.loss_name = loss.name;
  rep.merge(check_derivatives(loss, derivative_points, tol.derivative));
  rep.merge(check_theorem1(loss, default_ratio_grid(), tol));
  rep.merge(check_corollary_value(loss, tol.value));
  rep.merge(check_envelope(loss, tol.envelope));
  rep.skipped = rep.checks.empty();
  return rep;
}

std::string format_report_table(const std::vector<VerificationReport>& reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %-22s %12s %16s %16s %11s %9s %s\n", "loss", "check",
                "probe", "expected", "observed", "error", "tol", "result");
  out << line;
  for (const auto& rep : reports) {
    for (const auto& c : rep.checks) {
      std::snprintf(line, sizeof line, "%-14s %-22s %12.6g %16.10g %16.10g %11.3e %9.1e %s\n",
                    rep.loss_name.c_str(), c.name.c_str(), c.probe, c.expected, c.observed,
                    c.abs_error, c.tolerance, c.pass ? "PASS" : "FAIL");
      out << line;
    }
    if (!rep.skip_reason.empty()) out << rep.loss_name << "  " << rep.skip_reason << "\n";
    out << rep.loss_name << "  " << (rep.passed ? "passed" : "FAILED") << " (" << rep.checks.size()
        << " checks)\n";
  }
  return out.str();
}

std::string format_report_jsonl(const std::vector<VerificationReport>& reports) {
  std::string out;
  for (const auto& rep : reports) {
    for (const auto& c : rep.checks) {
      nlohmann::json j = {{"loss", rep.loss_name}, {"check", c.name},    {"probe", c.probe},
                          {"expected", c.expected}, {"observed", c.observed}, {"error", c.abs_error},
                          {"tolerance", c.tolerance}, {"pass", c.pass}};
      out += j.dump() + "\n";
    }
    if (rep.skipped || !rep.skip_reason.empty()) {
      nlohmann::json j = {{"loss", rep.loss_name}, {"skipped", rep.skip_reason}};
      out += j.dump() + "\n";
    }
  }
  return out;
}

}  // namespace lrgan
