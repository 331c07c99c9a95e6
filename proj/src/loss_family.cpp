#include "lrgan/loss_family.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace lrgan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logistic(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

double softplus(double a) { return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a))); }

std::string lower_case(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_recurse(const ScalarFn& fn, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_recurse(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// RangeInterval

RangeInterval RangeInterval::nonnegative() { return {0.0, kInf, false, true}; }
RangeInterval RangeInterval::unit() { return {0.0, 1.0, false, false}; }
RangeInterval RangeInterval::real() { return {-kInf, kInf, true, true}; }
RangeInterval RangeInterval::symmetric() { return {-1.0, 1.0, false, false}; }

bool RangeInterval::contains(double z) const {
  if (std::isnan(z)) return false;
  const bool above = lower_open ? z > lower : z >= lower;
  const bool below = upper_open ? z < upper : z <= upper;
  return above && below;
}

std::optional<RangeKind> RangeInterval::kind() const {
  if (*this == nonnegative()) return RangeKind::NonNegative;
  if (*this == unit()) return RangeKind::Unit;
  if (*this == real()) return RangeKind::Real;
  if (*this == symmetric()) return RangeKind::Symmetric;
  return std::nullopt;
}

std::string RangeInterval::to_string() const {
  auto bound = [](double v) {
    if (v == kInf) return std::string("inf");
    if (v == -kInf) return std::string("-inf");
    return format_number(v);
  };
  return std::string(lower_open ? "(" : "[") + bound(lower) + "," + bound(upper) +
         (upper_open ? ")" : "]");
}

double clamp_interior(const RangeInterval& range, double z, double eps) {
  if (std::isfinite(range.lower)) z = std::max(z, range.lower + eps);
  if (std::isfinite(range.upper)) z = std::min(z, range.upper - eps);
  return z;
}

// ---------------------------------------------------------------------------
// Omega transforms

std::vector<double> omega_probe_grid() {
  std::vector<double> grid{0.0};
  for (int k = -120; k <= 120; ++k) grid.push_back(std::pow(10.0, 0.05 * k));
  return grid;
}

bool passes_monotonicity_probe(const OmegaTransform& omega) {
  if (!omega.forward) return false;
  const auto grid = omega_probe_grid();
  double prev = omega.forward(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = omega.forward(grid[i]);
    if (std::isnan(cur) || cur < prev) return false;
    if (cur == prev) {
      // Saturation at a finite end is floating-point rounding, not a flat spot.
      const bool saturated = (std::isfinite(omega.range.upper) && cur == omega.range.upper) ||
                             (std::isfinite(omega.range.lower) && cur == omega.range.lower);
      if (!saturated) return false;
    }
    prev = cur;
  }
  return true;
}

OmegaTransform omega_power(double alpha) {
  if (!(alpha > 0.0)) throw LossError("omega_power: alpha must be positive");
  OmegaTransform w;
  w.forward = [alpha](double r) { return std::pow(r, alpha); };
  w.inverse = [alpha](double z) { return std::pow(z, 1.0 / alpha); };
  w.range = RangeInterval::nonnegative();
  w.description = alpha == 1.0 ? "r" : "r^" + format_number(alpha);
  return w;
}

OmegaTransform omega_log(double alpha) {
  if (!(alpha > 0.0)) throw LossError("omega_log: alpha must be positive");
  OmegaTransform w;
  w.forward = [alpha](double r) { return std::log(r) / alpha; };
  w.inverse = [alpha](double z) { return std::exp(alpha * z); };
  w.range = RangeInterval::real();
  w.description = alpha == 1.0 ? "log r" : "log(r)/" + format_number(alpha);
  return w;
}

OmegaTransform omega_posterior() {
  OmegaTransform w;
  w.forward = [](double r) { return std::isinf(r) ? 1.0 : r / (1.0 + r); };
  w.inverse = [](double z) { return z / (1.0 - z); };
  w.range = RangeInterval::unit();
  w.description = "r/(1+r)";
  return w;
}

OmegaTransform omega_tanh(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw LossError("omega_tanh: c must be positive and finite");
  OmegaTransform w;
  w.forward = [c](double r) { return std::tanh(0.5 * c * std::log(r)); };
  w.inverse = [c](double z) { return std::pow((1.0 + z) / (1.0 - z), 1.0 / c); };
  w.range = RangeInterval::symmetric();
  w.description = "(r^c-1)/(r^c+1), c=" + format_number(c);
  return w;
}

OmegaTransform omega_sign() {
  OmegaTransform w;
  w.forward = [](double r) {
    const double l = std::log(r);
    return static_cast<double>((l > 0.0) - (l < 0.0));
  };
  w.range = RangeInterval::real();
  w.invertible = false;
  w.description = "sign(log r) (limit)";
  return w;
}

// ---------------------------------------------------------------------------
// Loss pairs

RatioNotRecoverable::RatioNotRecoverable(const std::string& loss_name)
    : std::domain_error("ratio not recoverable: the discriminator of limit loss '" + loss_name +
                        "' does not determine the likelihood ratio") {}

LossPair make_loss_pair(const OmegaTransform& omega, ScalarFn rho, std::string name) {
  if (!omega.invertible || !omega.inverse)
    throw LossError("make_loss_pair: omega must be invertible");
  if (!rho) throw LossError("make_loss_pair: rho is required");
  if (!passes_monotonicity_probe(omega))
    throw LossError("make_loss_pair: omega '" + omega.description +
                    "' is not strictly increasing on the probe grid");
  for (double r : omega_probe_grid()) {
    const double z = clamp_interior(omega.range, omega.forward(r));
    if (!std::isfinite(z)) continue;
    const double w = rho(z);
    if (!(w > 0.0))
      throw LossError("make_loss_pair: rho must be positive, got " + format_number(w) +
                      " at z=" + format_number(z));
  }

  LossPair loss;
  loss.name = std::move(name);
  loss.omega = omega;
  loss.rho = rho;
  loss.range = omega.range;
  loss.ratio_invertible = true;
  auto inv = omega.inverse;
  loss.phi_prime = [inv, rho](double z) { return -inv(z) * rho(z); };
  loss.psi_prime = rho;
  return loss;
}

LossPair make_monotone_loss(double c, ScalarFn rho) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw LossError("make_monotone_loss: c must be positive and finite");
  return make_loss_pair(omega_tanh(c), std::move(rho), "Monotone(c=" + format_number(c) + ")");
}

double phi_value(const LossPair& loss, double z) {
  if (loss.phi) return loss.phi(z);
  return integrate_adaptive(loss.phi_prime, loss.omega.at_one(), z);
}

double psi_value(const LossPair& loss, double z) {
  if (loss.psi) return loss.psi(z);
  return integrate_adaptive(loss.psi_prime, loss.omega.at_one(), z);
}

LossPair normalize_psi(const LossPair& loss) {
  LossPair out = loss;
  const double anchor = loss.omega.at_one();
  if (loss.psi) {
    const double shift = loss.psi(anchor);
    auto psi = loss.psi;
    out.psi = [psi, shift](double z) { return psi(z) - shift; };
  } else {
    auto psi_prime = loss.psi_prime;
    out.psi = [psi_prime, anchor](double z) { return integrate_adaptive(psi_prime, anchor, z); };
  }
  out.psi_normalized = true;
  return out;
}

double ratio_from_discriminator(const LossPair& loss, double d) {
  if (!loss.ratio_invertible || !loss.omega.inverse) throw RatioNotRecoverable(loss.name);
  return loss.omega.inverse(clamp_interior(loss.range, d));
}

// ---------------------------------------------------------------------------
// Catalogue

namespace {

CatalogueEntry entry(LossPair loss, Subclass sub, std::string row, std::string omega_text,
                     std::string rho_text, std::string note) {
  return CatalogueEntry{std::move(loss), sub, std::move(row), std::move(omega_text),
                        std::move(rho_text), std::move(note)};
}

LossPair with_closed(LossPair loss, ScalarFn phi, ScalarFn psi) {
  loss.phi = std::move(phi);
  loss.psi = std::move(psi);
  return loss;
}

std::vector<CatalogueEntry> build_catalogue() {
  std::vector<CatalogueEntry> c;

  c.push_back(entry(
      with_closed(make_loss_pair(omega_power(1.0), [](double z) { return 1.0 / z; }, "A1a"),
                  [](double z) { return -z; }, [](double z) { return std::log(z); }),
      Subclass::A, "phi=-z, psi=log(z), J=[0,inf)", "r", "1/z",
      "power family, alpha=1, beta=-1"));

  c.push_back(entry(
      with_closed(make_loss_pair(omega_power(1.0), [](double z) { return 1.0 / (z * z); }, "A1b"),
                  [](double z) { return -std::log(z); }, [](double z) { return -1.0 / z; }),
      Subclass::A, "phi=-log(z), psi=-1/z, J=[0,inf)", "r", "z^-2",
      "power family, alpha=1, beta=-2"));

  c.push_back(entry(
      with_closed(make_loss_pair(omega_power(0.5), [](double z) { return 1.0 / (z * z); }, "A2"),
                  [](double z) { return -(1.0 + z); }, [](double z) { return -(1.0 + 1.0 / z); }),
      Subclass::A, "phi=-(1+z), psi=-(1+1/z), J=[0,inf)", "r^(1/2)", "z^-2",
      "tabulated alpha=1 with rho=1/(1+z) does not reproduce these phi, psi; they satisfy the "
      "recipe only for omega=sqrt(r), rho=z^-2, so the ratio is recovered as r=D^2"));

  c.push_back(entry(
      with_closed(make_loss_pair(omega_power(1.0),
                                 [](double z) { return 1.0 / ((1.0 + z) * z); }, "A3"),
                  [](double z) { return -std::log1p(z); },
                  [](double z) { return -std::log1p(1.0 / z); }),
      Subclass::A, "phi=-log(1+z), psi=-log(1+1/z), J=[0,inf)", "r", "1/((1+z)z)",
      "power family, alpha=1"));

  c.push_back(entry(
      with_closed(make_loss_pair(omega_power(1.0), [](double) { return 1.0; }, "MSE"),
                  [](double z) { return -0.5 * z * z; }, [](double z) { return z; }),
      Subclass::A, "phi=-0.5z^2, psi=z, J=[0,inf)", "r", "1",
      "power family, alpha=1, beta=0 (mean square error)"));

  c.push_back(entry(
      with_closed(make_loss_pair(omega_log(1.0), [](double) { return 1.0; }, "B1a"),
                  [](double z) { return -std::exp(z); }, [](double z) { return z; }),
      Subclass::B, "phi=-e^z, psi=z, J=R", "log r", "1",
      "tabulated psi=e^z violates the recipe for every alpha; shipped as the beta=0 case "
      "(rho=1, phi=-e^z, psi=z) with alpha=1"));

  c.push_back(entry(
      with_closed(make_loss_pair(omega_log(1.0), [](double z) { return std::exp(-z); }, "B1b"),
                  [](double z) { return -z; }, [](double z) { return -std::exp(-z); }),
      Subclass::B, "phi=-z, psi=-e^-z, J=R", "log r", "e^-z", "log family, alpha=beta=1"));

  c.push_back(entry(
      with_closed(make_loss_pair(omega_log(1.0),
                                 [](double z) { return 0.5 * std::exp(-0.5 * z); }, "Exponential"),
                  [](double z) { return -std::exp(0.5 * z); },
                  [](double z) { return -std::exp(-0.5 * z); }),
      Subclass::B, "phi=-e^(z/2), psi=-e^(-z/2), J=R", "log r", "0.5 e^(-z/2)",
      "log family, alpha=1, beta=0.5; tabulated forms are the beta-family formulas scaled by 0.5, "
      "i.e. rho scaled by 0.5"));

  c.push_back(entry(
      with_closed(make_loss_pair(omega_log(1.0), [](double z) { return logistic(-z); }, "B2"),
                  [](double z) { return -softplus(z); }, [](double z) { return -softplus(-z); }),
      Subclass::B, "phi=-log(1+e^z), psi=-log(1+e^-z), J=R", "log r", "1/(1+e^z)",
      "log family, alpha=1"));

  c.push_back(entry(
      with_closed(make_loss_pair(omega_posterior(), [](double z) { return 1.0 / z; },
                                 "CrossEntropy"),
                  [](double z) { return std::log1p(-z); }, [](double z) { return std::log(z); }),
      Subclass::C, "phi=log(1-z), psi=log(z), J=[0,1]", "r/(1+r)", "1/z",
      "posterior family, rho=1/z (original cross-entropy objective)"));

  c.push_back(entry(
      with_closed(make_loss_pair(omega_posterior(), [](double) { return 1.0; }, "C2"),
                  [](double z) { return z + std::log1p(-z); }, [](double z) { return z; }),
      Subclass::C, "phi=z+log(1-z), psi=z, J=[0,1]", "r/(1+r)", "1",
      "posterior family, rho=(1-z)^alpha with alpha=0"));

  {
    LossPair hinge;
    hinge.name = "Hinge";
    hinge.omega = omega_sign();
    hinge.range = RangeInterval::real();
    hinge.ratio_invertible = false;
    // One-sided derivative from the active side at each kink.
    hinge.phi_prime = [](double z) { return z >= -1.0 ? -1.0 : 0.0; };
    hinge.psi_prime = [](double z) { return z < 1.0 ? 1.0 : 0.0; };
    hinge.phi = [](double z) { return -std::max(1.0 + z, 0.0); };
    hinge.psi = [](double z) { return -std::max(1.0 - z, 0.0); };
    c.push_back(entry(std::move(hinge), Subclass::D, "phi=-(1+z)_+, psi=-(1-z)_+, J=R",
                      "sign(log r) (limit of sign(log r)|log r|^(1/c))", "limit",
                      "limit loss; derivatives at the kinks are the one-sided slopes of the "
                      "active side: phi'(-1)=-1, psi'(1)=0"));
  }

  {
    LossPair w;
    w.name = "Wasserstein";
    w.omega = omega_sign();
    w.range = RangeInterval::real();
    w.ratio_invertible = false;
    w.phi_prime = [](double) { return 1.0; };
    w.psi_prime = [](double) { return -1.0; };
    w.phi = [](double z) { return z; };
    w.psi = [](double z) { return -z; };
    c.push_back(entry(std::move(w), Subclass::D, "phi=z, psi=-z, J=R",
                      "sign(log r) (limit of tanh(c/2 log r))", "limit",
                      "limit loss in tabulated orientation (maximize E_f[D]-E_g[D]); the "
                      "psi=z=-phi form is the same problem under D -> -D"));
  }
  return c;
}

}  // namespace

const std::vector<CatalogueEntry>& catalogue() {
  static const std::vector<CatalogueEntry> entries = build_catalogue();
  return entries;
}

std::vector<std::string> catalogue_names() {
  std::vector<std::string> names;
  for (const auto& e : catalogue()) names.push_back(e.loss.name);
  return names;
}

const CatalogueEntry& catalogue_lookup(const std::string& name) {
  const std::string key = lower_case(name);
  for (const auto& e : catalogue()) {
    if (lower_case(e.loss.name) == key) return e;
  }
  std::string valid;
  for (const auto& n : catalogue_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw LossError("unknown loss '" + name + "'; valid names: " + valid);
}

char subclass_letter(Subclass s) {
  switch (s) {
    case Subclass::A: return 'A';
    case Subclass::B: return 'B';
    case Subclass::C: return 'C';
    case Subclass::D: return 'D';
  }
  return '?';
}

// ---------------------------------------------------------------------------
// Squashing

double Squashing::value(double a) const {
  switch (kind) {
    case SquashKind::Identity: return a;
    case SquashKind::Softplus: return softplus(a);
    case SquashKind::Logistic: return logistic(a);
    case SquashKind::Tanh: return std::tanh(a);
  }
  return a;
}

double Squashing::derivative(double a) const {
  switch (kind) {
    case SquashKind::Identity: return 1.0;
    case SquashKind::Softplus: return logistic(a);
    case SquashKind::Logistic: {
      const double s = logistic(a);
      return s * (1.0 - s);
    }
    case SquashKind::Tanh: {
      const double t = std::tanh(a);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

double Squashing::second_derivative(double a) const {
  switch (kind) {
    case SquashKind::Identity: return 0.0;
    case SquashKind::Softplus: {
      const double s = logistic(a);
      return s * (1.0 - s);
    }
    case SquashKind::Logistic: {
      const double s = logistic(a);
      return s * (1.0 - s) * (1.0 - 2.0 * s);
    }
    case SquashKind::Tanh: {
      const double t = std::tanh(a);
      return -2.0 * t * (1.0 - t * t);
    }
  }
  return 0.0;
}

std::string Squashing::name() const {
  switch (kind) {
    case SquashKind::Identity: return "identity";
    case SquashKind::Softplus: return "softplus";
    case SquashKind::Logistic: return "logistic";
    case SquashKind::Tanh: return "tanh";
  }
  return "identity";
}

Squashing output_squashing_for(const RangeInterval& range) {
  const auto k = range.kind();
  if (!k) throw LossError("no output squashing for non-canonical range " + range.to_string());
  switch (*k) {
    case RangeKind::NonNegative: return {SquashKind::Softplus};
    case RangeKind::Unit: return {SquashKind::Logistic};
    case RangeKind::Real: return {SquashKind::Identity};
    case RangeKind::Symmetric: return {SquashKind::Tanh};
  }
  return {};
}

Squashing squashing_from_name(const std::string& name) {
  const auto n = lower_case(name);
  if (n == "identity") return {SquashKind::Identity};
  if (n == "softplus") return {SquashKind::Softplus};
  if (n == "logistic") return {SquashKind::Logistic};
  if (n == "tanh") return {SquashKind::Tanh};
  throw LossError("unknown squashing '" + name + "'");
}

// ---------------------------------------------------------------------------

double integrate_adaptive(const ScalarFn& fn, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = fn(a);
  const double fb = fn(b);
  const double fm = fn(0.5 * (a + b));
  return simpson_recurse(fn, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 50);
}

}  // namespace lrgan
