#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrgan {

using ScalarFn = std::function<double(double)>;

/// The four output ranges a discriminator can be asked to occupy.
enum class RangeKind { NonNegative, Unit, Real, Symmetric };

struct RangeInterval {
  double lower;
  double upper;
  bool lower_open;
  bool upper_open;

  static RangeInterval nonnegative();  // [0, inf)
  static RangeInterval unit();         // [0, 1]
  static RangeInterval real();         // (-inf, inf)
  static RangeInterval symmetric();    // [-1, 1]

  bool contains(double z) const;
  /// Canonical kind, or nullopt for any other interval.
  std::optional<RangeKind> kind() const;
  std::string to_string() const;

  friend bool operator==(const RangeInterval&, const RangeInterval&) = default;
};

/// Distance kept from finite range ends before evaluating inverses, weights or logs.
inline constexpr double kBoundaryEps = 1e-6;

/// Moves z inside `range` by `eps` at each finite end.
double clamp_interior(const RangeInterval& range, double z, double eps = kBoundaryEps);

/// Strictly increasing map r -> omega(r) on r >= 0.
struct OmegaTransform {
  ScalarFn forward;
  ScalarFn inverse;  // empty when not invertible
  RangeInterval range;
  bool invertible = true;
  std::string description;

  double at_one() const { return forward(1.0); }
};

/// Log-spaced grid used for monotonicity and inversion probes: 0 followed by
/// 10^k for k in [-6, 6] in steps of 0.05.
std::vector<double> omega_probe_grid();

/// True when `omega.forward` never decreases along the probe grid and only stalls
/// where it has saturated to a finite end of its range.
bool passes_monotonicity_probe(const OmegaTransform& omega);

// Common transforms.
OmegaTransform omega_power(double alpha);        // r^alpha
OmegaTransform omega_log(double alpha = 1.0);    // log(r) / alpha
OmegaTransform omega_posterior();                // r / (1 + r)
OmegaTransform omega_tanh(double c);             // (r^c - 1) / (r^c + 1)
OmegaTransform omega_sign();                     // sign(log r), limit only

struct LossPair {
  std::string name;
  ScalarFn phi_prime;
  ScalarFn psi_prime;
  ScalarFn phi;  // closed form, may be empty
  ScalarFn psi;  // closed form, may be empty
  OmegaTransform omega;
  ScalarFn rho;  // empty for limit losses
  RangeInterval range;
  bool ratio_invertible = true;
  /// Set once psi has been shifted so that psi(omega(1)) = 0.
  bool psi_normalized = false;

  bool has_closed_forms() const { return static_cast<bool>(phi) && static_cast<bool>(psi); }
};

class LossError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised whenever a likelihood ratio is requested from a limit loss.
class RatioNotRecoverable : public std::domain_error {
 public:
  explicit RatioNotRecoverable(const std::string& loss_name);
};

/// phi'(z) = -omega^{-1}(z) rho(z), psi'(z) = rho(z). Closed forms are left empty.
LossPair make_loss_pair(const OmegaTransform& omega, ScalarFn rho, std::string name = "custom");

/// omega(r) = (r^c - 1)/(r^c + 1) on [-1, 1], approximating sign(log r) as c grows.
LossPair make_monotone_loss(double c, ScalarFn rho);

/// psi(z) - psi(omega(1)); uses the integrated surrogate when psi has no closed form.
LossPair normalize_psi(const LossPair& loss);

/// phi or psi at z: the closed form when present, otherwise the integral of the
/// derivative from omega(1) to z (so the surrogate vanishes at omega(1)).
double phi_value(const LossPair& loss, double z);
double psi_value(const LossPair& loss, double z);

/// omega^{-1}(d) after clamping d to the interior of the loss range.
double ratio_from_discriminator(const LossPair& loss, double d);

// ---------------------------------------------------------------------------
// Catalogue

enum class Subclass { A, B, C, D };

struct CatalogueEntry {
  LossPair loss;
  Subclass subclass;
  std::string table_row;  // phi, psi, range as tabulated
  std::string omega_text;
  std::string rho_text;
  std::string derivation_note;
};

/// All thirteen entries in table order.
const std::vector<CatalogueEntry>& catalogue();
std::vector<std::string> catalogue_names();
/// Case-insensitive lookup; throws LossError listing valid names.
const CatalogueEntry& catalogue_lookup(const std::string& name);
char subclass_letter(Subclass s);

// ---------------------------------------------------------------------------
// Output squashing

enum class SquashKind { Identity, Softplus, Logistic, Tanh };

struct Squashing {
  SquashKind kind = SquashKind::Identity;

  double value(double a) const;
  double derivative(double a) const;
  double second_derivative(double a) const;
  std::string name() const;
};

Squashing output_squashing_for(const RangeInterval& range);
Squashing squashing_from_name(const std::string& name);

// ---------------------------------------------------------------------------

/// Adaptive Simpson quadrature of fn over [a, b] (b < a gives the negated integral).
double integrate_adaptive(const ScalarFn& fn, double a, double b, double tol = 1e-8);

}  // namespace lrgan
