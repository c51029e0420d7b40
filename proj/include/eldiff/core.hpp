#pragma once

/// Shared vocabulary for the steady-state electrodiffusion system on a slab
/// 0 <= x <= delta:
///
///   c+'(x) =  (ze/kT) E(x) c+(x) - Phi+/D+
///   c-'(x) = -(ze/kT) E(x) c-(x) - Phi-/D-
///   E'(x)  =  (4 pi z e / eps) [c+(x) - c-(x)]
///
/// Units are Gaussian CGS throughout. kT is carried as a single product.

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eldiff {

/// Bad user input: invalid parameters, ranges or configuration.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A profile could not be evaluated at `x()` (zero divisor or non-finite value).
class EvaluationError : public std::domain_error {
 public:
  EvaluationError(const std::string& what, double x)
      : std::domain_error(what + " at x=" + format_x(x)), x_(x) {}

  double x() const noexcept { return x_; }

 private:
  static std::string format_x(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  }

  double x_;
};

/// A ladder index outside the configured depth cap was requested.
class DepthCapExceeded : public std::out_of_range {
 public:
  DepthCapExceeded(int requested, int cap)
      : std::out_of_range("ladder index " + std::to_string(requested) +
                          " exceeds depth cap " + std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}

  int requested() const noexcept { return requested_; }
  int cap() const noexcept { return cap_; }

 private:
  int requested_;
  int cap_;
};

struct PhysicalParams {
  int z = 1;
  double e = 1.0;
  double kT = 1.0;
  double eps = 4.0 * std::numbers::pi;
  double D_plus = 1.0;
  double D_minus = 1.0;
  double delta = 1.0;

  /// z = e = kT = delta = D+- = 1, eps = 4 pi.
  static PhysicalParams canonical() { return {}; }

  bool equal_diffusion() const noexcept { return D_plus == D_minus; }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidInput(std::string("parameter '") + name +
                           "' must be finite and > 0");
      }
    };
    if (z < 1) throw InvalidInput("parameter 'z' must be an integer >= 1");
    positive(e, "e");
    positive(kT, "kT");
    positive(eps, "eps");
    positive(D_plus, "D_plus");
    positive(D_minus, "D_minus");
    positive(delta, "delta");
  }

  friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;
};

template <class T>
struct ProfileValues {
  T c_plus{};
  T c_minus{};
  T E{};
};

/// Profiles are evaluated in extended precision internally; transform chains
/// can pass close to poles of intermediate members where double cancellation
/// would dominate.
using ExtendedValues = ProfileValues<long double>;
using ProfileFunction = std::function<ExtendedValues(long double)>;

struct Provenance {
  std::string seed_id = "seed";
  int index = 0;
};

/// One member of a solution ladder: three profiles on [0, delta] and the two
/// constant fluxes. Immutable; evaluation is a pure function of x.
class SolutionState {
 public:
  SolutionState(PhysicalParams params, ProfileFunction profile, double phi_plus,
                double phi_minus, double reference_concentration,
                Provenance provenance = {})
      : params_(params),
        profile_(std::make_shared<const ProfileFunction>(std::move(profile))),
        phi_plus_(phi_plus),
        phi_minus_(phi_minus),
        c_ref_(reference_concentration),
        provenance_(std::move(provenance)) {
    params_.validate();
    if (!(c_ref_ > 0.0) || !std::isfinite(c_ref_)) {
      throw InvalidInput("reference concentration must be finite and > 0");
    }
  }

  /// Builds a state from three independent double-valued profiles.
  static SolutionState from_profiles(PhysicalParams params,
                                     std::function<double(double)> c_plus,
                                     std::function<double(double)> c_minus,
                                     std::function<double(double)> field,
                                     double phi_plus, double phi_minus,
                                     double reference_concentration,
                                     Provenance provenance = {}) {
    ProfileFunction f = [cp = std::move(c_plus), cm = std::move(c_minus),
                         E = std::move(field)](long double x) {
      const double xd = static_cast<double>(x);
      return ExtendedValues{cp(xd), cm(xd), E(xd)};
    };
    return SolutionState(params, std::move(f), phi_plus, phi_minus,
                         reference_concentration, std::move(provenance));
  }

  /// Throws EvaluationError on a non-finite profile value, including values
  /// that overflow when rounded to double.
  ProfileValues<double> evaluate(double x) const {
    const ExtendedValues v = evaluate_extended(x);
    const ProfileValues<double> d{static_cast<double>(v.c_plus),
                                  static_cast<double>(v.c_minus),
                                  static_cast<double>(v.E)};
    if (!std::isfinite(d.c_plus) || !std::isfinite(d.c_minus) || !std::isfinite(d.E)) {
      throw EvaluationError("profile value overflows double", x);
    }
    return d;
  }

  ExtendedValues evaluate_extended(long double x) const {
    const ExtendedValues v = (*profile_)(x);
    if (!std::isfinite(v.c_plus) || !std::isfinite(v.c_minus) ||
        !std::isfinite(v.E)) {
      throw EvaluationError("non-finite profile value",
                            static_cast<double>(x));
    }
    return v;
  }

  double c_plus(double x) const { return evaluate(x).c_plus; }
  double c_minus(double x) const { return evaluate(x).c_minus; }
  double E(double x) const { return evaluate(x).E; }

  std::function<double(double)> c_plus_fn() const {
    return [self = *this](double x) { return self.c_plus(x); };
  }
  std::function<double(double)> c_minus_fn() const {
    return [self = *this](double x) { return self.c_minus(x); };
  }
  std::function<double(double)> E_fn() const {
    return [self = *this](double x) { return self.E(x); };
  }

  const ProfileFunction& profile() const noexcept { return *profile_; }
  const PhysicalParams& params() const noexcept { return params_; }
  double phi_plus() const noexcept { return phi_plus_; }
  double phi_minus() const noexcept { return phi_minus_; }
  double reference_concentration() const noexcept { return c_ref_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  int index() const noexcept { return provenance_.index; }

  /// Same profiles, replaced fluxes.
  SolutionState with_fluxes(double phi_plus, double phi_minus) const {
    SolutionState copy = *this;
    copy.phi_plus_ = phi_plus;
    copy.phi_minus_ = phi_minus;
    return copy;
  }

 private:
  PhysicalParams params_;
  std::shared_ptr<const ProfileFunction> profile_;
  double phi_plus_;
  double phi_minus_;
  double c_ref_;
  Provenance provenance_;
};

struct Currents {
  double J_plus = 0.0;
  double J_minus = 0.0;
  double J = 0.0;
};

/// J+- = +-ze Phi+-, J = J+ + J-.
inline Currents currents(const PhysicalParams& p, double phi_plus,
                         double phi_minus) {
  const double ze = p.z * p.e;
  Currents c;
  c.J_plus = ze * phi_plus;
  c.J_minus = -ze * phi_minus;
  c.J = c.J_plus + c.J_minus;
  return c;
}

inline Currents currents(const SolutionState& s) {
  return currents(s.params(), s.phi_plus(), s.phi_minus());
}

struct ProfileSample {
  double x = 0.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
  double E = 0.0;
};

/// M points, uniformly spaced, x_0 = 0 and x_{M-1} = delta exactly.
inline std::vector<double> uniform_grid(double delta, int points) {
  if (points < 2) throw InvalidInput("grid needs at least 2 points");
  std::vector<double> xs(static_cast<std::size_t>(points));
  const int last = points - 1;
  for (int i = 0; i < points; ++i) {
    xs[static_cast<std::size_t>(i)] =
        i == last ? delta : delta * static_cast<double>(i) / last;
  }
  return xs;
}

inline std::vector<ProfileSample> sample_profiles(const SolutionState& s,
                                                  int grid_points) {
  std::vector<ProfileSample> rows;
  rows.reserve(static_cast<std::size_t>(std::max(grid_points, 0)));
  for (double x : uniform_grid(s.params().delta, grid_points)) {
    const auto v = s.evaluate(x);
    rows.push_back({x, v.c_plus, v.c_minus, v.E});
  }
  return rows;
}

enum class FieldKind { Length, Concentration, Field, FluxPlus, FluxMinus };

/// Nondimensional bookkeeping: x~ = x/delta, c~ = c/c_ref,
/// E~ = ze delta E / kT, Phi~+- = Phi+- delta / (D+- c_ref). In these variables
/// the system reads c~+-' = +-E~ c~+- - Phi~+-, E~' = nu (c~+ - c~-).
class Scaling {
 public:
  Scaling(const PhysicalParams& params, double c_ref) : params_(params), c_ref_(c_ref) {
    params_.validate();
    if (!(c_ref > 0.0) || !std::isfinite(c_ref)) {
      throw InvalidInput("reference concentration must be finite and > 0");
    }
  }

  double c_ref() const noexcept { return c_ref_; }
  double x_scale() const noexcept { return params_.delta; }
  double c_scale() const noexcept { return c_ref_; }
  double E_scale() const noexcept {
    return params_.kT / (params_.z * params_.e * params_.delta);
  }
  double flux_plus_scale() const noexcept {
    return params_.D_plus * c_ref_ / params_.delta;
  }
  double flux_minus_scale() const noexcept {
    return params_.D_minus * c_ref_ / params_.delta;
  }

  /// nu = 4 pi z^2 e^2 c_ref delta^2 / (eps kT).
  double coupling() const noexcept {
    const double ze = params_.z * params_.e;
    return 4.0 * std::numbers::pi * ze * ze * c_ref_ * params_.delta *
           params_.delta / (params_.eps * params_.kT);
  }

  double scale(FieldKind kind) const noexcept {
    switch (kind) {
      case FieldKind::Length: return x_scale();
      case FieldKind::Concentration: return c_scale();
      case FieldKind::Field: return E_scale();
      case FieldKind::FluxPlus: return flux_plus_scale();
      case FieldKind::FluxMinus: return flux_minus_scale();
    }
    return 1.0;
  }

  double to_dimensionless(FieldKind kind, double v) const noexcept {
    return v / scale(kind);
  }
  double to_dimensional(FieldKind kind, double v) const noexcept {
    return v * scale(kind);
  }

  /// Parameters under which the dimensionless state obeys the same system:
  /// ze/kT = 1, D+- = 1, delta = 1 and 4 pi ze/eps = nu.
  PhysicalParams dimensionless_params() const {
    PhysicalParams p;
    p.z = 1;
    p.e = 1.0;
    p.kT = 1.0;
    p.D_plus = 1.0;
    p.D_minus = 1.0;
    p.delta = 1.0;
    p.eps = 4.0 * std::numbers::pi / coupling();
    return p;
  }

  const PhysicalParams& params() const noexcept { return params_; }

 private:
  PhysicalParams params_;
  double c_ref_;
};

inline SolutionState nondimensionalize(const SolutionState& s, const Scaling& sc) {
  const long double xs = sc.x_scale();
  const long double cs = sc.c_scale();
  const long double es = sc.E_scale();
  ProfileFunction parent = s.profile();
  ProfileFunction f = [parent, xs, cs, es](long double xt) {
    const ExtendedValues v = parent(xt * xs);
    return ExtendedValues{v.c_plus / cs, v.c_minus / cs, v.E / es};
  };
  return SolutionState(sc.dimensionless_params(), std::move(f),
                       sc.to_dimensionless(FieldKind::FluxPlus, s.phi_plus()),
                       sc.to_dimensionless(FieldKind::FluxMinus, s.phi_minus()),
                       1.0, s.provenance());
}

/// Inverse of nondimensionalize: `s` is a dimensionless state, `sc` carries the
/// dimensional parameters to restore.
inline SolutionState dimensionalize(const SolutionState& s, const Scaling& sc) {
  const long double xs = sc.x_scale();
  const long double cs = sc.c_scale();
  const long double es = sc.E_scale();
  ProfileFunction parent = s.profile();
  ProfileFunction f = [parent, xs, cs, es](long double x) {
    const ExtendedValues v = parent(x / xs);
    return ExtendedValues{v.c_plus * cs, v.c_minus * cs, v.E * es};
  };
  return SolutionState(sc.params(), std::move(f),
                       sc.to_dimensional(FieldKind::FluxPlus, s.phi_plus()),
                       sc.to_dimensional(FieldKind::FluxMinus, s.phi_minus()),
                       sc.c_ref(), s.provenance());
}

}  // namespace eldiff
