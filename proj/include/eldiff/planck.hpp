#pragma once

/// Planck's field-free seed (linear equal profiles, E = 0) and the charge
/// quantization quantities derived from it: crossing time tau, area A, the
/// unequal-diffusion time tau', Q(n) = 4 n z e and per-species transfers.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eldiff/backlund.hpp"
#include "eldiff/core.hpp"

namespace eldiff {

struct PlanckSeedSpec {
  double c0 = 2.0;
  double c1 = 1.0;
  PhysicalParams params;

  void validate() const {
    params.validate();
    if (!std::isfinite(c0) || !std::isfinite(c1)) {
      throw InvalidInput("boundary concentrations must be finite");
    }
    if (!(c1 > 0.0)) throw InvalidInput("boundary concentration c1 must be > 0");
    if (!(c0 > c1)) throw InvalidInput("boundary concentrations must satisfy c0 > c1");
  }
};

///   c+(x) = c-(x) = c0 + (c1 - c0) x / delta,  E(x) = 0
///   Phi+- = D+- (c0 - c1) / delta
inline SolutionState make_planck_seed(const PlanckSeedSpec& spec) {
  spec.validate();
  const long double c0 = spec.c0;
  const long double c1 = spec.c1;
  const long double delta = spec.params.delta;
  ProfileFunction f = [c0, c1, delta](long double x) {
    const long double c = c0 + (c1 - c0) * x / delta;
    return ExtendedValues{c, c, 0.0L};
  };
  const double gradient = (spec.c0 - spec.c1) / spec.params.delta;
  return SolutionState(spec.params, std::move(f), spec.params.D_plus * gradient,
                       spec.params.D_minus * gradient, spec.c0, {"planck", 0});
}

/// tau = delta^2 / (2D); only defined for D+ = D-.
inline double crossing_time(const PhysicalParams& p) {
  p.validate();
  if (!p.equal_diffusion()) {
    throw InvalidInput("crossing time needs D_plus == D_minus; use tau_prime");
  }
  return p.delta * p.delta / (2.0 * p.D_plus);
}

/// A = 2 / ((c0 - c1) delta), chosen so that Phi(0) A tau = 1.
inline double crossing_area(const PlanckSeedSpec& spec) {
  spec.validate();
  return 2.0 / ((spec.c0 - spec.c1) * spec.params.delta);
}

/// tau' = 2 tau+ tau- / (tau+ + tau-) with tau+- = delta^2 / (2 D+-).
inline double tau_prime(const PhysicalParams& p) {
  p.validate();
  const double tp = p.delta * p.delta / (2.0 * p.D_plus);
  const double tm = p.delta * p.delta / (2.0 * p.D_minus);
  return 2.0 * tp * tm / (tp + tm);
}

struct QuantizationRow {
  int n = 0;
  // Charges below are in units of z e.
  double Q = 0.0;
  double Q_from_currents = 0.0;
  double J_Atau = 0.0;
  std::optional<double> J_plus_Atau;
  std::optional<double> J_minus_Atau;
};

struct QuantizationReport {
  bool equal_diffusion = true;
  std::optional<double> tau;
  double tau_prime = 0.0;
  double A = 0.0;
  double n_plus = 0.0;
  double n_minus = 0.0;
  double delta_J = 0.0;
  double third_term_max = 0.0;
  std::vector<QuantizationRow> rows;

  const QuantizationRow& row(int n) const {
    for (const auto& r : rows) {
      if (r.n == n) return r;
    }
    throw InvalidInput("quantization report has no row n=" + std::to_string(n));
  }
};

struct S1Profiles {
  std::function<double(double)> c_plus;
  std::function<double(double)> E;
};

/// Closed forms for B(planck seed):
///   E1(x)   = (2kT/(z e delta)) (c0 - c1) / (c0 + (c1 - c0) x/delta)
///   c+1(x)  = c0 [1 + (c1/c0 - 1) x/delta + eps E1(x)^2 / (8 pi kT c0)]
/// Phi+/D+ = (c0 - c1)/delta for either species, so these hold for unequal D too.
inline S1Profiles s1_closed_form(const PlanckSeedSpec& spec) {
  spec.validate();
  const PhysicalParams p = spec.params;
  const double c0 = spec.c0;
  const double c1 = spec.c1;
  auto field = [p, c0, c1](double x) {
    return (2.0 * p.kT / (p.z * p.e * p.delta)) * (c0 - c1) /
           (c0 + (c1 - c0) * x / p.delta);
  };
  auto c_plus = [p, c0, c1, field](double x) {
    const double E = field(x);
    return c0 * (1.0 + (c1 / c0 - 1.0) * x / p.delta +
                 p.eps * E * E / (8.0 * std::numbers::pi * p.kT * c0));
  };
  return {c_plus, field};
}

/// max over the slab of eps E1(x)^2 / (8 pi kT c0). |E1| grows with x (its
/// denominator decreases monotonically), so the maximum sits at x = delta.
inline double third_term_magnitude(const PlanckSeedSpec& spec) {
  const S1Profiles s1 = s1_closed_form(spec);
  const double E = s1.E(spec.params.delta);
  const PhysicalParams& p = spec.params;
  return p.eps * E * E / (8.0 * std::numbers::pi * p.kT * spec.c0);
}

/// Equal D: rows carry Q(n), J(n) A tau and the per-species transfers
/// (2n+1, 2n-1), all in units of z e. Unequal D: tau is undefined, tau' takes
/// its place and the species columns are omitted.
inline QuantizationReport quantization_report(const PlanckSeedSpec& spec, int n_min,
                                              int n_max) {
  spec.validate();
  if (n_min > n_max) throw InvalidInput("quantization range needs n_min <= n_max");
  const PhysicalParams& p = spec.params;
  const SolutionState seed = make_planck_seed(spec);

  QuantizationReport r;
  r.equal_diffusion = p.equal_diffusion();
  r.A = crossing_area(spec);
  r.tau_prime = tau_prime(p);
  if (r.equal_diffusion) r.tau = crossing_time(p);
  const double t = r.tau.value_or(r.tau_prime);
  r.n_plus = seed.phi_plus() * r.A * t;
  r.n_minus = seed.phi_minus() * r.A * t;
  r.delta_J = delta_J(seed);
  r.third_term_max = third_term_magnitude(spec);

  const double ze = p.z * p.e;
  const Currents j0 = currents(seed);
  for (int n = n_min; n <= n_max; ++n) {
    const Currents j = current_ladder_closed_form(seed, n);
    QuantizationRow row;
    row.n = n;
    row.Q = n * r.delta_J * r.A * t / ze;
    row.Q_from_currents = (j.J - j0.J) * r.A * t / ze;
    row.J_Atau = j.J * r.A * t / ze;
    if (r.equal_diffusion) {
      row.J_plus_Atau = j.J_plus * r.A * t / ze;
      row.J_minus_Atau = j.J_minus * r.A * t / ze;
    }
    r.rows.push_back(row);
  }
  return r;
}

struct Preset {
  std::string name;
  std::string description;
  PlanckSeedSpec spec;
};

/// Dimensionless test preset: z = e = kT = delta = D = 1, eps = 4 pi, c0 = 2,
/// c1 = 1. Delta J = 4, tau = 1/2, A = 2.
inline Preset canonical_preset() {
  return {"canonical", "dimensionless test preset", PlanckSeedSpec{2.0, 1.0, {}}};
}

/// Illustrative aqueous junction in CGS: z = 1, T = 300 K, eps = 80,
/// D = 1e-5 cm^2/s, delta = 1e-2 cm, c0 = 1.2e19 cm^-3 (about 20 mM),
/// c1 = 0.6e19 cm^-3. Not taken from any measurement.
inline Preset aqueous_cgs_preset() {
  PhysicalParams p;
  p.z = 1;
  p.e = 4.80320471e-10;         // statC
  p.kT = 1.380649e-16 * 300.0;  // erg
  p.eps = 80.0;
  p.D_plus = 1.0e-5;
  p.D_minus = 1.0e-5;
  p.delta = 1.0e-2;
  return {"aqueous-cgs", "illustrative aqueous junction, CGS units",
          PlanckSeedSpec{1.2e19, 0.6e19, p}};
}

inline std::vector<Preset> presets() { return {canonical_preset(), aqueous_cgs_preset()}; }

inline Preset preset_by_name(std::string_view name) {
  for (auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw InvalidInput("unknown preset '" + std::string(name) +
                     "' (known: canonical, aqueous-cgs)");
}

}  // namespace eldiff
