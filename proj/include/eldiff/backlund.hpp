#pragma once

/// Auto-Backlund transformation B, its inverse, solution ladders S^(n) and the
/// closed-form flux/current ladders.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "eldiff/core.hpp"

namespace eldiff {

inline constexpr int kDefaultDepthCap = 16;

namespace detail {

inline std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct TransformCoefficients {
  long double drift;      // eps / (2 pi z e D)
  long double quadratic;  // eps kT / (2 pi z^2 e^2)
  long double field;      // 2 kT / (z e D)
};

inline TransformCoefficients coefficients(const PhysicalParams& p, double D) {
  const long double pi = std::numbers::pi_v<long double>;
  const long double ze = static_cast<long double>(p.z) * p.e;
  const long double eps = p.eps;
  const long double kT = p.kT;
  return {eps / (2 * pi * ze * D), eps * kT / (2 * pi * ze * ze),
          2 * kT / (ze * D)};
}

}  // namespace detail

/// S^(1) = B(S^(0)):
///   c+1 = c-0 - (eps/2 pi z e D+) Phi+0 E0 / c+0 + (eps kT/2 pi z^2 e^2)(Phi+0/(D+ c+0))^2
///   c-1 = c+0,  E1 = -E0 + (2kT/z e D+) Phi+0 / c+0
///   Phi+1 = 2 Phi+0 + (D+/D-) Phi-0,  Phi-1 = -(D-/D+) Phi+0
/// Evaluating where c+0 vanishes throws EvaluationError.
inline SolutionState apply_B(const SolutionState& s) {
  const PhysicalParams& p = s.params();
  const auto k = detail::coefficients(p, p.D_plus);
  const long double phi = s.phi_plus();
  const long double D = p.D_plus;
  ProfileFunction parent = s.profile();
  ProfileFunction f = [parent, k, phi, D](long double x) {
    const ExtendedValues v = parent(x);
    if (v.c_plus == 0.0L) {
      throw EvaluationError("division by zero c_plus in forward transform",
                            static_cast<double>(x));
    }
    const long double q = phi / (D * v.c_plus);
    ExtendedValues out;
    out.c_plus = v.c_minus - k.drift * phi * v.E / v.c_plus + k.quadratic * q * q;
    out.c_minus = v.c_plus;
    out.E = -v.E + k.field * phi / v.c_plus;
    return out;
  };
  const double phi_plus = 2.0 * s.phi_plus() + (p.D_plus / p.D_minus) * s.phi_minus();
  const double phi_minus = -(p.D_minus / p.D_plus) * s.phi_plus();
  Provenance prov = s.provenance();
  prov.index += 1;
  return SolutionState(p, std::move(f), phi_plus, phi_minus,
                       s.reference_concentration(), std::move(prov));
}

/// S^(-1) = B^-1(S^(0)):
///   c-(-1) = c+0 + (eps/2 pi z e D-) Phi-0 E0 / c-0 + (eps kT/2 pi z^2 e^2)(Phi-0/(D- c-0))^2
///   c+(-1) = c-0,  E(-1) = -E0 - (2kT/z e D-) Phi-0 / c-0
///   Phi-(-1) = 2 Phi-0 + (D-/D+) Phi+0,  Phi+(-1) = -(D+/D-) Phi-0
inline SolutionState apply_B_inverse(const SolutionState& s) {
  const PhysicalParams& p = s.params();
  const auto k = detail::coefficients(p, p.D_minus);
  const long double phi = s.phi_minus();
  const long double D = p.D_minus;
  ProfileFunction parent = s.profile();
  ProfileFunction f = [parent, k, phi, D](long double x) {
    const ExtendedValues v = parent(x);
    if (v.c_minus == 0.0L) {
      throw EvaluationError("division by zero c_minus in inverse transform",
                            static_cast<double>(x));
    }
    const long double q = phi / (D * v.c_minus);
    ExtendedValues out;
    out.c_plus = v.c_minus;
    out.c_minus = v.c_plus + k.drift * phi * v.E / v.c_minus + k.quadratic * q * q;
    out.E = -v.E - k.field * phi / v.c_minus;
    return out;
  };
  const double phi_minus = 2.0 * s.phi_minus() + (p.D_minus / p.D_plus) * s.phi_plus();
  const double phi_plus = -(p.D_plus / p.D_minus) * s.phi_minus();
  Provenance prov = s.provenance();
  prov.index -= 1;
  return SolutionState(p, std::move(f), phi_plus, phi_minus,
                       s.reference_concentration(), std::move(prov));
}

/// Reads ELDIFF_DEPTH_CAP, falling back to kDefaultDepthCap.
inline int depth_cap_from_env() {
  const char* raw = std::getenv("ELDIFF_DEPTH_CAP");
  if (raw == nullptr || *raw == '\0') return kDefaultDepthCap;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 0 || v > 1'000'000) {
    throw InvalidInput(std::string("ELDIFF_DEPTH_CAP must be a non-negative integer, got '") +
                       raw + "'");
  }
  return static_cast<int>(v);
}

inline void check_depth(int n, int depth_cap) {
  if (std::abs(n) > depth_cap) throw DepthCapExceeded(n, depth_cap);
}

/// Rejects seeds whose concentrations are not strictly positive on a
/// `points`-point uniform grid.
inline void require_positive_seed(const SolutionState& seed, int points = 1001) {
  for (double x : uniform_grid(seed.params().delta, points)) {
    const auto v = seed.evaluate(x);
    if (!(v.c_plus > 0.0)) {
      throw InvalidInput("seed c_plus is not positive at x=" + detail::fmt17(x) +
                         " (value " + detail::fmt17(v.c_plus) + ")");
    }
    if (!(v.c_minus > 0.0)) {
      throw InvalidInput("seed c_minus is not positive at x=" + detail::fmt17(x) +
                         " (value " + detail::fmt17(v.c_minus) + ")");
    }
  }
}

/// B^n(seed) for n > 0, (B^-1)^|n|(seed) for n < 0.
inline SolutionState ladder_member(const SolutionState& seed, int n,
                                   int depth_cap = kDefaultDepthCap) {
  check_depth(n, depth_cap);
  SolutionState s = seed;
  for (int i = 0; i < n; ++i) s = apply_B(s);
  for (int i = 0; i > n; --i) s = apply_B_inverse(s);
  return s;
}

/// Members n_min..n_max in ascending n. Requires n_min <= 0 <= n_max.
inline std::vector<SolutionState> ladder(const SolutionState& seed, int n_min,
                                         int n_max, int depth_cap = kDefaultDepthCap) {
  if (n_min > 0 || n_max < 0) {
    throw InvalidInput("ladder range must satisfy n_min <= 0 <= n_max");
  }
  check_depth(n_min, depth_cap);
  check_depth(n_max, depth_cap);
  require_positive_seed(seed);

  std::vector<SolutionState> down;
  SolutionState s = seed;
  for (int n = -1; n >= n_min; --n) {
    s = apply_B_inverse(s);
    down.push_back(s);
  }
  std::vector<SolutionState> out(down.rbegin(), down.rend());
  out.push_back(seed);
  s = seed;
  for (int n = 1; n <= n_max; ++n) {
    s = apply_B(s);
    out.push_back(s);
  }
  return out;
}

struct FluxPair {
  double phi_plus = 0.0;
  double phi_minus = 0.0;
};

///   Phi+(n) = (n+1) Phi+0 + n (D+/D-) Phi-0
///   Phi-(n) = -(n-1) Phi-0 - n (D-/D+) Phi+0
inline FluxPair flux_ladder_closed_form(const PhysicalParams& p, double phi_plus0,
                                        double phi_minus0, int n) {
  const double nn = n;
  return {(nn + 1.0) * phi_plus0 + nn * (p.D_plus / p.D_minus) * phi_minus0,
          -(nn - 1.0) * phi_minus0 - nn * (p.D_minus / p.D_plus) * phi_plus0};
}

inline FluxPair flux_ladder_closed_form(const SolutionState& seed, int n) {
  return flux_ladder_closed_form(seed.params(), seed.phi_plus(), seed.phi_minus(), n);
}

///   J+(n) = (n+1) J+0 - n (D+/D-) J-0
///   J-(n) = -(n-1) J-0 + n (D-/D+) J+0
inline Currents current_ladder_closed_form(const SolutionState& seed, int n) {
  const PhysicalParams& p = seed.params();
  const Currents j0 = currents(seed);
  const double nn = n;
  Currents out;
  out.J_plus = (nn + 1.0) * j0.J_plus - nn * (p.D_plus / p.D_minus) * j0.J_minus;
  out.J_minus = -(nn - 1.0) * j0.J_minus + nn * (p.D_minus / p.D_plus) * j0.J_plus;
  out.J = out.J_plus + out.J_minus;
  return out;
}

/// Delta J = z e (D+ + D-) (Phi+0/D+ + Phi-0/D-), so that J(n) = J(0) + n Delta J.
inline double delta_J(const PhysicalParams& p, double phi_plus0, double phi_minus0) {
  return p.z * p.e * (p.D_plus + p.D_minus) *
         (phi_plus0 / p.D_plus + phi_minus0 / p.D_minus);
}

inline double delta_J(const SolutionState& seed) {
  return delta_J(seed.params(), seed.phi_plus(), seed.phi_minus());
}

/// Positivity scan over a uniform grid. Ladder members are generated whether
/// or not they are physical; this is reported, not enforced.
struct Admissibility {
  double min_c_plus = std::numeric_limits<double>::infinity();
  double x_min_c_plus = 0.0;
  double min_c_minus = std::numeric_limits<double>::infinity();
  double x_min_c_minus = 0.0;
  bool evaluable = true;
  double failure_x = std::numeric_limits<double>::quiet_NaN();

  bool physical() const noexcept {
    return evaluable && min_c_plus > 0.0 && min_c_minus > 0.0;
  }
};

inline Admissibility admissibility(const SolutionState& s, int points = 1001) {
  Admissibility a;
  for (double x : uniform_grid(s.params().delta, points)) {
    try {
      const auto v = s.evaluate(x);
      if (v.c_plus < a.min_c_plus) {
        a.min_c_plus = v.c_plus;
        a.x_min_c_plus = x;
      }
      if (v.c_minus < a.min_c_minus) {
        a.min_c_minus = v.c_minus;
        a.x_min_c_minus = x;
      }
    } catch (const EvaluationError& err) {
      a.evaluable = false;
      a.failure_x = err.x();
      break;
    }
  }
  return a;
}

struct LadderRow {
  int n = 0;
  double Phi_plus = 0.0;
  double Phi_minus = 0.0;
  double J_plus = 0.0;
  double J_minus = 0.0;
  double J = 0.0;
  Admissibility admissibility;
};

struct LadderReport {
  std::vector<LadderRow> rows;
  double delta_J = 0.0;

  const LadderRow& row(int n) const {
    for (const auto& r : rows) {
      if (r.n == n) return r;
    }
    throw InvalidInput("ladder report has no row n=" + std::to_string(n));
  }
};

/// Rows come from the closed forms; each member is also built through the
/// transform chain for the admissibility column.
inline LadderReport ladder_report(const SolutionState& seed, int n_min, int n_max,
                                  int depth_cap = kDefaultDepthCap) {
  const auto members = ladder(seed, n_min, n_max, depth_cap);
  LadderReport report;
  report.delta_J = delta_J(seed);
  for (int n = n_min; n <= n_max; ++n) {
    const FluxPair phi = flux_ladder_closed_form(seed, n);
    const Currents j = currents(seed.params(), phi.phi_plus, phi.phi_minus);
    LadderRow row;
    row.n = n;
    row.Phi_plus = phi.phi_plus;
    row.Phi_minus = phi.phi_minus;
    row.J_plus = j.J_plus;
    row.J_minus = j.J_minus;
    row.J = j.J;
    row.admissibility = admissibility(members[static_cast<std::size_t>(n - n_min)]);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace eldiff
