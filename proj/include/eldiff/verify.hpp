#pragma once

/// Independent numerical verification of solution states: residuals of the
/// governing system from finite differences of the profiles, and round trips
/// through the forward/inverse transforms.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "eldiff/backlund.hpp"
#include "eldiff/core.hpp"

namespace eldiff {

/// Richardson-extrapolated central difference (4 D(h/2) - D(h)) / 3 with
/// D(h) = (f(x+h) - f(x-h)) / 2h. O(h^4) for smooth f.
/// `length_scale` sets the step-underflow floor 1e3 * eps * max(|x|, scale).
inline double differentiate(const std::function<double(double)>& f, double x,
                            double h, double length_scale = 1.0) {
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() *
                       std::max(std::abs(x), length_scale);
  if (!(h > 0.0)) throw InvalidInput("differentiation step must be > 0");
  if (h < floor) throw InvalidInput("differentiation step underflow");
  auto central = [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };
  const double coarse = central(h);
  const double fine = central(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

struct DerivativeEstimate {
  double value = 0.0;
  double error = std::numeric_limits<double>::infinity();
};

/// Iterated Richardson extrapolation of central differences (Ridders'
/// tableau), applied to K components sharing one set of evaluations. The
/// step starts at h0 and shrinks by `shrink` per level; each component keeps
/// the tableau entry with the smallest error estimate and stops once the
/// diagonal starts to diverge.
template <std::size_t K>
std::array<DerivativeEstimate, K> differentiate_extrapolated(
    const std::function<std::array<double, K>(double)>& f, double x, double h0,
    int levels = 10, double shrink = 1.4) {
  if (!(h0 > 0.0)) throw InvalidInput("differentiation step must be > 0");
  if (levels < 2) throw InvalidInput("extrapolation needs at least 2 levels");
  const double shrink2 = shrink * shrink;
  const auto L = static_cast<std::size_t>(levels);

  std::array<DerivativeEstimate, K> best{};
  std::array<bool, K> active{};
  active.fill(true);
  // tableau[k][j][i]: component k, extrapolation order j, step level i
  std::vector<std::vector<std::vector<double>>> tableau(
      K, std::vector<std::vector<double>>(L, std::vector<double>(L, 0.0)));

  double h = h0;
  auto central = [&](double step) {
    const auto up = f(x + step);
    const auto dn = f(x - step);
    std::array<double, K> d{};
    for (std::size_t k = 0; k < K; ++k) d[k] = (up[k] - dn[k]) / (2.0 * step);
    return d;
  };
  {
    const auto d = central(h);
    for (std::size_t k = 0; k < K; ++k) {
      tableau[k][0][0] = d[k];
      best[k].value = d[k];
    }
  }
  for (std::size_t i = 1; i < L; ++i) {
    bool any = false;
    for (std::size_t k = 0; k < K; ++k) any = any || active[k];
    if (!any) break;
    h /= shrink;
    const auto d = central(h);
    for (std::size_t k = 0; k < K; ++k) {
      if (!active[k]) continue;
      auto& a = tableau[k];
      a[0][i] = d[k];
      double fac = shrink2;
      for (std::size_t j = 1; j <= i; ++j) {
        a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
        fac *= shrink2;
        const double err = std::max(std::abs(a[j][i] - a[j - 1][i]),
                                    std::abs(a[j][i] - a[j - 1][i - 1]));
        if (err <= best[k].error) {
          best[k].error = err;
          best[k].value = a[j][i];
        }
      }
      if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0 * best[k].error) active[k] = false;
    }
  }
  return best;
}

inline DerivativeEstimate differentiate_extrapolated(const std::function<double(double)>& f,
                                                     double x, double h0, int levels = 10,
                                                     double shrink = 1.4) {
  std::function<std::array<double, 1>(double)> g = [&f](double t) {
    return std::array<double, 1>{f(t)};
  };
  return differentiate_extrapolated<1>(g, x, h0, levels, shrink)[0];
}

struct EquationNorm {
  std::string id;
  double max_abs = 0.0;
  double rms = 0.0;
  double x_at_max = 0.0;
};

/// Residuals of the three equations in dimensionless form:
///   r1 = c~+' - E~ c~+ + Phi~+
///   r2 = c~-' + E~ c~- + Phi~-
///   r3 = E~' - nu (c~+ - c~-)
struct ResidualReport {
  std::vector<double> grid;  // dimensional x of each residual sample
  std::vector<double> r1;
  std::vector<double> r2;
  std::vector<double> r3;
  std::array<EquationNorm, 3> norms{};
  double tol = 0.0;
  bool pass = false;
  std::optional<double> failure_x;  // first x with a non-finite residual

  double max_abs() const {
    return std::max({norms[0].max_abs, norms[1].max_abs, norms[2].max_abs});
  }
};

struct ResidualOptions {
  /// Initial finite-difference step in units of delta; 0 selects 1/(10 M).
  double initial_step = 0.0;
  int extrapolation_levels = 10;
};

/// Checks the state on the interior points of an M-point uniform grid
/// (the system holds on the open interval). pass <=> every max-abs residual
/// is below tol and all residuals are finite.
inline ResidualReport residual_check(const SolutionState& s, int grid_points, double tol,
                                     ResidualOptions opts = {}) {
  if (grid_points < 11) throw InvalidInput("residual check needs at least 11 grid points");
  if (!(tol >= 0.0)) throw InvalidInput("tolerance must be >= 0");

  const Scaling sc(s.params(), s.reference_concentration());
  const SolutionState ds = nondimensionalize(s, sc);
  const double nu = sc.coupling();
  const double phi_p = ds.phi_plus();
  const double phi_m = ds.phi_minus();
  const double h_default =
      opts.initial_step > 0.0 ? opts.initial_step : 1.0 / (10.0 * grid_points);

  std::function<std::array<double, 3>(double)> f = [&ds](double x) {
    const auto v = ds.evaluate(x);
    return std::array<double, 3>{v.c_plus, v.c_minus, v.E};
  };

  ResidualReport rep;
  rep.tol = tol;
  rep.norms[0].id = "c_plus";
  rep.norms[1].id = "c_minus";
  rep.norms[2].id = "field";
  const auto grid = uniform_grid(1.0, grid_points);
  std::array<double, 3> sumsq{};
  bool finite = true;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double x = grid[i];
    const double h = std::min(h_default, 0.5 * std::min(x, 1.0 - x));
    // The algebraic terms are formed in extended precision: for large nu the
    // charge density c+ - c- is a small difference of O(1) numbers.
    const auto v = ds.evaluate_extended(x);
    const auto d = differentiate_extrapolated<3>(f, x, h, opts.extrapolation_levels);
    const std::array<double, 3> r{
        static_cast<double>(d[0].value - v.E * v.c_plus + phi_p),
        static_cast<double>(d[1].value + v.E * v.c_minus + phi_m),
        static_cast<double>(d[2].value - static_cast<long double>(nu) * (v.c_plus - v.c_minus))};
    rep.grid.push_back(sc.to_dimensional(FieldKind::Length, x));
    rep.r1.push_back(r[0]);
    rep.r2.push_back(r[1]);
    rep.r3.push_back(r[2]);
    for (std::size_t k = 0; k < 3; ++k) {
      if (!std::isfinite(r[k])) {
        if (finite) rep.failure_x = rep.grid.back();
        finite = false;
        continue;
      }
      sumsq[k] += r[k] * r[k];
      if (std::abs(r[k]) > rep.norms[k].max_abs) {
        rep.norms[k].max_abs = std::abs(r[k]);
        rep.norms[k].x_at_max = rep.grid.back();
      }
    }
  }
  const double count = static_cast<double>(rep.grid.size());
  for (std::size_t k = 0; k < 3; ++k) rep.norms[k].rms = std::sqrt(sumsq[k] / count);
  rep.pass = finite && rep.norms[0].max_abs < tol && rep.norms[1].max_abs < tol &&
             rep.norms[2].max_abs < tol;
  return rep;
}

struct RoundtripResult {
  double max_deviation = 0.0;
  std::string worst_component;
  double worst_x = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Compares B^-d(B^d(s)) and B^d(B^-d(s)) with s on `samples` uniform points.
/// Deviations are relative: |a - b| / max(|b|, natural scale), the natural
/// scales being c_ref, kT/(z e delta) and D+- c_ref / delta.
inline RoundtripResult roundtrip_check(const SolutionState& s, int samples, double tol,
                                       int depth = 1) {
  if (samples < 2) throw InvalidInput("round trip needs at least 2 samples");
  if (depth < 1) throw InvalidInput("round trip depth must be >= 1");
  const auto xs = uniform_grid(s.params().delta, samples);
  for (double x : xs) {
    const auto v = s.evaluate(x);
    if (!(v.c_plus > 0.0) || !(v.c_minus > 0.0)) {
      throw InvalidInput("round trip needs positive concentrations; violated at x=" +
                         detail::fmt17(x));
    }
  }

  SolutionState fwd = s;
  SolutionState bwd = s;
  for (int i = 0; i < depth; ++i) {
    fwd = apply_B(fwd);
    bwd = apply_B_inverse(bwd);
  }
  for (int i = 0; i < depth; ++i) {
    fwd = apply_B_inverse(fwd);
    bwd = apply_B(bwd);
  }

  const Scaling sc(s.params(), s.reference_concentration());
  RoundtripResult res;
  res.tol = tol;
  auto track = [&res](double a, double b, double scale, const char* what, double x) {
    const double dev = std::abs(a - b) / std::max(std::abs(b), scale);
    if (!(dev <= res.max_deviation)) {
      res.max_deviation = dev;
      res.worst_component = what;
      res.worst_x = x;
    }
  };
  for (const SolutionState* back : {&fwd, &bwd}) {
    track(back->phi_plus(), s.phi_plus(), sc.flux_plus_scale(), "Phi_plus", 0.0);
    track(back->phi_minus(), s.phi_minus(), sc.flux_minus_scale(), "Phi_minus", 0.0);
    for (double x : xs) {
      const auto a = back->evaluate(x);
      const auto b = s.evaluate(x);
      track(a.c_plus, b.c_plus, sc.c_scale(), "c_plus", x);
      track(a.c_minus, b.c_minus, sc.c_scale(), "c_minus", x);
      track(a.E, b.E, sc.E_scale(), "E", x);
    }
  }
  res.pass = res.max_deviation < tol;
  return res;
}

}  // namespace eldiff
