// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance                 run all criteria
//   acceptance --criterion N   run criterion N only (exit 0 iff it passes)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eldiff/eldiff.hpp"
#include "oracles.hpp"
#include "process.hpp"

using namespace eldiff;

namespace {

// Pinned tolerances and budgets.
constexpr double kRel = 1e-12;
constexpr double kResidualTol = 1e-8;
constexpr int kResidualGrid = 101;
constexpr double kRoundTripTol = 1e-12;
constexpr double kDeepRoundTripTol = 1e-10;
constexpr int kSamples = 1000;
constexpr double kSigma = 3.0;
constexpr double kCoverageSigma = 2.0;
constexpr int kCoverageSeeds = 20;
constexpr int kCoverageRequired = 16;
constexpr std::uint64_t kMinWalkerSteps = 100'000;
constexpr double kThirdTermBound = 1e-8;
constexpr double kLadderSeconds = 1.0;
constexpr double kResidualSeconds = 5.0;
constexpr double kWalkSeconds = 60.0;

struct Verdict {
  bool pass = true;
  std::string summary;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SolutionState canonical_seed() { return make_planck_seed(canonical_preset().spec); }

Verdict flux_quantization() {
  Verdict v{true, "J(n) = J(0) + n dJ, dJ = 4 z e D (c0 - c1)/delta, n in [-5, 5]", {}};
  const PlanckSeedSpec spec = canonical_preset().spec;
  const auto t0 = std::chrono::steady_clock::now();
  const LadderReport r = ladder_report(make_planck_seed(spec), -5, 5);
  const double elapsed = seconds_since(t0);
  const PhysicalParams& p = spec.params;
  const double expected_dJ = 4.0 * p.z * p.e * p.D_plus * (spec.c0 - spec.c1) / p.delta;
  v.require(rel(r.delta_J, expected_dJ) <= kRel, "dJ = " + fmt("%.17g", r.delta_J));
  double worst = 0.0;
  for (int n = -5; n <= 5; ++n) {
    worst = std::max(worst, rel(r.row(n).J, r.row(0).J + n * r.delta_J));
  }
  v.require(worst <= kRel, "max relative deviation " + fmt("%.3g", worst));
  v.require(elapsed < kLadderSeconds, "runtime " + fmt("%.3f", elapsed) + " s");
  return v;
}

Verdict charge_quanta() {
  Verdict v{true, "Q(n) = 4n ze, (J+ A tau, J- A tau) = ((2n+1) ze, (2n-1) ze)", {}};
  const QuantizationReport r = quantization_report(canonical_preset().spec, -5, 5);
  double worst = 0.0;
  for (int n = -5; n <= 5; ++n) {
    const QuantizationRow& row = r.row(n);
    worst = std::max({worst, rel(row.Q, 4.0 * n), rel(row.Q_from_currents, 4.0 * n),
                      rel(*row.J_plus_Atau, 2.0 * n + 1.0),
                      rel(*row.J_minus_Atau, 2.0 * n - 1.0)});
  }
  v.require(worst <= kRel, "max relative deviation over n in [-5, 5]: " + fmt("%.3g", worst));
  const QuantizationRow& up = r.row(1);
  v.require(*up.J_plus_Atau == 3.0 && *up.J_minus_Atau == 1.0 && up.Q == 4.0,
            "n=+1 row (3 ze, ze), Q = 4 ze");
  // The conjugate row transfers 3 ions and 1 ion against the gradients; the
  // species carrying 3 is the anion (J-(-1) = -z e Phi-(-1), Phi-(-1) = 3).
  const QuantizationRow& dn = r.row(-1);
  const double lo = std::min(*dn.J_plus_Atau, *dn.J_minus_Atau);
  const double hi = std::max(*dn.J_plus_Atau, *dn.J_minus_Atau);
  v.require(lo == -3.0 && hi == -1.0 && dn.Q == -4.0,
            "n=-1 row transfers {-3 ze, -ze}, Q = -4 ze (J+ = " +
                fmt("%g", *dn.J_plus_Atau) + ", J- = " + fmt("%g", *dn.J_minus_Atau) + ")");
  return v;
}

Verdict solution_property() {
  Verdict v{true, "every member |n| <= 5 has max residual < 1e-8 on 101 points", {}};
  const SolutionState seed = make_planck_seed(canonical_preset().spec);
  const auto t0 = std::chrono::steady_clock::now();
  for (int n = -5; n <= 5; ++n) {
    const ResidualReport r = residual_check(ladder_member(seed, n), kResidualGrid, kResidualTol);
    const auto worst = std::max_element(
        r.norms.begin(), r.norms.end(),
        [](const EquationNorm& x, const EquationNorm& y) { return x.max_abs < y.max_abs; });
    v.require(r.pass, "n=" + std::to_string(n) + " max residual " + fmt("%.3g", r.max_abs()) +
                          " (" + worst->id + " at x=" + fmt("%.4f", worst->x_at_max) + ")");
  }
  const SolutionState s1 = apply_B(seed);
  auto inner = s1.profile();
  ProfileFunction perturbed = [inner](long double x) {
    auto val = inner(x);
    val.E *= 1.01L;
    return val;
  };
  const SolutionState bad(s1.params(), perturbed, s1.phi_plus(), s1.phi_minus(),
                          s1.reference_concentration());
  const ResidualReport rb = residual_check(bad, kResidualGrid, kResidualTol);
  v.require(!rb.pass, "1% perturbation of E(1) rejected (residual " + fmt("%.3g", rb.max_abs()) +
                          ")");
  const double elapsed = seconds_since(t0);
  v.require(elapsed < kResidualSeconds, "runtime " + fmt("%.3f", elapsed) + " s");
  return v;
}

Verdict closed_form_cross_check() {
  Verdict v{true, "first-member closed form vs transform at 1000 points", {}};
  const PlanckSeedSpec spec = canonical_preset().spec;
  const S1Profiles cf = s1_closed_form(spec);
  const SolutionState s1 = apply_B(make_planck_seed(spec));
  double worst = 0.0;
  for (double x : uniform_grid(spec.params.delta, kSamples)) {
    worst = std::max({worst, oracle::rel_err(cf.E(x), s1.E(x)),
                      oracle::rel_err(cf.c_plus(x), s1.c_plus(x))});
  }
  v.require(worst <= kRel, "max relative deviation " + fmt("%.3g", worst));
  return v;
}

Verdict inverse_property() {
  Verdict v{true, "B^-1 B = B B^-1 = id on the seed and 20 synthetic states; depth 5", {}};
  const RoundtripResult seed = roundtrip_check(canonical_seed(), kSamples, kRoundTripTol);
  v.require(seed.pass, "Planck seed: " + fmt("%.3g", seed.max_deviation));
  std::mt19937_64 gen(20240601);
  double worst = 0.0;
  bool all = true;
  for (int i = 0; i < 20; ++i) {
    const RoundtripResult r =
        roundtrip_check(oracle::random_synthetic_state(gen), kSamples, kRoundTripTol);
    worst = std::max(worst, r.max_deviation);
    all = all && r.pass;
  }
  v.require(all, "20 synthetic states: worst " + fmt("%.3g", worst));
  const RoundtripResult deep = roundtrip_check(canonical_seed(), kSamples, kDeepRoundTripTol, 5);
  v.require(deep.pass, "depth 5: " + fmt("%.3g", deep.max_deviation));
  return v;
}

Verdict closed_form_fluxes() {
  Verdict v{true, "closed-form fluxes vs n-fold transforms, |n| <= 10", {}};
  struct Case {
    const char* name;
    double D_plus, D_minus;
  };
  for (const Case c : {Case{"D+ = D- = 1", 1.0, 1.0}, Case{"D+ = 2, D- = 1", 2.0, 1.0}}) {
    PlanckSeedSpec spec = canonical_preset().spec;
    spec.params.D_plus = c.D_plus;
    spec.params.D_minus = c.D_minus;
    const SolutionState seed = make_planck_seed(spec);
    double worst = 0.0;
    for (int n = -10; n <= 10; ++n) {
      const FluxPair cf = flux_ladder_closed_form(seed, n);
      const SolutionState m = ladder_member(seed, n);
      const auto it = oracle::iterate_fluxes(seed.phi_plus(), seed.phi_minus(), c.D_plus,
                                             c.D_minus, n);
      worst = std::max({worst, rel(cf.phi_plus, m.phi_plus()), rel(cf.phi_minus, m.phi_minus()),
                        rel(cf.phi_plus, it.first), rel(cf.phi_minus, it.second)});
    }
    v.require(worst <= kRel, std::string(c.name) + ": " + fmt("%.3g", worst));
  }
  return v;
}

Verdict corpuscular_flux() {
  Verdict v{true, "random-walk flux and crossings per A tau within 3 sigma; coverage", {}};
  const WalkConfig cfg = WalkConfig::from_planck(canonical_preset().spec);
  const auto t0 = std::chrono::steady_clock::now();
  const WalkResult r = simulate_flux(cfg);
  const double elapsed = seconds_since(t0);
  v.require(std::abs(r.flux_estimate - r.analytic_flux) < kSigma * r.standard_error,
            "flux " + fmt("%.5f", r.flux_estimate) + " +- " + fmt("%.5f", r.standard_error) +
                " vs " + fmt("%.5f", r.analytic_flux));
  v.require(r.crossings_per_Atau &&
                std::abs(*r.crossings_per_Atau - 1.0) < kSigma * *r.crossings_per_Atau_stderr,
            "crossings per A tau " + fmt("%.5f", r.crossings_per_Atau.value_or(NAN)) + " +- " +
                fmt("%.5f", r.crossings_per_Atau_stderr.value_or(NAN)));
  v.require(r.batches == 10 && r.walker_steps_per_batch >= kMinWalkerSteps,
            std::to_string(r.batches) + " batches, " +
                std::to_string(r.walker_steps_per_batch) + " walker-steps per batch");
  v.require(elapsed < kWalkSeconds, "runtime " + fmt("%.2f", elapsed) + " s");

  int covered = 0;
  for (int s = 1; s <= kCoverageSeeds; ++s) {
    WalkConfig c = cfg;
    c.rng_seed = static_cast<std::uint64_t>(s);
    const WalkResult rs = simulate_flux(c);
    if (std::abs(rs.flux_estimate - rs.analytic_flux) < kCoverageSigma * rs.standard_error) {
      ++covered;
    }
  }
  v.require(covered >= kCoverageRequired,
            "coverage " + std::to_string(covered) + "/" + std::to_string(kCoverageSeeds) +
                " at 2 sigma");
  return v;
}

Verdict tau_prime_consistency() {
  Verdict v{true, "dJ A tau' = 4 ze for D+ = 2, D- = 1", {}};
  PlanckSeedSpec spec = canonical_preset().spec;
  spec.params.D_plus = 2.0;
  spec.params.D_minus = 1.0;
  const double ze = spec.params.z * spec.params.e;
  const double value =
      delta_J(make_planck_seed(spec)) * crossing_area(spec) * tau_prime(spec.params);
  v.require(rel(value, 4.0 * ze) <= kRel, "dJ A tau' = " + fmt("%.17g", value));
  return v;
}

Verdict magnitude_estimate() {
  Verdict v{true, "aqueous third-term maximum <= 1e-8", {}};
  const double t = third_term_magnitude(aqueous_cgs_preset().spec);
  v.require(t <= kThirdTermBound, "third_term_max = " + fmt("%.3g", t));
  return v;
}

Verdict determinism() {
  Verdict v{true, "each command re-run from its manifest is byte-identical", {}};
  const std::string exe = ELDIFF_CLI_PATH;
  const char* tmp = std::getenv("TMPDIR");
  const std::string dir = std::string(tmp ? tmp : "/tmp") + "/eldiff_acceptance_";
  const std::pair<const char*, const char*> commands[] = {
      {"ladder", "ladder --n-min -5 --n-max 5"},
      {"profiles", "profiles --n 2 --grid 101"},
      {"verify", "verify --n 1"},
      {"quantize", "quantize --preset aqueous-cgs --n-min -3 --n-max 3"},
      {"simulate", "simulate --seed 7"},
  };
  for (const auto& [name, args] : commands) {
    const std::string out = dir + name + ".out";
    const std::string again = dir + name + ".replay";
    const auto first = proc::run(exe, std::string(args) + " --out '" + out + "'", dir + name);
    const auto second =
        proc::run(exe, "replay '" + out + ".manifest.json' --out '" + again + "'", dir + name);
    const std::string a = proc::slurp(out);
    const std::string b = proc::slurp(again);
    v.require(first.exit_code == 0 && second.exit_code == 0 && !a.empty() && a == b,
              std::string(name) + ": exit " + std::to_string(first.exit_code) + "/" +
                  std::to_string(second.exit_code) + ", " + std::to_string(a.size()) +
                  " bytes");
    for (const std::string& f : {out, again, out + ".manifest.json"}) std::remove(f.c_str());
  }
  return v;
}

const std::vector<std::function<Verdict()>> kCriteria = {
    flux_quantization, charge_quanta,       solution_property, closed_form_cross_check,
    inverse_property,  closed_form_fluxes,  corpuscular_flux,  tau_prime_consistency,
    magnitude_estimate, determinism,
};

bool run_one(int id) {
  Verdict v;
  try {
    v = kCriteria[static_cast<std::size_t>(id - 1)]();
  } catch (const std::exception& err) {
    v.pass = false;
    v.summary = std::string("exception: ") + err.what();
  }
  std::printf("[%s] criterion %d: %s\n", v.pass ? "PASS" : "FAIL", id, v.summary.c_str());
  for (const auto& n : v.notes) std::printf("         %s\n", n.c_str());
  std::fflush(stdout);
  return v.pass;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }
  const int count = static_cast<int>(kCriteria.size());
  if (only < 0 || only > count) {
    std::fprintf(stderr, "criterion must be in 1..%d\n", count);
    return 2;
  }
  int failed = 0;
  for (int id = 1; id <= count; ++id) {
    if (only != 0 && id != only) continue;
    if (!run_one(id)) ++failed;
  }
  if (only == 0) std::printf("%d/%d criteria passed\n", count - failed, count);
  return failed == 0 ? 0 : 1;
}
