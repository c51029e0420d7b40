#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "eldiff/backlund.hpp"
#include "eldiff/planck.hpp"
#include "eldiff/verify.hpp"
#include "oracles.hpp"

using namespace eldiff;

namespace {

SolutionState canonical_seed() { return make_planck_seed(canonical_preset().spec); }

SolutionState with_field_scaled(const SolutionState& s, double factor) {
  ProfileFunction inner = s.profile();
  ProfileFunction f = [inner, factor](long double x) {
    auto v = inner(x);
    v.E *= factor;
    return v;
  };
  return SolutionState(s.params(), f, s.phi_plus(), s.phi_minus(), s.reference_concentration());
}

}  // namespace

TEST(Differentiate, LinearIsExact) {
  const auto f = [](double x) { return 3.0 * x - 1.0; };
  EXPECT_NEAR(differentiate(f, 0.4, 1e-2), 3.0, 1e-13);
}

TEST(Differentiate, Cubic) {
  const auto f = [](double x) { return x * x * x; };
  EXPECT_NEAR(differentiate(f, 0.5, 1e-2), 0.75, 1e-10);
}

TEST(Differentiate, ConstantGivesZero) {
  const auto f = [](double) { return 7.25; };
  EXPECT_EQ(differentiate(f, 0.3, 1e-3), 0.0);
}

TEST(Differentiate, RejectsBadSteps) {
  const auto f = [](double x) { return x; };
  EXPECT_THROW(differentiate(f, 0.5, 0.0), InvalidInput);
  EXPECT_THROW(differentiate(f, 0.5, -1e-3), InvalidInput);
  EXPECT_THROW(differentiate(f, 0.5, 1e-20), InvalidInput);
}

TEST(Differentiate, FourthOrderConvergence) {
  const auto f = [](double x) { return std::sin(3.0 * x); };
  const double exact = 3.0 * std::cos(3.0 * 0.7);
  const double hs[] = {4e-2, 2e-2, 1e-2};
  double err[3];
  for (int i = 0; i < 3; ++i) err[i] = std::abs(differentiate(f, 0.7, hs[i]) - exact);
  for (int i = 0; i + 1 < 3; ++i) {
    const double order = std::log(err[i] / err[i + 1]) / std::log(2.0);
    EXPECT_GE(order, 3.5) << "h=" << hs[i];
  }
}

TEST(DifferentiateExtrapolated, ReachesNearMachinePrecision) {
  const auto f = [](double x) { return std::exp(2.0 * x); };
  const DerivativeEstimate d = differentiate_extrapolated(f, 0.3, 0.05);
  EXPECT_NEAR(d.value, 2.0 * std::exp(0.6), 1e-12);
  EXPECT_LT(d.error, 1e-10);
}

TEST(ResidualCheck, PlanckSeedIsExact) {
  const ResidualReport r = residual_check(canonical_seed(), 101, 1e-8);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.max_abs(), 1e-12);
  EXPECT_EQ(r.grid.size(), 99u);
  EXPECT_EQ(r.norms[0].id, "c_plus");
  EXPECT_EQ(r.norms[2].id, "field");
}

TEST(ResidualCheck, FirstMemberPasses) {
  const ResidualReport r = residual_check(apply_B(canonical_seed()), 101, 1e-8);
  EXPECT_TRUE(r.pass) << r.max_abs();
}

TEST(ResidualCheck, CorruptedFieldFailsInFieldEquation) {
  const SolutionState bad = with_field_scaled(apply_B(canonical_seed()), 1.01);
  const ResidualReport r = residual_check(bad, 101, 1e-8);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.norms[2].max_abs, 1e-3);
}

TEST(ResidualCheck, PerturbedFluxFails) {
  const SolutionState s1 = apply_B(canonical_seed());
  const SolutionState bad = s1.with_fluxes(s1.phi_plus() * (1.0 + 1e-3), s1.phi_minus());
  const ResidualReport r = residual_check(bad, 101, 1e-6);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.norms[0].max_abs, 1e-6);
}

TEST(ResidualCheck, ZeroToleranceFails) {
  EXPECT_FALSE(residual_check(apply_B(canonical_seed()), 101, 0.0).pass);
}

TEST(ResidualCheck, CoarseGridRejected) {
  EXPECT_THROW(residual_check(canonical_seed(), 10, 1e-8), InvalidInput);
  EXPECT_THROW(residual_check(canonical_seed(), 101, -1.0), InvalidInput);
}

TEST(ResidualCheck, NonFiniteResidualFails) {
  // Values near DBL_MAX make the drift product overflow.
  const SolutionState s = SolutionState::from_profiles(
      PhysicalParams::canonical(), [](double) { return 1e300; }, [](double) { return 1.0; },
      [](double) { return 1e300; }, 0.0, 0.0, 1.0);
  const ResidualReport r = residual_check(s, 21, 1e-8);
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.failure_x.has_value());
  EXPECT_GT(*r.failure_x, 0.0);
}

TEST(ResidualCheck, RegularLadderMembersPass) {
  const SolutionState seed = canonical_seed();
  for (int n : {-5, -2, -1, 1, 2, 5}) {
    const ResidualReport r = residual_check(ladder_member(seed, n), 101, 1e-8);
    EXPECT_TRUE(r.pass) << "n=" << n << " max residual " << r.max_abs();
  }
}

TEST(ResidualCheck, MembersWithInteriorPoleAreFlaggedNearThePole) {
  // c+(2) of the canonical ladder vanishes at x* = 0.80460 (root of
  // c^6 + 10 c^3 - 20 with c = 2 - x); members 3 and 4 inherit a pole there.
  const SolutionState seed = canonical_seed();
  for (int n : {3, 4, -3, -4}) {
    const ResidualReport r = residual_check(ladder_member(seed, n), 101, 1e-8);
    EXPECT_FALSE(r.pass) << "n=" << n;
    const EquationNorm& worst = *std::max_element(
        r.norms.begin(), r.norms.end(),
        [](const EquationNorm& a, const EquationNorm& b) { return a.max_abs < b.max_abs; });
    EXPECT_NEAR(worst.x_at_max, 0.80, 0.011) << "n=" << n;
  }
}

TEST(ResidualCheck, AqueousFirstMemberPasses) {
  const SolutionState s1 = apply_B(make_planck_seed(aqueous_cgs_preset().spec));
  const ResidualReport r = residual_check(s1, 101, 1e-8);
  EXPECT_TRUE(r.pass) << r.max_abs();
}

TEST(ResidualCheck, DimensionlessFormOfASolutionIsASolution) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int accepted = 0;
  while (accepted < 5) {
    PlanckSeedSpec spec;
    spec.params = oracle::random_params(gen, 1e-2, 1e2);
    spec.c0 = oracle::log_uniform(gen, 1e-2, 1e2);
    spec.c1 = spec.c0 * (0.5 + 0.4 * u(gen));
    // An absolute 1e-8 residual is only meaningful while the dimensionless
    // profiles stay O(1); a large third term inflates c+ by orders of magnitude.
    if (third_term_magnitude(spec) > 10.0) continue;
    ++accepted;
    const SolutionState s1 = apply_B(make_planck_seed(spec));
    const SolutionState d = nondimensionalize(s1, Scaling(spec.params, spec.c0));
    EXPECT_TRUE(residual_check(d, 51, 1e-8).pass);
  }
}

TEST(RoundtripCheck, PlanckSeed) {
  const RoundtripResult r = roundtrip_check(canonical_seed(), 1000, 1e-12);
  EXPECT_TRUE(r.pass) << r.max_deviation << " " << r.worst_component;
}

TEST(RoundtripCheck, NonSolutionSeedStillCloses) {
  PhysicalParams p;
  const SolutionState s = SolutionState::from_profiles(
      p, [](double x) { return 2.0 + 0.5 * std::sin(4.0 * x); }, [](double) { return 3.0; },
      [](double) { return 0.7; }, 0.3, -1.2, 2.0);
  EXPECT_TRUE(roundtrip_check(s, 1000, 1e-12).pass);
}

TEST(RoundtripCheck, DepthFive) {
  const RoundtripResult r = roundtrip_check(canonical_seed(), 200, 1e-10, 5);
  EXPECT_TRUE(r.pass) << r.max_deviation << " " << r.worst_component << " at " << r.worst_x;
}

TEST(RoundtripCheck, RequiresPositiveState) {
  const SolutionState s = SolutionState::from_profiles(
      PhysicalParams::canonical(), [](double x) { return 1.0 - 2.0 * x; },
      [](double) { return 1.0; }, [](double) { return 0.0; }, 1.0, 1.0, 1.0);
  EXPECT_THROW(roundtrip_check(s, 100, 1e-12), InvalidInput);
}

TEST(RoundtripCheck, RandomSyntheticSeeds) {
  std::mt19937_64 gen(2718);
  for (int trial = 0; trial < 20; ++trial) {
    const RoundtripResult r = roundtrip_check(oracle::random_synthetic_state(gen), 1000, 1e-12);
    EXPECT_TRUE(r.pass) << "trial " << trial << ": " << r.max_deviation;
  }
}
