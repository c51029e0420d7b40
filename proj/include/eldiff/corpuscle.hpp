#pragma once

/// Lattice random walk of the field-free Planck state. Walkers hop +-dx every
/// dt = dx^2 / (2D) with no drift; the two boundary sites are reservoirs
/// pinned to occupancies proportional to c_left and c_right. The net signed
/// flow across a measuring plane estimates the diffusive flux
/// D (c_left - c_right) / delta.
///
/// RNG: std::mt19937_64, one stream per batch, seeded with
/// std::seed_seq{seed_lo32, seed_hi32, batch_index, purpose}. Both algorithms
/// are fixed by the standard, and Binomial(n, 1/2) splits are popcounts of
/// raw 64-bit draws, so results do not depend on platform or thread count.

#include <bit>
#include <cmath>
#include <cstdint>
#include <future>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eldiff/core.hpp"
#include "eldiff/planck.hpp"

namespace eldiff {

struct WalkConfig {
  PhysicalParams params;
  double c_left = 2.0;
  double c_right = 1.0;
  int cells = 20;
  /// Pinned occupancy of the denser reservoir site.
  std::int64_t walkers_per_cell_scale = 1000;
  /// Total simulated time per batch, in units of tau = delta^2 / (2D).
  double duration = 40.0;
  double burn_in = 5.0;
  int batches = 10;
  std::uint64_t rng_seed = 42;
  /// Position of the counting plane; defaults to delta / 2.
  std::optional<double> measure_plane;

  static WalkConfig from_planck(const PlanckSeedSpec& spec) {
    spec.validate();
    WalkConfig cfg;
    cfg.params = spec.params;
    cfg.c_left = spec.c0;
    cfg.c_right = spec.c1;
    return cfg;
  }

  double lattice_step() const { return params.delta / cells; }
  double diffusion() const { return params.D_plus; }
  double tau() const { return params.delta * params.delta / (2.0 * diffusion()); }
  double time_step() const { return lattice_step() * lattice_step() / (2.0 * diffusion()); }
  double plane() const { return measure_plane.value_or(0.5 * params.delta); }

  void validate() const {
    params.validate();
    if (!params.equal_diffusion()) {
      throw InvalidInput("random walk needs D_plus == D_minus");
    }
    if (!(c_left > 0.0) || !(c_right > 0.0) || !std::isfinite(c_left) ||
        !std::isfinite(c_right)) {
      throw InvalidInput("reservoir concentrations must be finite and > 0");
    }
    if (cells < 20) throw InvalidInput("lattice needs at least 20 cells across the slab");
    if (walkers_per_cell_scale < 1000) {
      throw InvalidInput("walkers_per_cell_scale must be >= 1000");
    }
    if (walkers_per_cell_scale > 100'000'000 ||
        static_cast<double>(walkers_per_cell_scale) * (cells + 1) > 1e12) {
      throw InvalidInput("occupancy overflow: walkers_per_cell_scale too large");
    }
    if (!(burn_in >= 0.0)) throw InvalidInput("burn-in must be >= 0");
    if (!(duration > burn_in)) {
      throw InvalidInput("burn-in (" + std::to_string(burn_in) +
                         " tau) is not shorter than duration (" +
                         std::to_string(duration) + " tau)");
    }
    if (!(duration >= 10.0)) throw InvalidInput("duration must be at least 10 tau");
    if (batches < 10) throw InvalidInput("at least 10 batches are required");
    const double x = plane();
    if (!(x > 0.0 && x < params.delta)) {
      throw InvalidInput("measure plane must lie strictly inside the slab");
    }
  }
};

struct WalkResult {
  double flux_estimate = 0.0;
  double standard_error = 0.0;
  double analytic_flux = 0.0;
  double z_score = 0.0;
  std::optional<double> crossings_per_Atau;
  std::optional<double> crossings_per_Atau_stderr;
  std::uint64_t rng_seed = 0;
  int batches = 0;
  std::uint64_t walker_steps_per_batch = 0;  // smallest over batches
  std::vector<double> batch_fluxes;
  // time-averaged interior concentration per lattice site
  std::vector<double> profile_x;
  std::vector<double> profile_mean;
  std::vector<double> profile_stderr;
};

namespace detail {

inline std::mt19937_64 batch_stream(std::uint64_t seed, int batch, std::uint32_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch), purpose};
  return std::mt19937_64(seq);
}

/// Number of `n` walkers that step right, each independently with p = 1/2.
inline std::uint64_t right_movers(std::mt19937_64& gen, std::uint64_t n) {
  std::uint64_t count = 0;
  for (; n >= 64; n -= 64) count += static_cast<std::uint64_t>(std::popcount(gen()));
  if (n > 0) {
    const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    count += static_cast<std::uint64_t>(std::popcount(gen() & mask));
  }
  return count;
}

struct BatchOutcome {
  double flux = 0.0;
  std::uint64_t walker_steps = 0;
  std::vector<double> occupancy;  // mean concentration at interior sites
};

inline BatchOutcome run_flux_batch(const WalkConfig& cfg, int batch) {
  auto gen = batch_stream(cfg.rng_seed, batch, 1);
  const auto N = static_cast<std::size_t>(cfg.cells);
  const double per_conc =
      static_cast<double>(cfg.walkers_per_cell_scale) / std::max(cfg.c_left, cfg.c_right);
  const auto pinned_left = static_cast<std::uint64_t>(std::llround(per_conc * cfg.c_left));
  const auto pinned_right = static_cast<std::uint64_t>(std::llround(per_conc * cfg.c_right));

  const auto steps_per_tau = static_cast<std::uint64_t>(cfg.cells) * cfg.cells;
  const auto total = static_cast<std::uint64_t>(std::llround(cfg.duration * steps_per_tau));
  const auto burn = static_cast<std::uint64_t>(std::llround(cfg.burn_in * steps_per_tau));
  const double dx = cfg.lattice_step();
  const std::size_t bond =
      std::min(static_cast<std::size_t>(std::floor(cfg.plane() / dx)), N - 1);

  std::vector<std::uint64_t> occ(N + 1, 0), right(N + 1, 0), left(N + 1, 0);
  occ[0] = pinned_left;
  occ[N] = pinned_right;
  std::vector<double> occ_sum(N - 1, 0.0);
  std::int64_t net = 0;
  BatchOutcome out;

  for (std::uint64_t step = 0; step < total; ++step) {
    for (std::size_t i = 0; i <= N; ++i) {
      right[i] = right_movers(gen, occ[i]);
      left[i] = occ[i] - right[i];
      out.walker_steps += occ[i];
    }
    const bool measuring = step >= burn;
    if (measuring) {
      net += static_cast<std::int64_t>(right[bond]) - static_cast<std::int64_t>(left[bond + 1]);
    }
    for (std::size_t i = 1; i < N; ++i) occ[i] = right[i - 1] + left[i + 1];
    occ[0] = pinned_left;
    occ[N] = pinned_right;
    if (measuring) {
      for (std::size_t i = 1; i < N; ++i) occ_sum[i - 1] += static_cast<double>(occ[i]);
    }
  }
  const double measured = static_cast<double>(total - burn);
  out.flux = static_cast<double>(net) * dx / (per_conc * measured * cfg.time_step());
  out.occupancy.resize(N - 1);
  for (std::size_t i = 0; i + 1 < N; ++i) out.occupancy[i] = occ_sum[i] / measured / per_conc;
  return out;
}

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double standard_error_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace detail

/// Batches run concurrently; the reduction walks them in index order.
inline WalkResult simulate_flux(const WalkConfig& cfg) {
  cfg.validate();
  std::vector<std::future<detail::BatchOutcome>> jobs;
  for (int b = 0; b < cfg.batches; ++b) {
    jobs.push_back(std::async(std::launch::async, detail::run_flux_batch, std::cref(cfg), b));
  }
  std::vector<detail::BatchOutcome> outcomes;
  for (auto& j : jobs) outcomes.push_back(j.get());

  WalkResult r;
  r.rng_seed = cfg.rng_seed;
  r.batches = cfg.batches;
  r.walker_steps_per_batch = outcomes.front().walker_steps;
  for (const auto& o : outcomes) {
    r.batch_fluxes.push_back(o.flux);
    r.walker_steps_per_batch = std::min(r.walker_steps_per_batch, o.walker_steps);
  }
  r.flux_estimate = detail::mean_of(r.batch_fluxes);
  r.standard_error = detail::standard_error_of(r.batch_fluxes);
  r.analytic_flux = cfg.diffusion() * (cfg.c_left - cfg.c_right) / cfg.params.delta;
  r.z_score = (r.flux_estimate - r.analytic_flux) / r.standard_error;

  if (cfg.c_left > cfg.c_right) {
    const PlanckSeedSpec spec{cfg.c_left, cfg.c_right, cfg.params};
    const double Atau = crossing_area(spec) * crossing_time(cfg.params);
    r.crossings_per_Atau = r.flux_estimate * Atau;
    r.crossings_per_Atau_stderr = r.standard_error * Atau;
  }

  const std::size_t sites = outcomes.front().occupancy.size();
  std::vector<double> column(outcomes.size());
  for (std::size_t i = 0; i < sites; ++i) {
    for (std::size_t b = 0; b < outcomes.size(); ++b) column[b] = outcomes[b].occupancy[i];
    r.profile_x.push_back(cfg.lattice_step() * static_cast<double>(i + 1));
    r.profile_mean.push_back(detail::mean_of(column));
    r.profile_stderr.push_back(detail::standard_error_of(column));
  }
  return r;
}

enum class CrossingBoundary {
  ReflectAbsorb,   // released at x = 0 (reflecting), absorbed at x = delta
  TwoSidedAbsorb,  // released at the middle site, absorbed at either face
};

struct CrossingTimeResult {
  CrossingBoundary boundary = CrossingBoundary::ReflectAbsorb;
  double release_x = 0.0;
  double mean_time = 0.0;
  double standard_error = 0.0;
  double tau = 0.0;
  double ratio = 0.0;  // mean_time / tau
  double ratio_stderr = 0.0;
  std::int64_t walkers = 0;
};

/// Mean first-passage time of single walkers across the lattice of `cfg`.
/// The ratio to tau = delta^2/(2D) is reported, not asserted.
inline CrossingTimeResult crossing_time_estimate(const WalkConfig& cfg,
                                                 CrossingBoundary boundary,
                                                 std::int64_t walkers = 10'000) {
  cfg.validate();
  if (walkers < 1000) throw InvalidInput("walker budget too small (need >= 1000)");
  const int N = cfg.cells;
  const int start = boundary == CrossingBoundary::ReflectAbsorb ? 0 : N / 2;

  auto run = [&cfg, N, start, boundary](int batch, std::int64_t count) {
    auto gen = detail::batch_stream(cfg.rng_seed, batch, 2);
    std::vector<double> steps;
    steps.reserve(static_cast<std::size_t>(count));
    std::uint64_t bits = 0;
    int left_in_buffer = 0;
    for (std::int64_t w = 0; w < count; ++w) {
      int pos = start;
      std::uint64_t t = 0;
      while (true) {
        if (pos == 0 && boundary == CrossingBoundary::ReflectAbsorb) {
          pos = 1;
        } else {
          if (left_in_buffer == 0) {
            bits = gen();
            left_in_buffer = 64;
          }
          pos += (bits & 1u) ? 1 : -1;
          bits >>= 1;
          --left_in_buffer;
        }
        ++t;
        if (pos == N) break;
        if (pos == 0 && boundary == CrossingBoundary::TwoSidedAbsorb) break;
      }
      steps.push_back(static_cast<double>(t));
    }
    return steps;
  };

  std::vector<std::future<std::vector<double>>> jobs;
  for (int b = 0; b < cfg.batches; ++b) {
    const std::int64_t count = walkers / cfg.batches + (b < walkers % cfg.batches ? 1 : 0);
    jobs.push_back(std::async(std::launch::async, run, b, count));
  }
  std::vector<double> all;
  for (auto& j : jobs) {
    const auto part = j.get();
    all.insert(all.end(), part.begin(), part.end());
  }

  CrossingTimeResult r;
  r.boundary = boundary;
  r.release_x = cfg.lattice_step() * start;
  r.walkers = walkers;
  r.tau = cfg.tau();
  r.mean_time = detail::mean_of(all) * cfg.time_step();
  r.standard_error = detail::standard_error_of(all) * cfg.time_step();
  r.ratio = r.mean_time / r.tau;
  r.ratio_stderr = r.standard_error / r.tau;
  return r;
}

}  // namespace eldiff
