#pragma once

/// Flat JSON parameter documents and JSON forms of the reports.
///
/// Parameter documents are a single JSON object. Missing keys fall back to the
/// canonical preset; unknown keys are rejected.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>

#include "eldiff/backlund.hpp"
#include "eldiff/core.hpp"
#include "eldiff/corpuscle.hpp"
#include "eldiff/planck.hpp"
#include "eldiff/verify.hpp"
#include "json.hpp"

namespace eldiff {

using json = nlohmann::json;

namespace detail {

inline constexpr std::string_view kParamKeys[] = {"z",      "e",       "kT",   "eps",
                                                  "D_plus", "D_minus", "delta"};
inline constexpr std::string_view kSeedKeys[] = {"c0", "c1"};
inline constexpr std::string_view kWalkKeys[] = {
    "cells", "walkers_per_cell_scale", "duration", "burn_in",
    "batches", "rng_seed", "measure_plane"};

inline void reject_unknown_keys(const json& doc,
                                std::initializer_list<std::span<const std::string_view>> allowed) {
  if (!doc.is_object()) throw InvalidInput("parameter document must be a JSON object");
  for (const auto& item : doc.items()) {
    bool known = false;
    for (const auto& group : allowed) {
      for (std::string_view k : group) known = known || k == item.key();
    }
    if (!known) throw InvalidInput("unknown parameter key '" + item.key() + "'");
  }
}

inline double number_at(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  if (!v.is_number()) throw InvalidInput(std::string("parameter '") + key + "' must be a number");
  return v.get<double>();
}

inline std::int64_t integer_at(const json& doc, const char* key, std::int64_t fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
  }
  throw InvalidInput(std::string("parameter '") + key + "' must be an integer");
}

inline PhysicalParams read_params(const json& doc) {
  PhysicalParams p = PhysicalParams::canonical();
  const std::int64_t z = integer_at(doc, "z", p.z);
  if (z < 1 || z > 1000) throw InvalidInput("parameter 'z' must be an integer >= 1");
  p.z = static_cast<int>(z);
  p.e = number_at(doc, "e", p.e);
  p.kT = number_at(doc, "kT", p.kT);
  p.eps = number_at(doc, "eps", p.eps);
  p.D_plus = number_at(doc, "D_plus", p.D_plus);
  p.D_minus = number_at(doc, "D_minus", p.D_minus);
  p.delta = number_at(doc, "delta", p.delta);
  p.validate();
  return p;
}

}  // namespace detail

/// Keys: z, e, kT, eps, D_plus, D_minus, delta.
inline PhysicalParams params_from_json(const json& doc) {
  detail::reject_unknown_keys(doc, {detail::kParamKeys});
  return detail::read_params(doc);
}

/// Physical keys plus c0, c1.
inline PlanckSeedSpec planck_spec_from_json(const json& doc) {
  detail::reject_unknown_keys(doc, {detail::kParamKeys, detail::kSeedKeys});
  const PlanckSeedSpec canonical = canonical_preset().spec;
  PlanckSeedSpec spec{detail::number_at(doc, "c0", canonical.c0),
                      detail::number_at(doc, "c1", canonical.c1), detail::read_params(doc)};
  spec.validate();
  return spec;
}

/// Physical keys, c0/c1 as the reservoir concentrations, and the lattice
/// settings of WalkConfig.
inline WalkConfig walk_config_from_json(const json& doc) {
  detail::reject_unknown_keys(doc,
                              {detail::kParamKeys, detail::kSeedKeys, detail::kWalkKeys});
  WalkConfig cfg;
  cfg.params = detail::read_params(doc);
  cfg.c_left = detail::number_at(doc, "c0", cfg.c_left);
  cfg.c_right = detail::number_at(doc, "c1", cfg.c_right);
  cfg.cells = static_cast<int>(detail::integer_at(doc, "cells", cfg.cells));
  cfg.walkers_per_cell_scale =
      detail::integer_at(doc, "walkers_per_cell_scale", cfg.walkers_per_cell_scale);
  cfg.duration = detail::number_at(doc, "duration", cfg.duration);
  cfg.burn_in = detail::number_at(doc, "burn_in", cfg.burn_in);
  cfg.batches = static_cast<int>(detail::integer_at(doc, "batches", cfg.batches));
  if (doc.contains("rng_seed")) {
    const json& v = doc.at("rng_seed");
    if (!v.is_number_integer()) throw InvalidInput("parameter 'rng_seed' must be an integer");
    cfg.rng_seed = v.get<std::uint64_t>();
  }
  if (doc.contains("measure_plane")) {
    cfg.measure_plane = detail::number_at(doc, "measure_plane", 0.0);
  }
  cfg.validate();
  return cfg;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + err.what());
  }
}

inline void to_json(json& j, const PhysicalParams& p) {
  j = json{{"z", p.z},           {"e", p.e},           {"kT", p.kT},
           {"eps", p.eps},       {"D_plus", p.D_plus}, {"D_minus", p.D_minus},
           {"delta", p.delta}};
}

inline void to_json(json& j, const PlanckSeedSpec& s) {
  to_json(j, s.params);
  j["c0"] = s.c0;
  j["c1"] = s.c1;
}

inline void to_json(json& j, const Admissibility& a) {
  j = json{{"min_c_plus", a.min_c_plus},
           {"x_min_c_plus", a.x_min_c_plus},
           {"min_c_minus", a.min_c_minus},
           {"x_min_c_minus", a.x_min_c_minus},
           {"evaluable", a.evaluable},
           {"physical", a.physical()}};
  if (!a.evaluable) j["failure_x"] = a.failure_x;
}

inline void to_json(json& j, const LadderReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"Phi_plus", row.Phi_plus},
                    {"Phi_minus", row.Phi_minus},
                    {"J_plus", row.J_plus},
                    {"J_minus", row.J_minus},
                    {"J", row.J},
                    {"admissibility", row.admissibility}});
  }
  j = json{{"delta_J", r.delta_J}, {"rows", rows}};
}

inline void to_json(json& j, const ResidualReport& r) {
  json eqs = json::array();
  for (const auto& n : r.norms) {
    eqs.push_back({{"id", n.id},
                   {"max_abs", n.max_abs},
                   {"rms", n.rms},
                   {"x_at_max", n.x_at_max},
                   {"tol", r.tol},
                   {"pass", !r.failure_x && n.max_abs < r.tol}});
  }
  j = json{{"equations", eqs},
           {"tol", r.tol},
           {"pass", r.pass},
           {"interior_points", r.grid.size()},
           {"failure_x", r.failure_x ? json(*r.failure_x) : json(nullptr)}};
}

inline void to_json(json& j, const QuantizationReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr{{"n", row.n},
            {"Q", row.Q},
            {"Q_from_currents", row.Q_from_currents},
            {"J_Atau", row.J_Atau}};
    if (row.J_plus_Atau) jr["J_plus_Atau"] = *row.J_plus_Atau;
    if (row.J_minus_Atau) jr["J_minus_Atau"] = *row.J_minus_Atau;
    rows.push_back(jr);
  }
  j = json{{"charge_unit", "ze"},
           {"equal_diffusion", r.equal_diffusion},
           {"tau", r.tau ? json(*r.tau) : json(nullptr)},
           {"tau_prime", r.tau_prime},
           {"A", r.A},
           {"n_plus", r.n_plus},
           {"n_minus", r.n_minus},
           {"delta_J", r.delta_J},
           {"third_term_max", r.third_term_max},
           {"rows", rows}};
}

inline void to_json(json& j, const WalkResult& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j = json{{"flux_estimate", r.flux_estimate},
           {"stderr", r.standard_error},
           {"analytic_flux", r.analytic_flux},
           {"z_score", r.z_score},
           {"crossings_per_Atau", opt(r.crossings_per_Atau)},
           {"crossings_per_Atau_stderr", opt(r.crossings_per_Atau_stderr)},
           {"rng_seed", r.rng_seed},
           {"batches", r.batches},
           {"walker_steps_per_batch", r.walker_steps_per_batch},
           {"batch_fluxes", r.batch_fluxes},
           {"profile", {{"x", r.profile_x},
                        {"c_mean", r.profile_mean},
                        {"c_stderr", r.profile_stderr}}}};
}

inline void to_json(json& j, const CrossingTimeResult& r) {
  j = json{{"boundary", r.boundary == CrossingBoundary::ReflectAbsorb ? "reflect-absorb"
                                                                      : "two-sided-absorb"},
           {"release_x", r.release_x},
           {"mean_time", r.mean_time},
           {"stderr", r.standard_error},
           {"tau", r.tau},
           {"ratio", r.ratio},
           {"ratio_stderr", r.ratio_stderr},
           {"walkers", r.walkers}};
}

/// 17 significant digits round-trip any double.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string profiles_csv(const std::vector<ProfileSample>& rows) {
  std::string out = "x,c_plus,c_minus,E\n";
  for (const auto& r : rows) {
    out += format_g17(r.x) + ',' + format_g17(r.c_plus) + ',' + format_g17(r.c_minus) + ',' +
           format_g17(r.E) + '\n';
  }
  return out;
}

}  // namespace eldiff
