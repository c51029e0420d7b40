#pragma once

/// Command layer behind the `eldiff` tool. Every invocation is captured as a
/// RunManifest holding fully resolved inputs, and `run` is a pure function of
/// the manifest, so replaying a manifest reproduces the output byte for byte.
///
/// Exit codes: 0 success/pass, 1 verification or statistical failure,
/// 2 bad input, 3 depth-cap violation, 4 evaluation error.

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>

#include "eldiff/backlund.hpp"
#include "eldiff/corpuscle.hpp"
#include "eldiff/io.hpp"
#include "eldiff/planck.hpp"
#include "eldiff/verify.hpp"

namespace eldiff::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kBadInput = 2,
  kCapViolation = 3,
  kEvaluationError = 4,
};

struct RunManifest {
  std::string command;
  std::optional<std::string> preset;
  std::optional<std::string> params_file;
  PlanckSeedSpec spec;
  json options = json::object();
  std::optional<std::string> out;
  std::string tool_version = kToolVersion;
  std::optional<std::uint64_t> rng_seed;
};

struct CommandResult {
  int exit_code = kOk;
  std::string output;
  std::string error;
};

/// Error attributable to one command-line flag.
class FlagError : public InvalidInput {
 public:
  FlagError(const std::string& flag, const std::string& what)
      : InvalidInput(flag + ": " + what) {}
};

class FlagCapError : public DepthCapExceeded {
 public:
  FlagCapError(std::string flag, int requested, int cap)
      : DepthCapExceeded(requested, cap),
        message_(std::move(flag) + ": " + DepthCapExceeded::what()) {}

  const char* what() const noexcept override { return message_.c_str(); }

 private:
  std::string message_;
};

inline json manifest_to_json(const RunManifest& m) {
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  return json{{"command", m.command},     {"preset", opt(m.preset)},
              {"params_file", opt(m.params_file)},
              {"parameters", m.spec},     {"options", m.options},
              {"out", opt(m.out)},        {"tool_version", m.tool_version},
              {"rng_seed", opt(m.rng_seed)}};
}

inline RunManifest manifest_from_json(const json& j) {
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    if (!j.at("preset").is_null()) m.preset = j.at("preset").get<std::string>();
    if (!j.at("params_file").is_null()) m.params_file = j.at("params_file").get<std::string>();
    // Parameters are used exactly as resolved at record time; the original
    // file is not re-read.
    m.spec = planck_spec_from_json(j.at("parameters"));
    m.options = j.at("options");
    if (!j.at("out").is_null()) m.out = j.at("out").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    if (!j.at("rng_seed").is_null()) m.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    return m;
  } catch (const json::exception& err) {
    throw InvalidInput(std::string("malformed manifest: ") + err.what());
  }
}

namespace detail {

inline int int_option(const RunManifest& m, const char* key, const char* flag) {
  if (!m.options.contains(key) || !m.options.at(key).is_number_integer()) {
    throw FlagError(flag, "missing or non-integer value");
  }
  return m.options.at(key).get<int>();
}

inline double number_option(const RunManifest& m, const char* key, const char* flag) {
  if (!m.options.contains(key) || !m.options.at(key).is_number()) {
    throw FlagError(flag, "missing or non-numeric value");
  }
  return m.options.at(key).get<double>();
}

inline void check_cap(int n, int cap, const char* flag) {
  if (std::abs(n) > cap) throw FlagCapError(flag, n, cap);
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline CommandResult run_ladder(const RunManifest& m) {
  const int n_min = int_option(m, "n_min", "--n-min");
  const int n_max = int_option(m, "n_max", "--n-max");
  const int cap = int_option(m, "depth_cap", "ELDIFF_DEPTH_CAP");
  if (n_min > 0) throw FlagError("--n-min", "must be <= 0");
  if (n_max < 0) throw FlagError("--n-max", "must be >= 0");
  check_cap(n_min, cap, "--n-min");
  check_cap(n_max, cap, "--n-max");
  const SolutionState seed = make_planck_seed(m.spec);
  return {kOk, dump(json(ladder_report(seed, n_min, n_max, cap))), {}};
}

inline SolutionState member_for(const RunManifest& m, int n) {
  const int cap = int_option(m, "depth_cap", "ELDIFF_DEPTH_CAP");
  check_cap(n, cap, "--n");
  return ladder_member(make_planck_seed(m.spec), n, cap);
}

inline CommandResult run_profiles(const RunManifest& m) {
  const int n = int_option(m, "n", "--n");
  const int grid = int_option(m, "grid", "--grid");
  if (grid < 2) throw FlagError("--grid", "must be >= 2");
  const SolutionState s = member_for(m, n);
  return {kOk, profiles_csv(sample_profiles(s, grid)), {}};
}

inline CommandResult run_verify(const RunManifest& m) {
  const int n = int_option(m, "n", "--n");
  const int grid = int_option(m, "grid", "--grid");
  const double tol = number_option(m, "tol", "--tol");
  if (grid < 11) throw FlagError("--grid", "must be >= 11");
  if (!(tol >= 0.0)) throw FlagError("--tol", "must be >= 0");
  const SolutionState s = member_for(m, n);
  const ResidualReport rep = residual_check(s, grid, tol);
  json j = rep;
  j["n"] = n;
  return {rep.pass ? kOk : kCheckFailed, dump(j), {}};
}

inline CommandResult run_quantize(const RunManifest& m) {
  const int n_min = int_option(m, "n_min", "--n-min");
  const int n_max = int_option(m, "n_max", "--n-max");
  if (n_min > n_max) throw FlagError("--n-min", "must not exceed --n-max");
  return {kOk, dump(json(quantization_report(m.spec, n_min, n_max))), {}};
}

inline CommandResult run_simulate(const RunManifest& m) {
  WalkConfig cfg = WalkConfig::from_planck(m.spec);
  cfg.cells = int_option(m, "cells", "--cells");
  cfg.duration = number_option(m, "duration", "--duration");
  cfg.batches = int_option(m, "batches", "--batches");
  if (!m.rng_seed) throw FlagError("--seed", "missing");
  cfg.rng_seed = *m.rng_seed;
  try {
    cfg.validate();
  } catch (const InvalidInput& err) {
    throw InvalidInput(std::string("simulation config: ") + err.what());
  }
  const WalkResult r = simulate_flux(cfg);
  const bool ok = std::abs(r.z_score) < 4.0;
  return {ok ? kOk : kCheckFailed, dump(json(r)), {}};
}

}  // namespace detail

/// Runs a manifest. Library errors are mapped onto the exit-code contract;
/// nothing escapes as an exception.
inline CommandResult run(const RunManifest& m) {
  try {
    m.spec.validate();
    if (m.command == "ladder") return detail::run_ladder(m);
    if (m.command == "profiles") return detail::run_profiles(m);
    if (m.command == "verify") return detail::run_verify(m);
    if (m.command == "quantize") return detail::run_quantize(m);
    if (m.command == "simulate") return detail::run_simulate(m);
    return {kBadInput, {}, "unknown command '" + m.command + "'"};
  } catch (const DepthCapExceeded& err) {
    return {kCapViolation, {}, err.what()};
  } catch (const EvaluationError& err) {
    return {kEvaluationError, {}, err.what()};
  } catch (const InvalidInput& err) {
    return {kBadInput, {}, err.what()};
  } catch (const json::exception& err) {
    return {kBadInput, {}, err.what()};
  }
}

/// Resolves --preset / --params into a seed spec (canonical when neither).
inline PlanckSeedSpec resolve_spec(const std::optional<std::string>& preset,
                                   const std::optional<std::string>& params_file) {
  if (preset && params_file) throw FlagError("--params", "cannot be combined with --preset");
  if (params_file) {
    try {
      return planck_spec_from_json(read_json_file(*params_file));
    } catch (const InvalidInput& err) {
      throw FlagError("--params", err.what());
    }
  }
  try {
    return preset_by_name(preset.value_or("canonical")).spec;
  } catch (const InvalidInput& err) {
    throw FlagError("--preset", err.what());
  }
}

}  // namespace eldiff::cli
