// eldiff: exact electrodiffusion ladders, residual checks, charge quanta and
// the corpuscular flux simulation from the command line.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "eldiff/cli.hpp"

namespace {

using eldiff::json;
using eldiff::cli::CommandResult;
using eldiff::cli::RunManifest;

struct CommonFlags {
  std::optional<std::string> preset;
  std::optional<std::string> params;
  std::optional<std::string> out;
  std::optional<std::string> manifest;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_out) {
  cmd->add_option("--preset", f.preset, "named parameter preset: canonical, aqueous-cgs");
  cmd->add_option("--params", f.params, "JSON parameter file (z, e, kT, eps, D_plus, D_minus, delta, c0, c1)");
  if (with_out) cmd->add_option("--out", f.out, "write output here instead of stdout");
  cmd->add_option("--manifest", f.manifest,
                  "write the run manifest here (default: <out>.manifest.json, or stderr)");
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

int emit(const CommandResult& r, const std::optional<std::string>& out) {
  if (!r.error.empty()) std::cerr << "eldiff: " << r.error << "\n";
  if (!r.output.empty()) {
    if (out) {
      if (!write_file(*out, r.output)) {
        std::cerr << "eldiff: --out: cannot write '" << *out << "'\n";
        return eldiff::cli::kBadInput;
      }
    } else {
      std::cout << r.output;
    }
  }
  return r.exit_code;
}

int execute(RunManifest m, const CommonFlags& f) {
  m.preset = f.params ? std::nullopt : std::optional<std::string>(f.preset.value_or("canonical"));
  m.params_file = f.params;
  m.out = f.out;
  try {
    m.spec = eldiff::cli::resolve_spec(f.preset, f.params);
  } catch (const eldiff::InvalidInput& err) {
    std::cerr << "eldiff: " << err.what() << "\n";
    return eldiff::cli::kBadInput;
  }
  const std::string manifest_text = eldiff::cli::manifest_to_json(m).dump(2) + "\n";
  if (f.manifest || f.out) {
    const std::string path = f.manifest.value_or(*f.out + ".manifest.json");
    if (!write_file(path, manifest_text)) {
      std::cerr << "eldiff: --manifest: cannot write '" << path << "'\n";
      return eldiff::cli::kBadInput;
    }
  } else {
    std::cerr << manifest_text;
  }
  return emit(eldiff::cli::run(m), f.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solution ladders of the steady nonlinear electrodiffusion system"};
  app.require_subcommand(1);
  app.set_version_flag("--version", eldiff::cli::kToolVersion);
  app.footer(
      "Environment:\n"
      "  ELDIFF_DEPTH_CAP   maximum |n| of a ladder member (default 16)\n\n"
      "Exit codes: 0 ok/pass, 1 check failed, 2 bad input, 3 depth cap, 4 evaluation error");

  CommonFlags flags;
  int n_min = -1, n_max = 1, n = 0, grid = 0, cells = 20, batches = 10;
  double tol = 1e-8, duration = 40.0;
  std::uint64_t seed = 42;
  std::string manifest_in;
  std::optional<std::string> replay_out;

  auto* ladder = app.add_subcommand("ladder", "flux/current ladder report as JSON");
  add_common(ladder, flags, true);
  ladder->add_option("--n-min", n_min, "lowest ladder index (<= 0)")->capture_default_str();
  ladder->add_option("--n-max", n_max, "highest ladder index (>= 0)")->capture_default_str();

  auto* profiles = app.add_subcommand("profiles", "CSV profiles x,c_plus,c_minus,E of one member");
  add_common(profiles, flags, true);
  profiles->add_option("--n", n, "ladder index")->capture_default_str();
  profiles->add_option("--grid", grid, "number of grid points (>= 2)")->default_val(101);

  auto* verify = app.add_subcommand("verify", "residual check of one member against the system");
  add_common(verify, flags, true);
  verify->add_option("--n", n, "ladder index")->capture_default_str();
  verify->add_option("--grid", grid, "number of grid points (>= 11)")->default_val(101);
  verify->add_option("--tol", tol, "max dimensionless residual")->capture_default_str();

  auto* quantize = app.add_subcommand("quantize", "charge quanta of the Planck seed ladder");
  add_common(quantize, flags, true);
  quantize->add_option("--n-min", n_min, "lowest ladder index")->capture_default_str();
  quantize->add_option("--n-max", n_max, "highest ladder index")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "random-walk estimate of the seed flux");
  add_common(simulate, flags, true);
  simulate->add_option("--seed", seed, "RNG seed")->capture_default_str();
  simulate->add_option("--duration", duration, "simulated time per batch, units of tau")
      ->capture_default_str();
  simulate->add_option("--cells", cells, "lattice cells across the slab (>= 20)")
      ->capture_default_str();
  simulate->add_option("--batches", batches, "independent batches (>= 10)")->capture_default_str();

  auto* replay = app.add_subcommand("replay", "re-run a recorded manifest");
  replay->add_option("manifest", manifest_in, "manifest JSON file")->required();
  replay->add_option("--out", replay_out, "write output here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "eldiff: " << e.what() << "\n";
    return eldiff::cli::kBadInput;
  }

  int depth_cap = eldiff::kDefaultDepthCap;
  try {
    depth_cap = eldiff::depth_cap_from_env();
  } catch (const eldiff::InvalidInput& err) {
    std::cerr << "eldiff: " << err.what() << "\n";
    return eldiff::cli::kBadInput;
  }

  RunManifest m;
  if (*ladder) {
    m.command = "ladder";
    m.options = {{"n_min", n_min}, {"n_max", n_max}, {"depth_cap", depth_cap}};
  } else if (*profiles) {
    m.command = "profiles";
    m.options = {{"n", n}, {"grid", grid}, {"depth_cap", depth_cap}};
  } else if (*verify) {
    m.command = "verify";
    m.options = {{"n", n}, {"grid", grid}, {"tol", tol}, {"depth_cap", depth_cap}};
  } else if (*quantize) {
    m.command = "quantize";
    m.options = {{"n_min", n_min}, {"n_max", n_max}};
  } else if (*simulate) {
    m.command = "simulate";
    m.options = {{"duration", duration}, {"cells", cells}, {"batches", batches}};
    m.rng_seed = seed;
  } else if (*replay) {
    try {
      const RunManifest recorded =
          eldiff::cli::manifest_from_json(eldiff::read_json_file(manifest_in));
      return emit(eldiff::cli::run(recorded), replay_out);
    } catch (const eldiff::InvalidInput& err) {
      std::cerr << "eldiff: manifest: " << err.what() << "\n";
      return eldiff::cli::kBadInput;
    }
  }
  return execute(m, flags);
}
