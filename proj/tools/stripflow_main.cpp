#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stripflow/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw stripflow::ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Strip-domain simulator and diagnostics for hyperbolic Navier-Stokes "
      "systems: Gevrey-norm monitoring along a shrinking analyticity radius, "
      "decay-bound verification, and hydrostatic-limit measurement."};
  app.require_subcommand(0, 1);
  app.fallthrough();  // allow global options after a subcommand name

  std::string config_path, out_dir;
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false, threads_set = false;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "Config file (key = value lines)");
  app.add_option("--out", out_dir, "Output directory (overrides config)");
  app.add_option("--threads", threads, "Worker threads for sweeps")
      ->check(CLI::Range(1, 4096));
  app.add_option("--seed", seed, "Initial-data RNG seed (overrides config)");
  app.add_option("--override", overrides,
                 "key=value config override, repeatable")
      ->take_all();

  auto* c_hydro = app.add_subcommand("run-hydro", "Integrate the hydrostatic system and monitor its decay bounds");
  auto* c_aniso = app.add_subcommand("run-aniso", "Integrate the anisotropic system at fixed eps");
  auto* c_sweep = app.add_subcommand("limit-sweep", "Measure the hydrostatic limit across an eps grid");
  auto* c_verify = app.add_subcommand("verify", "Run the weight/grid/norm property suite");
  auto* c_dump = app.add_subcommand("dump-symbols", "Write per-mode norm symbol tables as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    // --help and --version exit 0; anything else is a bad command line,
    // which lands on the same exit code as a bad config file.
    return code == 0 ? 0 : stripflow::exit_config;
  }
  threads_set = app.count("--threads") > 0;
  seed_set = app.count("--seed") > 0;

  stripflow::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = stripflow::parse_config(read_file(config_path));
    for (const auto& kv : overrides) stripflow::apply_override(cfg, kv);
    if (c_hydro->parsed()) cfg.system = stripflow::SystemKind::hydro;
    else if (c_aniso->parsed()) cfg.system = stripflow::SystemKind::aniso;
    else if (c_sweep->parsed()) cfg.system = stripflow::SystemKind::limit_sweep;
    else if (c_verify->parsed()) cfg.system = stripflow::SystemKind::verify;
    else if (c_dump->parsed()) cfg.system = stripflow::SystemKind::dump_symbols;
    else if (config_path.empty()) {
      std::cerr << app.help() << "\n";
      return stripflow::exit_config;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads_set) cfg.threads = threads;
    if (seed_set) cfg.seed = seed;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return stripflow::exit_config;
  }
  return stripflow::run_config(cfg);
}
