// Command-line experiment runner. Subcommands mirror the run modes; every
// invocation is a pure function of the scenario file (plus --seed override),
// so repeated runs produce byte-identical outputs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dmimo/dmimo.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitVerifyFailed = 2;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "scenario file (JSON)")
      ->required();
  cmd->add_option("--seed", args.seed, "override run.base_seed");
  cmd->add_option("--out", args.out_dir,
                  "output directory (default: $DMIMO_OUT_DIR or ./out)");
}

fs::path resolve_out_dir(const CommonArgs& args) {
  if (!args.out_dir.empty()) return args.out_dir;
  if (const char* env = std::getenv("DMIMO_OUT_DIR"); env && *env) return env;
  return "out";
}

dmimo::ExperimentConfig load(const CommonArgs& args) {
  auto config = dmimo::load_config(args.config_path);
  if (args.seed) {
    config.base_seed = *args.seed;
  }
  return config;
}

int run_mode(const CommonArgs& args, std::optional<dmimo::Mode> forced_mode) {
  auto config = load(args);
  if (forced_mode) {
    config.mode = *forced_mode;
    config.validate();
  }
  const auto out_dir = resolve_out_dir(args);
  const auto result = dmimo::run_experiment(config, out_dir);
  for (const auto& f : result.files) {
    std::cout << "wrote " << f.string() << "\n";
  }
  if (config.mode == dmimo::Mode::Verify && !result.verify_pass) {
    std::cerr << "verification failed, see verification.txt\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

int run_gen_topo(const CommonArgs& args) {
  const auto config = load(args);
  const auto out_dir = resolve_out_dir(args);
  fs::create_directories(out_dir);
  const auto topo = dmimo::draw_topology(config, 0);
  const auto path = out_dir / fs::path("topology.txt");
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  dmimo::write_topology(os, topo);
  std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

int run_compare(const CommonArgs& args, const std::string& config_b_path) {
  auto config_a = load(args);
  auto config_b = dmimo::load_config(config_b_path);
  if (args.seed) {
    config_b.base_seed = *args.seed;
  }
  const auto out_dir = resolve_out_dir(args);
  fs::create_directories(out_dir);
  const auto result = dmimo::compare_scenarios(config_a, config_b);

  auto write_file = [&](const char* name, auto&& writer) {
    const auto path = out_dir / fs::path(name);
    std::ofstream os(path, std::ios::binary);
    if (!os) {
      throw std::runtime_error("cannot open output file: " + path.string());
    }
    writer(os);
    std::cout << "wrote " << path.string() << "\n";
  };
  write_file("cdf_a.txt", [&](std::ostream& os) { write_cdf(os, result.cdf_a); });
  write_file("cdf_b.txt", [&](std::ostream& os) { write_cdf(os, result.cdf_b); });
  write_file("comparison.txt", [&](std::ostream& os) {
    dmimo::write_comparison(os, result, config_a.scenario, config_b.scenario);
  });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "uplink spectral efficiency of distributed massive MIMO with "
      "mixed-resolution ADC receivers"};
  app.require_subcommand(1);

  CommonArgs gen_args, run_args, verify_args, ee_args, cmp_args;
  std::string config_b_path;

  auto* gen = app.add_subcommand("gen-topo", "write one topology draw");
  add_common(gen, gen_args);
  auto* run = app.add_subcommand("run", "execute the scenario's mode");
  add_common(run, run_args);
  auto* verify =
      app.add_subcommand("verify", "moment verification (forces mode=verify)");
  add_common(verify, verify_args);
  auto* ee = app.add_subcommand("ee-grid",
                                "energy-efficiency sweep (forces mode=ee_grid)");
  add_common(ee, ee_args);
  auto* cmp = app.add_subcommand("compare", "pair two scenarios' CDFs");
  add_common(cmp, cmp_args);
  cmp->add_option("--config-b", config_b_path, "second scenario file (JSON)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen_topo(gen_args);
    if (run->parsed()) return run_mode(run_args, std::nullopt);
    if (verify->parsed()) return run_mode(verify_args, dmimo::Mode::Verify);
    if (ee->parsed()) return run_mode(ee_args, dmimo::Mode::EeGrid);
    if (cmp->parsed()) return run_compare(cmp_args, config_b_path);
  } catch (const dmimo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}
