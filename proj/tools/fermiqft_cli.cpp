#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fermiqft/cli.hpp"

#ifndef FERMIQFT_CONFIG_DIR
#define FERMIQFT_CONFIG_DIR "configs"
#endif

namespace {

void print_entries(const fqft::CommandResult& res) {
  for (const auto& e : res.entries) {
    const auto& r = e.report;
    std::printf("%-6s %-14s %-30s ratio=%-12.6g %s\n", fqft::to_string(e.verdict).c_str(), e.suite.c_str(),
                r.name.c_str(), r.ratio, r.parameters.dump().c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fermiqft: finite-mode fermionic Hamiltonians and their operator bounds"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> dense_cap;
  std::string report_dir;
  std::vector<std::string> suites{"all"};

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "run configuration (JSON)");
    if (config_required) opt->required();
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--report-dir", report_dir, "directory for reports and data files");
    sub->add_option("--dense-cap", dense_cap, "largest dimension solved densely");
  };
  auto* build = app.add_subcommand("build", "assemble operators and write a manifest");
  common(build, true);
  auto* verify = app.add_subcommand("verify", "run verification suites");
  common(verify, true);
  verify->add_option("--suite", suites, "exact | bounds | interpolation | relative | number | gap | infrared | "
                                        "hypotheses | all (repeatable)");
  auto* gs = app.add_subcommand("groundstate", "ground state and low spectrum");
  common(gs, true);
  auto* ml = app.add_subcommand("masslimit", "sequential mass-limit sweeps");
  common(ml, true);
  auto* demo = app.add_subcommand("fermi-demo", "four-species Fermi kernel pipeline");
  common(demo, false);

  CLI11_PARSE(app, argc, argv);

  fqft::RunConfig config;
  try {
    if (config_path.empty()) config_path = std::string(FERMIQFT_CONFIG_DIR) + "/fermi_nu0.json";
    config = fqft::load_run_config(config_path);
    fqft::apply_overrides(config, seed, dense_cap);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  fqft::CommandOptions options;
  options.report_dir = report_dir;
  options.suites = suites;
  try {
    fqft::CommandResult res;
    if (*build) res = fqft::cmd_build(config, options);
    else if (*verify) res = fqft::cmd_verify(config, options);
    else if (*gs) res = fqft::cmd_groundstate(config, options);
    else if (*ml) res = fqft::cmd_masslimit(config, options);
    else res = fqft::cmd_fermi_demo(config, options);
    print_entries(res);
    if (*build || *gs) std::cout << res.summary.dump(2) << '\n';
    if (*demo)
      std::printf("self-adjointness: %s\ninfrared: %s\n", res.summary["self_adjointness"].get<std::string>().c_str(),
                  res.summary["infrared"].get<std::string>().c_str());
    for (const auto& p : res.written) std::printf("wrote %s\n", p.string().c_str());
    return res.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
