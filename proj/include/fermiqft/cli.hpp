#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fermiqft/config.hpp"
#include "fermiqft/report.hpp"

namespace fqft {

enum class Verdict { pass, fail, expected_fail, unexpected_pass };
std::string to_string(Verdict v);

struct SuiteEntry {
  std::string suite;
  BoundReport report;
  Verdict verdict = Verdict::fail;
};

struct CommandResult {
  std::vector<SuiteEntry> entries;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::filesystem::path> written;
  // Zero iff no entry ended as fail or unexpected_pass.
  int exit_code() const;
};

inline const std::vector<std::string> suite_names{"exact",  "bounds", "interpolation", "relative", "number",
                                                  "gap",    "infrared", "hypotheses"};

struct CommandOptions {
  std::filesystem::path report_dir;  // empty: config output_dir
  std::vector<std::string> suites{"all"};
};

// Applies --seed and --dense-cap overrides before the config is used.
void apply_overrides(RunConfig& config, std::optional<std::uint64_t> seed, std::optional<std::size_t> dense_cap);

CommandResult cmd_build(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_verify(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_groundstate(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_masslimit(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_fermi_demo(const RunConfig& config, const CommandOptions& options);

// Individual suites, usable without writing files.
std::vector<BoundReport> run_suite(const RunConfig& config, const Model& model, const std::string& suite);

// Infrared and hypothesis reports for separable kernels.
std::vector<BoundReport> infrared_reports(const RunConfig& config);
std::vector<BoundReport> hypothesis_reports(const RunConfig& config);

Verdict classify(const RunConfig& config, const BoundReport& report);

}  // namespace fqft
