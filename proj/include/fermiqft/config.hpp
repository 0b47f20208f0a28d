#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fermiqft/fock.hpp"
#include "fermiqft/kernels.hpp"
#include "fermiqft/modes.hpp"
#include "fermiqft/spectra.hpp"
#include "fermiqft/verify.hpp"

namespace fqft {

struct KernelConfig {
  std::string family = "constant";     // constant | gaussian | power | random | fermi
  std::vector<std::string> processes;  // signature labels; empty means every admissible process
  Complex value{1.0};
  double width = 1.0;
  std::uint64_t seed = 1;
  double scale = 1.0;
  std::vector<FormFactor> factors;     // power family, one per species
  FermiKernelOptions fermi;
};

struct MassLimitConfig {
  std::vector<std::size_t> species;  // swept in order; earlier ones are held at zero mass
  std::vector<double> masses;
};

struct VerifyConfig {
  std::size_t trials = 1000;
  double epsilon = 0.1;
  std::size_t i0 = 0;
  double s = 0.75;
  std::vector<double> thetas{0.0, 0.25, 0.5, 0.75, 1.0};
  std::size_t interpolation_trials = 200;
  std::vector<std::string> families{"random_profile", "gaussian_profile", "projected_kernel"};
  std::vector<double> mus{2.0, 1.0, 0.5, 0.25, 0.125};
  std::vector<double> gap_couplings;
  std::size_t number_target = 0;
  std::string number_variant = "massless";
  double uniformity_factor = 4.0;
};

struct InfraredConfig {
  std::vector<std::size_t> targets;
  std::string signature;  // empty: first process of the kernel list
  double r = 1.9;
  double cutoff = 1.0;
  InfraredSettings settings;
};

struct RunConfig {
  std::string name = "run";
  std::vector<SpeciesConfig> species;
  std::optional<Truncation> truncation;
  std::size_t max_modes = 24;
  std::vector<KernelConfig> kernels;
  double coupling = 1.0;
  std::optional<MassLimitConfig> mass_limit;
  VerifyConfig verify;
  InfraredConfig infrared;
  SolverSettings solver;
  std::uint64_t seed = 20240601;
  std::string output_dir = "reports";
  std::vector<std::string> expected_fail;  // report names whose failure is predicted
  nlohmann::json source;                   // the document as read, used for hashing
};

// Throws std::invalid_argument with the offending key path on schema violations.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

// FNV-1a over the canonical dump of the source document, as 16 hex digits.
std::string config_hash(const RunConfig& config);
std::uint64_t fnv1a(const std::string& bytes);

std::size_t species_count(const RunConfig& config);
ModeTable build_table(const RunConfig& config);
TermList build_terms(const RunConfig& config, const ModeTable& table);
Model build_model(const RunConfig& config);

// Kernel specs of every configured process, in term order.
std::vector<KernelSpec> build_kernel_specs(const RunConfig& config);

bool expected_to_fail(const RunConfig& config, const std::string& report_name);

}  // namespace fqft
