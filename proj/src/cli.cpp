#include "fermiqft/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace fqft {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path report_dir(const RunConfig& config, const CommandOptions& options) {
  fs::path dir = options.report_dir.empty() ? fs::path(config.output_dir) : options.report_dir;
  fs::create_directories(dir);
  return dir;
}

fs::path write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  return path;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path write_csv(const fs::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
  return path;
}

json manifest(const RunConfig& config, const Model& model) {
  json terms = json::array();
  for (const auto& t : model.bundle.terms)
    terms.push_back({{"signature", t.signature.label()}, {"p", t.signature.p}, {"nnz", t.op.nnz()},
                     {"kernel_norm", t.tensor.frobenius_norm()}});
  json species = json::array();
  for (std::size_t i = 0; i < model.table.species_count(); ++i)
    species.push_back({{"name", model.table.species(i).name},
                       {"mass", model.table.species(i).mass},
                       {"modes", model.table.species_mode_count(i)}});
  return {{"name", config.name},
          {"config_hash", config_hash(config)},
          {"seed", config.seed},
          {"n", model.bundle.n},
          {"coupling", model.bundle.coupling},
          {"species", species},
          {"modes", model.table.mode_count()},
          {"dimension", model.basis.size()},
          {"truncated", model.basis.truncated()},
          {"nnz", {{"H", model.bundle.total.nnz()}, {"H_f", model.bundle.free.nnz()},
                   {"H_I", model.bundle.interaction.nnz()}}},
          {"terms", terms}};
}

std::vector<bool> massless_flags(const RunConfig& config) {
  std::vector<bool> out;
  for (const auto& s : config.species) out.push_back(s.mass == 0.0);
  return out;
}

std::vector<std::size_t> spin_counts(const RunConfig& config) {
  std::vector<std::size_t> out;
  for (const auto& s : config.species) out.push_back(s.spins.size());
  return out;
}

bool has_zero_momentum(const ModeTable& table, std::size_t species) {
  for (const auto& k : table.species(species).points)
    if (norm3(k) == 0.0) return true;
  return false;
}

void tag(std::vector<BoundReport>& reports, const json& extra) {
  for (auto& r : reports)
    for (const auto& [k, v] : extra.items()) r.parameters[k] = v;
}

std::vector<BoundReport> bounds_suite(const RunConfig& config, const Model& model) {
  TrialSettings ts;
  ts.trials = config.verify.trials;
  ts.seed = config.seed;
  ts.extremal_dim_cap = std::min<std::size_t>(512, config.solver.dense_cap);
  std::vector<BoundReport> out;
  const std::size_t i0 = config.verify.i0;
  for (const auto& term : model.bundle.terms) {
    out.push_back(check_form_bound(term, model.table, model.basis, i0, ts));
    out.push_back(check_form_bound(term, model.table, model.basis, i0, ts, true));
    out.push_back(check_refined_form_bound(term, model.table, model.basis, i0, ts));
    out.push_back(check_operator_bound(term, model.table, model.basis, i0, ts));
    out.push_back(check_hermite_bound(term, model.table, model.basis, i0, config.verify.s, ts));
  }
  return out;
}

std::vector<BoundReport> interpolation_suite(const RunConfig& config, const Model& model) {
  InterpolationSettings is;
  is.thetas = config.verify.thetas;
  is.s = config.verify.s;
  is.trials = config.verify.interpolation_trials;
  is.seed = config.seed;
  std::vector<BoundReport> out;
  const auto& term = model.bundle.terms.front();
  for (const auto& name : config.verify.families)
    out.push_back(check_interpolation(term.signature, model.table, model.basis, config.verify.i0,
                                      parse_trial_family(name), is, &term.tensor));
  return out;
}

NumberEstimateSettings number_settings(const RunConfig& config, std::size_t swept) {
  NumberEstimateSettings ns;
  ns.i0 = config.verify.i0;
  ns.epsilon = config.verify.epsilon;
  ns.uniformity_factor = config.verify.uniformity_factor;
  if (config.verify.number_variant == "massive") {
    ns.variant = NumberVariant::massive_target;
    ns.target = config.verify.number_target;
  } else {
    ns.target = swept;
  }
  return ns;
}

std::vector<BoundReport> estimate_reports(const RunConfig& config, const Model& model, const MassCurve& curve) {
  std::vector<BoundReport> out;
  const auto ns = number_settings(config, curve.species);
  out.push_back(check_number_estimate(model, curve, ns));
  if (!model.table.chains(ns.target).empty()) out.push_back(check_gradient_estimate(model, curve, ns));
  return out;
}

BoundReport mass_curve_report(const MassCurve& curve) {
  BoundReport r;
  r.name = "mass_limit";
  r.relation = "E(m) non-decreasing in m and E(0) <= E(m) <= <Phi_m, H(0) Phi_m>";
  r.lhs = std::max(curve.max_monotonicity_violation, curve.max_sandwich_violation);
  r.rhs = 0.0;
  r.ratio = r.lhs;
  r.tolerance = 1e-9;
  r.trials = curve.masses.size();
  r.pass = curve.monotone && curve.sandwich;
  r.parameters = {{"species", curve.species}, {"masses", curve.masses}};
  r.details = {{"energies", curve.energies},
               {"zero_mass_energy", curve.zero_mass_energy},
               {"monotonicity_violation", curve.max_monotonicity_violation},
               {"sandwich_violation", curve.max_sandwich_violation}};
  return r;
}

std::vector<BoundReport> number_suite(const RunConfig& config, const Model& model) {
  if (!config.mass_limit) throw std::invalid_argument("number suite: config has no mass_limit section");
  const std::size_t swept = config.mass_limit->species.front();
  const MassCurve curve = mass_sweep(model, swept, config.mass_limit->masses, config.solver);
  std::vector<BoundReport> out{mass_curve_report(curve)};
  const auto ns = number_settings(config, swept);
  if (ns.variant == NumberVariant::massless_target && has_zero_momentum(model.table, ns.target)) {
    out.front().details["note"] = "number estimate skipped: zero-momentum mode in the target species";
    return out;
  }
  for (auto& r : estimate_reports(config, model, curve)) out.push_back(std::move(r));
  return out;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::expected_fail: return "xfail";
    case Verdict::unexpected_pass: return "xpass";
  }
  return "fail";
}

int CommandResult::exit_code() const {
  for (const auto& e : entries)
    if (e.verdict == Verdict::fail || e.verdict == Verdict::unexpected_pass) return 1;
  return 0;
}

void apply_overrides(RunConfig& config, std::optional<std::uint64_t> seed, std::optional<std::size_t> dense_cap) {
  if (seed) {
    config.seed = *seed;
    config.solver.seed = *seed;
  }
  if (dense_cap) config.solver.dense_cap = *dense_cap;
}

Verdict classify(const RunConfig& config, const BoundReport& report) {
  const bool expected = expected_to_fail(config, report.name);
  if (expected) return report.pass ? Verdict::unexpected_pass : Verdict::expected_fail;
  return report.pass ? Verdict::pass : Verdict::fail;
}

std::vector<BoundReport> infrared_reports(const RunConfig& config) {
  std::vector<BoundReport> out;
  if (config.infrared.targets.empty()) return out;
  const auto specs = build_kernel_specs(config);
  const KernelSpec* spec = &specs.front();
  if (!config.infrared.signature.empty()) {
    const auto sig = parse_signature(config.species.size(), config.infrared.signature);
    auto it = std::find_if(specs.begin(), specs.end(), [&](const KernelSpec& s) { return s.signature == sig; });
    if (it == specs.end()) throw std::invalid_argument("infrared: signature " + sig.label() + " is not configured");
    spec = &*it;
  }
  if (!spec->separable) throw std::invalid_argument("infrared: kernel family '" + spec->family + "' is not separable");
  const auto ex = exponent_values(
      exponent_table(config.species.size(), config.verify.epsilon, massless_flags(config), config.verify.i0),
      config.verify.epsilon);
  const auto spins = spin_counts(config);
  for (std::size_t target : config.infrared.targets) {
    const InfraredReport ir = infrared_integrals(*spec->separable, target, config.infrared.r, config.infrared.cutoff,
                                                 ex, spins, config.infrared.settings);
    BoundReport r;
    r.name = "infrared";
    r.relation = "shell increments of both infrared integrals decay (fitted exponent > margin)";
    r.lhs = std::min(ir.gs1_exponent, ir.gs2_exponent);
    r.rhs = config.infrared.settings.divergence_margin;
    r.ratio = safe_ratio(r.rhs, r.lhs);
    r.tolerance = config.infrared.settings.divergence_margin;
    r.trials = ir.radii.size();
    r.pass = ir.gs1_finite && ir.gs2_finite;
    r.parameters = {{"species", target}, {"r", ir.r}, {"cutoff", ir.cutoff}, {"signature", spec->signature.label()},
                    {"epsilon", config.verify.epsilon}, {"i0", config.verify.i0}};
    r.details = {{"verdict", ir.verdict()},
                 {"radii", ir.radii},
                 {"gs1_values", ir.gs1_values},
                 {"gs2_values", ir.gs2_values},
                 {"gs1_exponent", ir.gs1_exponent},
                 {"gs2_exponent", ir.gs2_exponent},
                 {"gs1_finite", ir.gs1_finite},
                 {"gs2_finite", ir.gs2_finite},
                 {"tail_fraction", ir.tail_fraction}};
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<BoundReport> hypothesis_reports(const RunConfig& config) {
  const std::size_t n = config.species.size();
  const auto table = exponent_table(n, config.verify.epsilon, massless_flags(config), config.verify.i0);
  const auto ex = exponent_values(table, config.verify.epsilon);
  const auto spins = spin_counts(config);
  json exponents = json::array();
  for (const auto& e : table)
    exponents.push_back({{"species", e.species},
                         {"role", e.role == ExponentRole::massive ? "massive"
                                  : e.role == ExponentRole::massless ? "massless" : "exempt"},
                         {"exponent", e.text()},
                         {"value", e.value(config.verify.epsilon)}});
  std::vector<BoundReport> out;
  for (const auto& spec : build_kernel_specs(config)) {
    if (!spec.separable) continue;
    const auto norm = separable_regularity_norm(*spec.separable, ex, spins, config.infrared.settings.continuum);
    BoundReport r;
    r.name = "self_adjointness_hypotheses";
    r.relation = "||S G||_2 finite with converged Hermite truncation";
    r.lhs = norm.norm;
    r.rhs = norm.coarse_norm;
    r.ratio = safe_ratio(norm.norm, norm.coarse_norm);
    r.tolerance = config.infrared.settings.continuum.refinement_tolerance;
    r.trials = 1;
    r.empirical_constant = norm.norm;
    r.pass = std::isfinite(norm.norm) && norm.converged;
    r.parameters = {{"signature", spec.signature.label()}, {"epsilon", config.verify.epsilon},
                    {"i0", config.verify.i0}, {"family", spec.family}};
    r.details = {{"verdict", r.pass ? "finite" : "not established"},
                 {"exponents", exponents},
                 {"tail_fraction", norm.tail_fraction},
                 {"coarse_norm", norm.coarse_norm}};
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<BoundReport> run_suite(const RunConfig& config, const Model& model, const std::string& suite) {
  std::vector<BoundReport> out;
  if (suite == "exact") {
    SolverSettings solver = config.solver;
    out = exact_identity_suite(model, config.seed, 1e-12, solver);
  } else if (suite == "bounds") {
    out = bounds_suite(config, model);
  } else if (suite == "interpolation") {
    out = interpolation_suite(config, model);
  } else if (suite == "relative") {
    RelativeBoundSettings rs;
    rs.epsilon = config.verify.epsilon;
    rs.mus = config.verify.mus;
    out.push_back(check_relative_bound_zero(model.bundle, model.basis, rs));
  } else if (suite == "number") {
    out = number_suite(config, model);
  } else if (suite == "gap") {
    if (config.verify.gap_couplings.empty()) throw std::invalid_argument("gap suite: no gap_couplings configured");
    out.push_back(check_gap_proxy(model, config.verify.gap_couplings, 0.1, config.solver));
  } else if (suite == "infrared") {
    out = infrared_reports(config);
  } else if (suite == "hypotheses") {
    out = hypothesis_reports(config);
  } else {
    throw std::invalid_argument("unknown suite '" + suite + "'");
  }
  tag(out, {{"suite", suite}});
  return out;
}

CommandResult cmd_build(const RunConfig& config, const CommandOptions& options) {
  const Model model = build_model(config);
  const fs::path dir = report_dir(config, options);
  CommandResult res;
  res.summary = manifest(config, model);
  auto dump = [&](const std::string& name, const SparseOperator& op) {
    const fs::path p = dir / (name + ".triplets");
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    write_triplets(out, op);
    res.written.push_back(p);
  };
  dump("H", model.bundle.total);
  dump("H_f", model.bundle.free);
  dump("H_I", model.bundle.interaction);
  res.written.push_back(write_json(dir / "manifest.json", res.summary));
  return res;
}

CommandResult cmd_verify(const RunConfig& config, const CommandOptions& options) {
  std::vector<std::string> suites;
  for (const auto& s : options.suites) {
    if (s == "all") {
      suites = {"exact", "bounds", "interpolation", "relative"};
      if (config.mass_limit) suites.push_back("number");
      if (!config.verify.gap_couplings.empty()) suites.push_back("gap");
      if (!config.infrared.targets.empty()) {
        suites.push_back("infrared");
        suites.push_back("hypotheses");
      }
      break;
    }
    if (std::find(suite_names.begin(), suite_names.end(), s) == suite_names.end())
      throw std::invalid_argument("unknown suite '" + s + "'");
    suites.push_back(s);
  }
  const bool needs_model = std::any_of(suites.begin(), suites.end(),
                                       [](const std::string& s) { return s != "infrared" && s != "hypotheses"; });
  const Model model = needs_model ? build_model(config) : Model{build_table(config), {}, {}};
  CommandResult res;
  json reports = json::array();
  for (const auto& suite : suites) {
    std::vector<BoundReport> rs;
    try {
      rs = run_suite(config, model, suite);
    } catch (const std::exception& e) {
      throw std::runtime_error("suite '" + suite + "': " + e.what());
    }
    for (auto& r : rs) {
      SuiteEntry e{suite, std::move(r), Verdict::fail};
      e.verdict = classify(config, e.report);
      json j = to_json(e.report);
      j["status"] = to_string(e.verdict);
      reports.push_back(j);
      res.entries.push_back(std::move(e));
    }
  }
  res.summary = {{"name", config.name}, {"config_hash", config_hash(config)}, {"seed", config.seed},
                 {"suites", suites}, {"reports", reports}};
  const fs::path dir = report_dir(config, options);
  res.written.push_back(write_json(dir / "reports.json", res.summary));
  return res;
}

CommandResult cmd_groundstate(const RunConfig& config, const CommandOptions& options) {
  const Model model = build_model(config);
  const std::size_t count = std::min<std::size_t>(model.basis.size(), 8);
  const SpectrumReport spec = low_spectrum(model.bundle.total, count, model.table, config.solver);
  const GroundStateResult gs = ground_state(model.bundle.total, config.solver);
  const ObservableReport obs = observables(gs, model.table, model.basis, false);
  CommandResult res;
  res.summary = {{"name", config.name},
                 {"config_hash", config_hash(config)},
                 {"dimension", model.basis.size()},
                 {"energy", gs.energy},
                 {"degeneracy", gs.degeneracy},
                 {"residual", gs.residual},
                 {"method", gs.method},
                 {"gap", spec.gap},
                 {"single_particle_threshold", spec.single_particle_threshold},
                 {"species_numbers", obs.species_numbers},
                 {"total_number", obs.total_number},
                 {"mode_amplitudes", obs.mode_amplitudes}};
  const fs::path dir = report_dir(config, options);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j) rows.push_back({std::to_string(j), fmt(spec.eigenvalues[j])});
  res.written.push_back(write_csv(dir / "spectrum.csv", {"index", "eigenvalue"}, rows));
  res.written.push_back(write_json(dir / "groundstate.json", res.summary));
  return res;
}

CommandResult cmd_masslimit(const RunConfig& config, const CommandOptions& options) {
  if (!config.mass_limit) throw std::invalid_argument("masslimit: config has no mass_limit section");
  const auto& ml = *config.mass_limit;
  if (ml.masses.empty()) throw std::invalid_argument("masslimit: empty mass grid");
  Model model = build_model(config);
  const fs::path dir = report_dir(config, options);
  CommandResult res;
  json sweeps = json::array();
  for (std::size_t step = 0; step < ml.species.size(); ++step) {
    const std::size_t sp = ml.species[step];
    const MassCurve curve = mass_sweep(model, sp, ml.masses, config.solver);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < curve.masses.size(); ++j)
      rows.push_back({fmt(curve.masses[j]), fmt(curve.energies[j]), fmt(curve.cross_energies[j]),
                      j + 1 < curve.masses.size() ? fmt(curve.overlaps[j]) : "", fmt(curve.total_numbers[j]),
                      std::to_string(curve.degeneracies[j])});
    const fs::path csv = dir / ("mass_curve_species" + std::to_string(sp) + ".csv");
    res.written.push_back(write_csv(
        csv, {"mass", "energy", "cross_energy", "overlap_next", "total_number", "degeneracy"}, rows));
    std::vector<BoundReport> reports{mass_curve_report(curve)};
    std::string note;
    const auto ns = number_settings(config, sp);
    if (ns.variant == NumberVariant::massless_target && has_zero_momentum(model.table, ns.target)) {
      note = "number estimate skipped: zero-momentum mode in the target species";
    } else {
      for (auto& r : estimate_reports(config, model, curve)) reports.push_back(std::move(r));
    }
    json js = json::array();
    for (auto& r : reports) {
      r.parameters["sweep"] = step;
      SuiteEntry e{"masslimit", r, classify(config, r)};
      json j = to_json(r);
      j["status"] = to_string(e.verdict);
      js.push_back(j);
      res.entries.push_back(std::move(e));
    }
    sweeps.push_back({{"species", sp}, {"held_massless", std::vector<std::size_t>(ml.species.begin(), ml.species.begin() + step)},
                      {"zero_mass_energy", curve.zero_mass_energy}, {"reports", js}, {"note", note}});
    model = rebuild_with_mass(model, sp, 0.0);
  }
  res.summary = {{"name", config.name}, {"config_hash", config_hash(config)}, {"sweeps", sweeps}};
  res.written.push_back(write_json(dir / "masslimit.json", res.summary));
  return res;
}

CommandResult cmd_fermi_demo(const RunConfig& config, const CommandOptions& options) {
  if (config.species.size() != 4) throw std::invalid_argument("fermi-demo: the demo config needs four species");
  const Model model = build_model(config);
  const GroundStateResult gs = ground_state(model.bundle.total, config.solver);
  const ObservableReport obs = observables(gs, model.table, model.basis, false);
  CommandResult res;
  json reports = json::array();
  auto add = [&](const std::string& suite, std::vector<BoundReport> rs) {
    for (auto& r : rs) {
      SuiteEntry e{suite, std::move(r), Verdict::fail};
      e.verdict = classify(config, e.report);
      json j = to_json(e.report);
      j["status"] = to_string(e.verdict);
      reports.push_back(j);
      res.entries.push_back(std::move(e));
    }
  };
  add("hypotheses", hypothesis_reports(config));
  add("infrared", infrared_reports(config));
  const auto table = exponent_table(4, config.verify.epsilon, massless_flags(config), config.verify.i0);
  json exps = json::array();
  for (const auto& e : table) exps.push_back(e.text());
  std::string ir_verdict = "finite", sa_verdict = "finite";
  for (const auto& e : res.entries) {
    if (e.suite == "infrared" && !e.report.pass) ir_verdict = "divergent";
    if (e.suite == "hypotheses" && !e.report.pass) sa_verdict = "not established";
  }
  res.summary = {{"name", config.name},
                 {"config_hash", config_hash(config)},
                 {"dimension", model.basis.size()},
                 {"exponents", exps},
                 {"self_adjointness", sa_verdict},
                 {"infrared", ir_verdict},
                 {"ground_state", {{"energy", gs.energy}, {"degeneracy", gs.degeneracy}, {"residual", gs.residual},
                                   {"species_numbers", obs.species_numbers}}},
                 {"reports", reports}};
  const fs::path dir = report_dir(config, options);
  res.written.push_back(write_json(dir / "fermi_demo.json", res.summary));
  return res;
}

}  // namespace fqft
