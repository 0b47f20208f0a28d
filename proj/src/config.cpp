#include "fermiqft/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace fqft {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

template <class T>
T get(const json& node, const std::string& path) {
  try {
    return node.get<T>();
  } catch (const json::exception& e) {
    schema_error(path, e.what());
  }
}

template <class T>
T field(const json& obj, const char* key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  return get<T>(obj.at(key), path + "." + key);
}

const json& required(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  if (!obj.contains(key)) schema_error(path, std::string("missing required key '") + key + "'");
  return obj.at(key);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) schema_error(path, "unknown key '" + k + "'");
}

Complex parse_complex(const json& node, const std::string& path) {
  if (node.is_number()) return {node.get<double>(), 0.0};
  if (node.is_array() && node.size() == 2 && node[0].is_number() && node[1].is_number())
    return {node[0].get<double>(), node[1].get<double>()};
  schema_error(path, "expected a number or [re, im]");
}

Vec3 parse_vec3(const json& node, const std::string& path) {
  if (!node.is_array() || node.size() != 3) schema_error(path, "expected a 3-vector");
  return {get<double>(node[0], path), get<double>(node[1], path), get<double>(node[2], path)};
}

FormFactor parse_form_factor(const json& node, const std::string& path) {
  check_keys(node, path, {"nu", "cutoff", "edge", "normalization"});
  FormFactor f;
  f.nu = field(node, "nu", path, f.nu);
  f.cutoff = field(node, "cutoff", path, f.cutoff);
  f.edge = field(node, "edge", path, f.edge);
  f.normalization = field(node, "normalization", path, f.normalization);
  try {
    validate(f);
  } catch (const std::exception& e) {
    schema_error(path, e.what());
  }
  return f;
}

SpeciesConfig parse_species(const json& node, const std::string& path) {
  check_keys(node, path, {"name", "mass", "points", "spins", "weights", "chains"});
  SpeciesConfig s;
  s.name = field<std::string>(node, "name", path, "");
  s.mass = field(node, "mass", path, 0.0);
  if (!(s.mass >= 0.0)) schema_error(path + ".mass", "must be non-negative");
  const json& pts = required(node, "points", path);
  if (!pts.is_array() || pts.empty()) schema_error(path + ".points", "expected a non-empty array");
  for (std::size_t j = 0; j < pts.size(); ++j) s.points.push_back(parse_vec3(pts[j], path + ".points[" + std::to_string(j) + "]"));
  s.spins = field(node, "spins", path, s.spins);
  s.weights = field(node, "weights", path, std::vector<double>(s.points.size(), 1.0));
  s.chains = field(node, "chains", path, s.chains);
  return s;
}

KernelConfig parse_kernel(const json& node, const std::string& path, std::size_t n) {
  check_keys(node, path, {"family", "processes", "value", "width", "seed", "scale", "factors", "cutoff", "sigma", "nu",
                          "edge", "quadrature_nodes"});
  KernelConfig k;
  k.family = field<std::string>(node, "family", path, k.family);
  static const std::set<std::string> families{"constant", "gaussian", "power", "random", "fermi"};
  if (!families.count(k.family)) schema_error(path + ".family", "unknown kernel family '" + k.family + "'");
  k.processes = field(node, "processes", path, k.processes);
  for (const auto& label : k.processes) {
    try {
      parse_signature(n, label);
    } catch (const std::exception& e) {
      schema_error(path + ".processes", e.what());
    }
  }
  if (node.contains("value")) k.value = parse_complex(node.at("value"), path + ".value");
  k.width = field(node, "width", path, k.width);
  k.seed = field(node, "seed", path, k.seed);
  k.scale = field(node, "scale", path, k.scale);
  if (node.contains("factors")) {
    const json& fs = node.at("factors");
    if (!fs.is_array()) schema_error(path + ".factors", "expected an array");
    for (std::size_t i = 0; i < fs.size(); ++i)
      k.factors.push_back(parse_form_factor(fs[i], path + ".factors[" + std::to_string(i) + "]"));
  }
  if (k.family == "power" && k.factors.size() != n) schema_error(path + ".factors", "one form factor per species");
  if (k.family == "fermi") {
    if (n != 4) schema_error(path + ".family", "the fermi family needs four species");
    k.fermi.cutoff = field(node, "cutoff", path, k.fermi.cutoff);
    k.fermi.sigma = field(node, "sigma", path, k.fermi.sigma);
    k.fermi.nu = field(node, "nu", path, k.fermi.nu);
    k.fermi.edge = field(node, "edge", path, k.fermi.edge);
    k.fermi.quadrature_nodes = field(node, "quadrature_nodes", path, k.fermi.quadrature_nodes);
    if (node.contains("value")) k.fermi.coupling = k.value;
    if (k.fermi.nu.size() != 4) schema_error(path + ".nu", "one exponent per species");
  }
  if (k.family == "gaussian" && !(k.width > 0.0)) schema_error(path + ".width", "must be positive");
  return k;
}

void parse_solver(const json& node, const std::string& path, SolverSettings& s) {
  check_keys(node, path, {"method", "tolerance", "dense_cap", "krylov_dim", "max_restarts", "degeneracy_tolerance"});
  if (node.contains("method")) {
    try {
      s.method = parse_solver_method(get<std::string>(node.at("method"), path + ".method"));
    } catch (const std::invalid_argument& e) {
      schema_error(path + ".method", e.what());
    }
  }
  s.tolerance = field(node, "tolerance", path, s.tolerance);
  s.dense_cap = field(node, "dense_cap", path, s.dense_cap);
  s.krylov_dim = field(node, "krylov_dim", path, s.krylov_dim);
  s.max_restarts = field(node, "max_restarts", path, s.max_restarts);
  s.degeneracy_tolerance = field(node, "degeneracy_tolerance", path, s.degeneracy_tolerance);
}

void parse_verify(const json& node, const std::string& path, VerifyConfig& v, std::size_t n) {
  check_keys(node, path, {"trials", "epsilon", "i0", "s", "thetas", "interpolation_trials", "families", "mus",
                          "gap_couplings", "number_target", "number_variant", "uniformity_factor"});
  v.trials = field(node, "trials", path, v.trials);
  v.epsilon = field(node, "epsilon", path, v.epsilon);
  if (!(v.epsilon > 0.0 && v.epsilon < 1.0)) schema_error(path + ".epsilon", "must lie in (0, 1)");
  v.i0 = field(node, "i0", path, v.i0);
  if (v.i0 >= n) schema_error(path + ".i0", "species index out of range");
  v.s = field(node, "s", path, v.s);
  if (!(v.s > 0.5)) schema_error(path + ".s", "must exceed 1/2");
  v.thetas = field(node, "thetas", path, v.thetas);
  v.interpolation_trials = field(node, "interpolation_trials", path, v.interpolation_trials);
  v.families = field(node, "families", path, v.families);
  for (const auto& f : v.families) {
    try {
      parse_trial_family(f);
    } catch (const std::invalid_argument& e) {
      schema_error(path + ".families", e.what());
    }
  }
  v.mus = field(node, "mus", path, v.mus);
  v.gap_couplings = field(node, "gap_couplings", path, v.gap_couplings);
  v.number_target = field(node, "number_target", path, v.number_target);
  if (v.number_target >= n) schema_error(path + ".number_target", "species index out of range");
  v.number_variant = field<std::string>(node, "number_variant", path, v.number_variant);
  if (v.number_variant != "massless" && v.number_variant != "massive")
    schema_error(path + ".number_variant", "expected 'massless' or 'massive'");
  v.uniformity_factor = field(node, "uniformity_factor", path, v.uniformity_factor);
}

void parse_infrared(const json& node, const std::string& path, InfraredConfig& ir, std::size_t n) {
  check_keys(node, path, {"targets", "signature", "r", "cutoff", "levels", "ratio", "l_max", "coarse_l_max", "box",
                          "nodes_per_panel", "tail_tolerance", "refinement_tolerance", "radial_nodes", "polar_nodes",
                          "azimuth_nodes", "divergence_margin"});
  ir.targets = field(node, "targets", path, ir.targets);
  for (auto t : ir.targets)
    if (t >= n) schema_error(path + ".targets", "species index out of range");
  ir.signature = field<std::string>(node, "signature", path, ir.signature);
  ir.r = field(node, "r", path, ir.r);
  if (!(ir.r >= 1.0 && ir.r < 2.0)) schema_error(path + ".r", "must lie in [1, 2)");
  ir.cutoff = field(node, "cutoff", path, ir.cutoff);
  auto& s = ir.settings;
  s.levels = field(node, "levels", path, s.levels);
  s.ratio = field(node, "ratio", path, s.ratio);
  s.radial_nodes = field(node, "radial_nodes", path, s.radial_nodes);
  s.polar_nodes = field(node, "polar_nodes", path, s.polar_nodes);
  s.azimuth_nodes = field(node, "azimuth_nodes", path, s.azimuth_nodes);
  s.divergence_margin = field(node, "divergence_margin", path, s.divergence_margin);
  auto& c = s.continuum;
  c.l_max = field(node, "l_max", path, c.l_max);
  c.coarse_l_max = field(node, "coarse_l_max", path, c.coarse_l_max);
  c.box = field(node, "box", path, c.box);
  c.nodes_per_panel = field(node, "nodes_per_panel", path, c.nodes_per_panel);
  c.tail_tolerance = field(node, "tail_tolerance", path, c.tail_tolerance);
  c.refinement_tolerance = field(node, "refinement_tolerance", path, c.refinement_tolerance);
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  check_keys(doc, "$", {"name", "species", "truncation", "max_modes", "kernels", "coupling", "mass_limit", "verify",
                        "infrared", "solver", "seed", "output_dir", "expected_fail"});
  RunConfig c;
  c.source = doc;
  c.name = field<std::string>(doc, "name", "$", c.name);
  const json& sp = required(doc, "species", "$");
  if (!sp.is_array() || sp.empty()) schema_error("$.species", "expected a non-empty array");
  for (std::size_t i = 0; i < sp.size(); ++i) c.species.push_back(parse_species(sp[i], "$.species[" + std::to_string(i) + "]"));
  const std::size_t n = c.species.size();
  if (doc.contains("truncation") && !doc.at("truncation").is_null()) {
    Truncation t{get<std::vector<std::size_t>>(doc.at("truncation"), "$.truncation")};
    if (t.max_particles.size() != n) schema_error("$.truncation", "one cap per species");
    c.truncation = t;
  }
  c.max_modes = field(doc, "max_modes", "$", c.max_modes);
  const json& ks = required(doc, "kernels", "$");
  if (!ks.is_array() || ks.empty()) schema_error("$.kernels", "expected a non-empty array");
  for (std::size_t i = 0; i < ks.size(); ++i) c.kernels.push_back(parse_kernel(ks[i], "$.kernels[" + std::to_string(i) + "]", n));
  c.coupling = field(doc, "coupling", "$", c.coupling);
  if (doc.contains("mass_limit")) {
    const json& ml = doc.at("mass_limit");
    check_keys(ml, "$.mass_limit", {"species", "masses"});
    MassLimitConfig m;
    m.species = get<std::vector<std::size_t>>(required(ml, "species", "$.mass_limit"), "$.mass_limit.species");
    m.masses = get<std::vector<double>>(required(ml, "masses", "$.mass_limit"), "$.mass_limit.masses");
    if (m.species.empty()) schema_error("$.mass_limit.species", "at least one species must be flagged");
    if (m.masses.empty()) schema_error("$.mass_limit.masses", "empty mass grid");
    for (auto s : m.species)
      if (s >= n) schema_error("$.mass_limit.species", "species index out of range");
    for (std::size_t j = 0; j < m.masses.size(); ++j)
      if (!(m.masses[j] > 0.0) || (j > 0 && !(m.masses[j] < m.masses[j - 1])))
        schema_error("$.mass_limit.masses", "masses must be positive and strictly decreasing");
    c.mass_limit = m;
  }
  if (doc.contains("verify")) parse_verify(doc.at("verify"), "$.verify", c.verify, n);
  if (doc.contains("infrared")) parse_infrared(doc.at("infrared"), "$.infrared", c.infrared, n);
  if (doc.contains("solver")) parse_solver(doc.at("solver"), "$.solver", c.solver);
  c.seed = field(doc, "seed", "$", c.seed);
  c.solver.seed = c.seed;
  c.output_dir = field<std::string>(doc, "output_dir", "$", c.output_dir);
  c.expected_fail = field(doc, "expected_fail", "$", c.expected_fail);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path.string() + ": " + e.what());
  }
  return parse_run_config(doc);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.source.dump())));
  return buf;
}

std::size_t species_count(const RunConfig& config) { return config.species.size(); }

ModeTable build_table(const RunConfig& config) { return build_mode_table(config.species, config.max_modes); }

std::vector<KernelSpec> build_kernel_specs(const RunConfig& config) {
  const std::size_t n = config.species.size();
  std::vector<KernelSpec> out;
  std::set<ProcessSignature> seen;
  for (const auto& k : config.kernels) {
    std::vector<ProcessSignature> sigs;
    if (k.processes.empty()) {
      sigs = enumerate_all_processes(n);
    } else {
      for (const auto& label : k.processes) sigs.push_back(parse_signature(n, label));
    }
    for (const auto& sig : sigs) {
      if (!seen.insert(sig).second) throw std::invalid_argument("config: process " + sig.label() + " listed twice");
      if (k.family == "constant") out.push_back(constant_kernel(sig, k.value));
      else if (k.family == "gaussian") out.push_back(gaussian_kernel(sig, k.width, k.value));
      else if (k.family == "power") out.push_back(power_kernel(sig, k.factors, k.value));
      else if (k.family == "random") out.push_back(random_kernel(sig, k.seed, k.scale));
      else out.push_back(fermi_demo_kernel(sig, k.fermi));
    }
  }
  return out;
}

TermList build_terms(const RunConfig& config, const ModeTable& table) {
  TermList terms;
  for (const auto& spec : build_kernel_specs(config))
    terms.emplace_back(spec.signature, sample_kernel_tensor(spec, table));
  return terms;
}

Model build_model(const RunConfig& config) {
  ModeTable table = build_table(config);
  FockBasis basis = enumerate_basis(table, config.truncation);
  HamiltonianBundle bundle = assemble_total(build_terms(config, table), config.coupling, basis, table);
  return Model{std::move(table), std::move(basis), std::move(bundle)};
}

bool expected_to_fail(const RunConfig& config, const std::string& report_name) {
  for (const auto& e : config.expected_fail)
    if (e == report_name) return true;
  return false;
}

}  // namespace fqft
