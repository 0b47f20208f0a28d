// Acceptance run: one line per criterion, nonzero exit if any fails.
//
//   ./fermiqft_acceptance [config-dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fermiqft/cli.hpp"
#include "fermiqft/config.hpp"
#include "fermiqft/kernels.hpp"
#include "fermiqft/processes.hpp"
#include "fermiqft/spectra.hpp"
#include "fermiqft/verify.hpp"

namespace fs = std::filesystem;
using namespace fqft;

namespace {

fs::path config_dir = FERMIQFT_CONFIG_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

RunConfig load(const std::string& name) { return load_run_config(config_dir / (name + ".json")); }

const std::vector<std::string> identity_configs{"toy", "n2_random", "n3_small", "n3", "n4", "n4_wide"};
const std::vector<std::string> bound_configs{"toy", "n2_random", "n3_small", "n3", "n4"};

Outcome ac1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::set<std::size_t> ns;
  double worst = 0.0;
  std::size_t max_dim = 0;
  for (const auto& name : identity_configs) {
    const RunConfig cfg = load(name);
    const Model model = build_model(cfg);
    ns.insert(model.bundle.n);
    max_dim = std::max(max_dim, model.basis.size());
    for (const auto& r : exact_identity_suite(model, cfg.seed, 1e-12, cfg.solver)) {
      if (r.tolerance == 1e-12) worst = std::max(worst, r.lhs);
      if (!r.pass) {
        o.pass = false;
        o.detail += name + ":" + r.name + " ";
      }
    }
  }
  const double elapsed = seconds_since(t0);
  o.pass = o.pass && identity_configs.size() >= 5 && ns == std::set<std::size_t>{2, 3, 4} && max_dim <= 4096 &&
           elapsed < 60.0;
  o.detail += std::to_string(identity_configs.size()) + " configs, max dim " + std::to_string(max_dim) +
              ", worst deviation " + fmt(worst) + ", " + fmt(elapsed) + " s";
  return o;
}

Outcome ac2() {
  Outcome o;
  const std::set<std::string> constant_one{"form_bound", "form_bound_symmetrized", "refined_form_bound",
                                           "operator_bound"};
  double worst = 0.0;
  std::size_t instances = 0, min_trials = SIZE_MAX;
  for (const auto& name : bound_configs) {
    RunConfig cfg = load(name);
    cfg.verify.trials = std::max<std::size_t>(cfg.verify.trials, 1000);
    const Model model = build_model(cfg);
    for (const auto& r : run_suite(cfg, model, "bounds")) {
      if (!constant_one.contains(r.name)) continue;
      ++instances;
      worst = std::max(worst, r.ratio);
      min_trials = std::min(min_trials, r.trials);
      if (r.ratio > 1.0 + 1e-9) {
        o.pass = false;
        o.detail += name + ":" + r.name + " ";
      }
    }
  }
  o.pass = o.pass && instances > 0 && min_trials >= 1000;
  o.detail += std::to_string(instances) + " instances, min trials " + std::to_string(min_trials) + ", max ratio " +
              fmt(worst);
  return o;
}

Outcome ac3() {
  Outcome o;
  std::set<std::string> families;
  std::size_t checked = 0;
  double worst = -1.0;
  for (const auto& name : {"n3_small", "n4"}) {
    RunConfig cfg = load(name);
    cfg.verify.thetas = {0.0, 0.25, 0.5, 0.75, 1.0};
    const Model model = build_model(cfg);
    for (const auto& r : run_suite(cfg, model, "interpolation")) {
      families.insert(r.parameters.value("family", ""));
      worst = std::max(worst, r.ratio);
      ++checked;
      if (!r.pass) {
        o.pass = false;
        o.detail += std::string(name) + ":" + r.parameters.value("family", "") + " ";
      }
    }
  }
  o.pass = o.pass && families.size() >= 3;
  o.detail += std::to_string(checked) + " runs over " + std::to_string(families.size()) +
              " families, max M_theta / (M_0^(1-theta) M_1^theta) " + fmt(worst);
  return o;
}

Outcome ac4() {
  Outcome o;
  // Species 0 and 1 massless, 2 massive, 3 exempt.
  const auto table = exponent_table(4, 0.1, {true, true, false, false}, 3);
  const Rational massive(1, 6), massless(2, 9);
  for (const auto& e : table) {
    if (e.role == ExponentRole::massive) o.pass = o.pass && e.offset == massive && e.plus_epsilon;
    if (e.role == ExponentRole::massless) o.pass = o.pass && e.offset == massless && e.plus_epsilon;
    if (e.role == ExponentRole::exempt) o.pass = o.pass && e.species == 3 && e.offset.numerator() == 0;
    o.detail += e.text() + " ";
  }
  o.pass = o.pass && table.size() == 4;
  return o;
}

// Lowest eigenvalue of [[0, g], [g, omega]].
double two_level_ground(double omega, double g) { return (omega - std::sqrt(omega * omega + 4.0 * g * g)) / 2.0; }

Outcome ac5() {
  Outcome o;
  const RunConfig cfg = load("toy");
  const Model model = build_model(cfg);
  const double e = ground_state(model.bundle.total, cfg.solver).energy;
  const double err0 = std::abs(e - (1.0 - std::sqrt(2.0)));
  o.pass = err0 <= 1e-10;
  const auto& masses = cfg.mass_limit->masses;
  const MassCurve curve = mass_sweep(model, 0, masses, cfg.solver);
  double err = 0.0;
  for (std::size_t j = 0; j < masses.size(); ++j) {
    const double m = masses[j];
    err = std::max(err, std::abs(curve.energies[j] - ((1.0 + m) - std::sqrt((1.0 + m) * (1.0 + m) + 4.0)) / 2.0));
    err = std::max(err, std::abs(curve.energies[j] - two_level_ground(1.0 + m, cfg.coupling)));
  }
  o.pass = o.pass && masses.size() >= 5 && err <= 1e-9;
  o.detail = "E - (1 - sqrt 2) = " + fmt(err0) + ", curve max error " + fmt(err) + " at " +
             std::to_string(masses.size()) + " masses";
  return o;
}

Outcome ac6() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load("n3_smooth");
  const Model model = build_model(cfg);
  const auto& masses = cfg.mass_limit->masses;
  bool geometric = masses.size() == 6 && std::abs(masses.back() - 1e-3) < 1e-15;
  for (std::size_t j = 2; j < masses.size(); ++j)
    geometric = geometric && std::abs(masses[j] / masses[j - 1] - masses[1] / masses[0]) < 1e-9;
  const MassCurve curve = mass_sweep(model, cfg.mass_limit->species.front(), masses, cfg.solver);
  const double elapsed = seconds_since(t0);
  const bool interacting = model.bundle.interaction.nnz() > 0 && curve.total_numbers.front() > 0.0;
  o.pass = geometric && interacting && model.bundle.n == 3 && model.basis.size() <= 4096 && curve.monotone &&
           curve.sandwich && elapsed < 300.0;
  o.detail = "dim " + std::to_string(model.basis.size()) + ", monotonicity violation " +
             fmt(curve.max_monotonicity_violation) + ", sandwich violation " + fmt(curve.max_sandwich_violation) +
             ", " + fmt(elapsed) + " s";
  return o;
}

Outcome ac7() {
  Outcome o;
  const RunConfig cfg = load("n3_smooth");
  const Model model = build_model(cfg);
  bool finite = !cfg.infrared.targets.empty();
  for (const auto& r : infrared_reports(cfg)) finite = finite && r.details.value("verdict", "") == "finite";
  std::size_t seen = 0;
  for (const auto& r : run_suite(cfg, model, "number")) {
    if (r.name != "number_estimate" && r.name != "gradient_estimate") continue;
    ++seen;
    o.pass = o.pass && r.pass && r.ratio <= 4.0;
    o.detail += r.name + " spread " + fmt(r.ratio) + " ";
  }
  o.pass = o.pass && finite && seen == 2;
  o.detail += finite ? "(infrared finite)" : "(infrared not finite)";
  return o;
}

// Shell exponent of |k|^{-2r} |k|^{nu r} |k|^2 d|k|; the integral at 0 converges iff positive.
bool power_counting_finite(double nu, double r) { return nu * r - 2.0 * r + 3.0 > 0.0; }

Outcome ac8() {
  Outcome o;
  std::size_t cases = 0;
  for (const auto& name : {"fermi_nuhalf", "fermi_nu0"}) {
    const RunConfig base = load(name);
    o.pass = o.pass && base.infrared.settings.levels == 3 && base.infrared.r == 1.9;
    for (double nu : {0.0, 0.25, 0.5, 1.0}) {
      RunConfig cfg = base;
      for (std::size_t t : cfg.infrared.targets) cfg.kernels.front().fermi.nu.at(t) = nu;
      const bool native = nu == base.kernels.front().fermi.nu.at(base.infrared.targets.front());
      for (const auto& r : infrared_reports(cfg)) {
        ++cases;
        const std::string verdict = r.details.value("verdict", "");
        const std::string expected = power_counting_finite(nu, cfg.infrared.r) ? "finite" : "divergent";
        if (verdict != expected) {
          o.pass = false;
          o.detail += std::string(name) + " nu=" + fmt(nu) + ":" + verdict + " ";
        }
        if (native && std::string(name) == "fermi_nuhalf") o.pass = o.pass && verdict == "finite";
        if (native && std::string(name) == "fermi_nu0") o.pass = o.pass && verdict == "divergent";
      }
    }
  }
  o.detail += std::to_string(cases) + " pure-power cases against power counting";
  return o;
}

Outcome ac9() {
  Outcome o;
  const RunConfig cfg = load("n3_massive");
  const Model model = build_model(cfg);
  const auto& g = cfg.verify.gap_couplings;
  const bool span = !g.empty() && *std::min_element(g.begin(), g.end()) >= 0.01 &&
                    *std::max_element(g.begin(), g.end()) <= 0.1;
  const BoundReport r = check_gap_proxy(model, g, 0.1, cfg.solver);
  o.pass = span && r.pass;
  o.detail = "fit residual " + fmt(r.lhs) + ", C = " + fmt(r.empirical_constant);
  return o;
}

// Exhaustive oracle: all orderings of n species, kept when both halves ascend and species 0 leads.
std::set<std::vector<std::size_t>> brute_processes(std::size_t n, std::size_t p) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::set<std::vector<std::size_t>> out;
  do {
    if (order[0] != 0) continue;
    bool ok = true;
    for (std::size_t j = 1; j < n; ++j)
      if (j != p && order[j - 1] > order[j]) ok = false;
    if (ok) out.insert(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

Outcome ac10() {
  Outcome o;
  std::size_t pairs = 0;
  for (std::size_t n = 1; n <= 6; ++n)
    for (std::size_t p = 0; p <= n; ++p) {
      ++pairs;
      const auto oracle = brute_processes(n, p);
      std::set<std::vector<std::size_t>> got;
      for (const auto& s : enumerate_processes(n, p)) got.insert(s.order);
      if (got != oracle || process_count(n, p) != oracle.size()) {
        o.pass = false;
        o.detail += "(n=" + std::to_string(n) + ",p=" + std::to_string(p) + ") ";
      }
    }
  o.detail += std::to_string(pairs) + " (n, p) pairs";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) config_dir = argv[1];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 exact identities", ac1}, {"AC2 constant-1 bounds", ac2}, {"AC3 interpolation", ac3},
      {"AC4 exponent table n=4", ac4}, {"AC5 toy model", ac5},       {"AC6 mass limit", ac6},
      {"AC7 number/gradient", ac7},   {"AC8 infrared detector", ac8}, {"AC9 gap proxy", ac9},
      {"AC10 process counts", ac10}};
  int failures = 0;
  for (const auto& [label, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%-4s %-24s %s\n", o.pass ? "PASS" : "FAIL", label.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
