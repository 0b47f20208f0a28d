#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fermiqft/cli.hpp"
#include "fermiqft/config.hpp"
#include "fermiqft/kernels.hpp"
#include "fermiqft/processes.hpp"
#include "fermiqft/spectra.hpp"
#include "fermiqft/verify.hpp"

namespace py = pybind11;
using namespace fqft;

namespace {

// Reports cross the boundary as JSON text; the Python side decodes them.
std::vector<std::string> dump_reports(const std::vector<BoundReport>& reports) {
  std::vector<std::string> out;
  for (const auto& r : reports) out.push_back(to_json(r).dump());
  return out;
}

py::tuple triplets(const SparseOperator& op) {
  const auto nnz = static_cast<py::ssize_t>(op.nnz());
  py::array_t<std::int64_t> rows(nnz), cols(nnz);
  py::array_t<std::complex<double>> values(nnz);
  auto r = rows.mutable_unchecked<1>();
  auto c = cols.mutable_unchecked<1>();
  auto v = values.mutable_unchecked<1>();
  py::ssize_t k = 0;
  for (const auto& e : op.triplets()) {
    r(k) = static_cast<std::int64_t>(e.row);
    c(k) = static_cast<std::int64_t>(e.col);
    v(k) = e.value;
    ++k;
  }
  return py::make_tuple(rows, cols, values, op.dimension());
}

py::dict command_result(const CommandResult& res) {
  py::list entries;
  for (const auto& e : res.entries) {
    py::dict d;
    d["suite"] = e.suite;
    d["verdict"] = to_string(e.verdict);
    d["report"] = to_json(e.report).dump();
    entries.append(d);
  }
  py::list written;
  for (const auto& p : res.written) written.append(p.string());
  py::dict out;
  out["entries"] = entries;
  out["summary"] = res.summary.dump();
  out["written"] = written;
  out["exit_code"] = res.exit_code();
  return out;
}

using Command = CommandResult (*)(const RunConfig&, const CommandOptions&);

}  // namespace

PYBIND11_MODULE(_fermiqft, m) {
  m.doc() = "Native core of fermiqft";

  py::register_exception<std::invalid_argument>(m, "ConfigError", PyExc_ValueError);

  m.def("process_count", &process_count, py::arg("n"), py::arg("p"));
  m.def(
      "enumerate_processes",
      [](std::size_t n, std::size_t p) {
        std::vector<std::string> labels;
        for (const auto& s : enumerate_processes(n, p)) labels.push_back(s.label());
        return labels;
      },
      py::arg("n"), py::arg("p"));

  m.def(
      "exponent_table",
      [](std::size_t n, double epsilon, const std::vector<bool>& massless, std::size_t i0) {
        py::list out;
        for (const auto& e : exponent_table(n, epsilon, massless, i0)) {
          py::dict d;
          d["species"] = e.species;
          d["role"] = e.role == ExponentRole::massive ? "massive" : e.role == ExponentRole::massless ? "massless" : "exempt";
          d["offset"] = py::make_tuple(e.offset.numerator(), e.offset.denominator());
          d["text"] = e.text();
          d["value"] = e.value(epsilon);
          out.append(d);
        }
        return out;
      },
      py::arg("n"), py::arg("epsilon"), py::arg("massless"), py::arg("i0"));

  m.def("young_constant", &young_constant, py::arg("epsilon"), py::arg("mu"));
  m.def("reference_hermite_constant", &reference_hermite_constant, py::arg("n"), py::arg("s"));
  m.def("power_counting_exponent", &power_counting_exponent, py::arg("nu"), py::arg("r"));

  py::class_<RunConfig>(m, "RunConfig")
      .def_static("from_json", [](const std::string& text) { return parse_run_config(nlohmann::json::parse(text)); })
      .def_static("load", [](const std::string& path) { return load_run_config(path); })
      .def_readonly("name", &RunConfig::name)
      .def_readwrite("coupling", &RunConfig::coupling)
      .def_readwrite("seed", &RunConfig::seed)
      .def_property_readonly("n", [](const RunConfig& c) { return c.species.size(); })
      .def_property_readonly("hash", [](const RunConfig& c) { return config_hash(c); })
      .def("expected_to_fail", &expected_to_fail);

  py::class_<Model>(m, "Model")
      .def(py::init(&build_model), py::arg("config"))
      .def_property_readonly("dimension", [](const Model& mo) { return mo.basis.size(); })
      .def_property_readonly("modes", [](const Model& mo) { return mo.table.mode_count(); })
      .def_property_readonly("n", [](const Model& mo) { return mo.bundle.n; })
      .def("hamiltonian", [](const Model& mo) { return triplets(mo.bundle.total); })
      .def("free_hamiltonian", [](const Model& mo) { return triplets(mo.bundle.free); })
      .def("interaction", [](const Model& mo) { return triplets(mo.bundle.interaction); })
      .def("ground_state", [](const Model& mo) {
        const auto gs = ground_state(mo.bundle.total);
        return py::make_tuple(gs.energy, Eigen::VectorXcd(gs.state));
      })
      .def(
          "mass_curve",
          [](const Model& mo, std::size_t species, const std::vector<double>& masses) {
            const auto c = mass_sweep(mo, species, masses);
            py::dict d;
            d["energies"] = c.energies;
            d["zero_mass_energy"] = c.zero_mass_energy;
            d["monotone"] = c.monotone;
            d["sandwich"] = c.sandwich;
            return d;
          },
          py::arg("species"), py::arg("masses"))
      .def(
          "exact_identities",
          [](const Model& mo, std::uint64_t seed, double tolerance) {
            return dump_reports(exact_identity_suite(mo, seed, tolerance));
          },
          py::arg("seed") = 20240601, py::arg("tolerance") = 1e-12);

  m.def("run_suite", [](const RunConfig& c, const Model& mo, const std::string& suite) {
    return dump_reports(run_suite(c, mo, suite));
  });

  auto bind_command = [&m](const char* name, Command fn) {
    m.def(
        name,
        [fn](const RunConfig& c, const std::string& report_dir, const std::vector<std::string>& suites) {
          CommandOptions opt;
          opt.report_dir = report_dir;
          if (!suites.empty()) opt.suites = suites;
          return command_result(fn(c, opt));
        },
        py::arg("config"), py::arg("report_dir"), py::arg("suites") = std::vector<std::string>{});
  };
  bind_command("cmd_build", &cmd_build);
  bind_command("cmd_verify", &cmd_verify);
  bind_command("cmd_groundstate", &cmd_groundstate);
  bind_command("cmd_masslimit", &cmd_masslimit);
  bind_command("cmd_fermi_demo", &cmd_fermi_demo);
}
