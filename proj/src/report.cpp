#include "fermiqft/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fqft {

double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

namespace {
nlohmann::json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}
}  // namespace

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["parameters"] = r.parameters;
  j["lhs"] = finite_or_string(r.lhs);
  j["rhs"] = finite_or_string(r.rhs);
  j["ratio"] = finite_or_string(r.ratio);
  j["verdict"] = r.pass ? "pass" : "fail";
  j["trials"] = r.trials;
  j["tolerance"] = r.tolerance;
  j["relation"] = r.relation;
  j["empirical_constant"] = finite_or_string(r.empirical_constant);
  if (!r.details.empty()) j["details"] = r.details;
  return j;
}

bool all_pass(const std::vector<BoundReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.pass; });
}

}  // namespace fqft
