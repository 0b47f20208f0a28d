#include "fermiqft/modes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fqft {

namespace {

Chain validate_chain(const SpeciesConfig& s, const std::vector<std::size_t>& idx) {
  if (idx.size() < 2) throw std::invalid_argument("species '" + s.name + "': chain needs at least 2 points");
  for (auto i : idx)
    if (i >= s.points.size()) throw std::invalid_argument("species '" + s.name + "': chain index out of range");
  Chain c;
  c.points = idx;
  Vec3 d{};
  for (int a = 0; a < 3; ++a) d[a] = s.points[idx[1]][a] - s.points[idx[0]][a];
  c.spacing = norm3(d);
  if (!(c.spacing > 0.0)) throw std::invalid_argument("species '" + s.name + "': chain spacing must be positive");
  for (int a = 0; a < 3; ++a) c.direction[a] = d[a] / c.spacing;
  const double tol = 1e-9 * std::max(1.0, c.spacing);
  for (std::size_t j = 1; j + 1 < idx.size(); ++j) {
    for (int a = 0; a < 3; ++a) {
      double step = s.points[idx[j + 1]][a] - s.points[idx[j]][a];
      if (std::abs(step - d[a]) > tol)
        throw std::invalid_argument("species '" + s.name + "': chain is not collinear with uniform spacing");
    }
  }
  return c;
}

}  // namespace

double norm3(const Vec3& k) { return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]); }

ModeTable::ModeTable(std::vector<SpeciesConfig> species, std::size_t max_modes)
    : species_(std::move(species)), max_modes_(max_modes) {
  if (species_.empty()) throw std::invalid_argument("mode table: empty species list");
  offsets_.push_back(0);
  for (std::size_t i = 0; i < species_.size(); ++i) {
    auto& s = species_[i];
    if (s.name.empty()) s.name = "species" + std::to_string(i + 1);
    if (!(s.mass >= 0.0) || !std::isfinite(s.mass))
      throw std::invalid_argument("species '" + s.name + "': mass must be finite and >= 0");
    if (s.points.empty()) throw std::invalid_argument("species '" + s.name + "': no mode points");
    if (s.spins.empty()) throw std::invalid_argument("species '" + s.name + "': no spin components");
    if (s.weights.empty()) s.weights.assign(s.points.size(), 1.0);
    if (s.weights.size() != s.points.size())
      throw std::invalid_argument("species '" + s.name + "': weights length differs from points length");
    for (double w : s.weights)
      if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("species '" + s.name + "': nonpositive weight");
    std::sort(s.spins.begin(), s.spins.end());
    for (std::size_t a = 0; a < s.spins.size(); ++a) {
      if (s.spins[a] != 0.5 && s.spins[a] != -0.5)
        throw std::invalid_argument("species '" + s.name + "': spin must be -1/2 or +1/2");
      if (a > 0 && s.spins[a] == s.spins[a - 1])
        throw std::invalid_argument("species '" + s.name + "': duplicate (point, spin) mode");
    }
    for (std::size_t a = 0; a < s.points.size(); ++a)
      for (std::size_t b = a + 1; b < s.points.size(); ++b)
        if (s.points[a] == s.points[b])
          throw std::invalid_argument("species '" + s.name + "': duplicate (point, spin) mode");

    std::vector<Chain> chains;
    for (const auto& c : s.chains) chains.push_back(validate_chain(s, c));
    chains_.push_back(std::move(chains));

    for (std::size_t p = 0; p < s.points.size(); ++p)
      for (std::size_t a = 0; a < s.spins.size(); ++a)
        modes_.push_back({i, p, a, s.points[p], s.spins[a], s.weights[p]});
    offsets_.push_back(modes_.size());
  }
  if (modes_.size() > max_modes_)
    throw std::invalid_argument("mode table: " + std::to_string(modes_.size()) + " modes exceed cap " +
                                std::to_string(max_modes_));
}

std::size_t ModeTable::global_index(std::size_t species, std::size_t point, std::size_t spin_index) const {
  if (species >= species_.size() || point >= point_count(species) || spin_index >= spin_count(species))
    throw std::out_of_range("mode table: (species, point, spin) out of range");
  return offsets_[species] + point * spin_count(species) + spin_index;
}

double ModeTable::energy(std::size_t m) const {
  const auto& md = modes_.at(m);
  return dispersion(species_[md.species].mass, md.momentum);
}

std::vector<double> ModeTable::energies(std::size_t species) const {
  std::vector<double> e;
  for (std::size_t m = offset(species); m < offset(species) + species_mode_count(species); ++m)
    e.push_back(energy(m));
  return e;
}

ModeTable ModeTable::with_mass(std::size_t species, double mass) const {
  auto copy = species_;
  copy.at(species).mass = mass;
  return ModeTable(std::move(copy), max_modes_);
}

ModeTable build_mode_table(std::vector<SpeciesConfig> configs, std::size_t max_modes) {
  return ModeTable(std::move(configs), max_modes);
}

double dispersion(double mass, const Vec3& k) {
  return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + mass * mass);
}

double dispersion(const ModeTable& table, std::size_t species, const Vec3& k) {
  return dispersion(table.species(species).mass, k);
}

double weighted_l2_norm(std::span<const Complex> values, const ModeTable& table, std::size_t species) {
  const std::size_t count = table.species_mode_count(species);
  if (values.size() != count)
    throw std::invalid_argument("weighted_l2_norm: expected " + std::to_string(count) + " values, got " +
                                std::to_string(values.size()));
  double acc = 0.0;
  for (std::size_t j = 0; j < count; ++j) acc += table.mode(table.offset(species) + j).weight * std::norm(values[j]);
  return std::sqrt(acc);
}

}  // namespace fqft
