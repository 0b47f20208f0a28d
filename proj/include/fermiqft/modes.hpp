#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fermiqft/sparse.hpp"

namespace fqft {

using Vec3 = std::array<double, 3>;

double norm3(const Vec3& k);

struct SpeciesConfig {
  std::string name;
  double mass = 0.0;
  std::vector<Vec3> points;
  std::vector<double> spins{0.5};
  std::vector<double> weights;  // one per point, shared by both spin components
  std::vector<std::vector<std::size_t>> chains;
};

struct Mode {
  std::size_t species = 0;
  std::size_t point = 0;
  std::size_t spin_index = 0;
  Vec3 momentum{};
  double spin = 0.5;
  double weight = 1.0;
};

struct Chain {
  std::vector<std::size_t> points;
  double spacing = 0.0;
  Vec3 direction{};  // unit vector from points[j] to points[j+1]
};

class ModeTable {
 public:
  static constexpr std::size_t default_max_modes = 64;

  explicit ModeTable(std::vector<SpeciesConfig> species, std::size_t max_modes = default_max_modes);

  std::size_t species_count() const { return species_.size(); }
  std::size_t mode_count() const { return modes_.size(); }
  const SpeciesConfig& species(std::size_t i) const { return species_.at(i); }
  const std::vector<SpeciesConfig>& all_species() const { return species_; }

  // Modes of species i occupy [offset(i), offset(i) + species_mode_count(i)).
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }
  std::size_t species_mode_count(std::size_t i) const { return offsets_.at(i + 1) - offsets_.at(i); }
  std::size_t spin_count(std::size_t i) const { return species_.at(i).spins.size(); }
  std::size_t point_count(std::size_t i) const { return species_.at(i).points.size(); }

  const Mode& mode(std::size_t m) const { return modes_.at(m); }
  std::size_t global_index(std::size_t species, std::size_t point, std::size_t spin_index) const;
  std::size_t species_of(std::size_t m) const { return modes_.at(m).species; }

  double energy(std::size_t m) const;
  std::vector<double> energies(std::size_t species) const;
  const std::vector<Chain>& chains(std::size_t species) const { return chains_.at(species); }

  ModeTable with_mass(std::size_t species, double mass) const;

 private:
  std::vector<SpeciesConfig> species_;
  std::vector<std::size_t> offsets_;
  std::vector<Mode> modes_;
  std::vector<std::vector<Chain>> chains_;
  std::size_t max_modes_;
};

ModeTable build_mode_table(std::vector<SpeciesConfig> configs, std::size_t max_modes = ModeTable::default_max_modes);

double dispersion(double mass, const Vec3& k);
double dispersion(const ModeTable& table, std::size_t species, const Vec3& k);

// sqrt(sum_m w_m |v_m|^2) over the modes of one species.
double weighted_l2_norm(std::span<const Complex> values, const ModeTable& table, std::size_t species);

}  // namespace fqft
