#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fermiqft/modes.hpp"
#include "fermiqft/sparse.hpp"

namespace fqft {

using Occupation = std::uint64_t;

struct Truncation {
  std::vector<std::size_t> max_particles;  // per species
};

class FockBasis {
 public:
  static constexpr std::size_t default_max_bits = 24;
  static constexpr std::size_t default_max_states = std::size_t{1} << 24;

  FockBasis() = default;
  FockBasis(std::size_t mode_count, std::vector<Occupation> states, std::vector<Occupation> species_masks,
            std::optional<Truncation> truncation);

  std::size_t size() const { return states_.size(); }
  std::size_t mode_count() const { return mode_count_; }
  const std::vector<Occupation>& states() const { return states_; }
  Occupation state(std::size_t i) const { return states_[i]; }
  std::optional<std::size_t> index_of(Occupation s) const;
  bool truncated() const { return truncation_.has_value(); }
  const std::optional<Truncation>& truncation() const { return truncation_; }
  Occupation species_mask(std::size_t species) const { return species_masks_.at(species); }
  std::size_t species_count() const { return species_masks_.size(); }

 private:
  std::size_t mode_count_ = 0;
  std::vector<Occupation> states_;
  std::vector<Occupation> species_masks_;
  std::optional<Truncation> truncation_;
};

FockBasis enumerate_basis(const ModeTable& table, std::optional<Truncation> truncation = std::nullopt,
                          std::size_t max_bits = FockBasis::default_max_bits,
                          std::size_t max_states = FockBasis::default_max_states);

// (-1)^(number of occupied modes with index < m)
int jordan_wigner_sign(Occupation s, std::size_t m);

SparseOperator creation(const ModeTable& table, const FockBasis& basis, std::size_t mode);
SparseOperator annihilation(const ModeTable& table, const FockBasis& basis, std::size_t mode);

// b*(f) = sum_m sqrt(w_m) f_m b*_m and b(f) = sum_m sqrt(w_m) conj(f_m) b_m over one species.
SparseOperator smeared_creation(const ModeTable& table, const FockBasis& basis, std::size_t species,
                                std::span<const Complex> f);
SparseOperator smeared_annihilation(const ModeTable& table, const FockBasis& basis, std::size_t species,
                                    std::span<const Complex> f);

SparseOperator second_quantize(const ModeTable& table, const FockBasis& basis, std::size_t species,
                               std::span<const double> energies);
// dGamma(omega_i) with the table's dispersion.
SparseOperator free_hamiltonian(const ModeTable& table, const FockBasis& basis, std::size_t species);
SparseOperator free_hamiltonian(const ModeTable& table, const FockBasis& basis);

SparseOperator number_operator(const ModeTable& table, const FockBasis& basis,
                               std::optional<std::size_t> species = std::nullopt);
SparseOperator parity(const FockBasis& basis);

}  // namespace fqft
