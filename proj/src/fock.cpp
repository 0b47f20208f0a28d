#include "fermiqft/fock.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace fqft {

namespace {

void check_mode(const FockBasis& basis, std::size_t mode) {
  if (mode >= basis.mode_count())
    throw std::out_of_range("invalid mode index " + std::to_string(mode) + " (mode count " +
                            std::to_string(basis.mode_count()) + ")");
}

void check_species(const ModeTable& table, std::size_t species) {
  if (species >= table.species_count()) throw std::out_of_range("invalid species index " + std::to_string(species));
}

}  // namespace

FockBasis::FockBasis(std::size_t mode_count, std::vector<Occupation> states, std::vector<Occupation> species_masks,
                     std::optional<Truncation> truncation)
    : mode_count_(mode_count),
      states_(std::move(states)),
      species_masks_(std::move(species_masks)),
      truncation_(std::move(truncation)) {}

std::optional<std::size_t> FockBasis::index_of(Occupation s) const {
  if (!truncation_) {
    if (mode_count_ < 64 && (s >> mode_count_) != 0) return std::nullopt;
    return static_cast<std::size_t>(s);
  }
  auto it = std::lower_bound(states_.begin(), states_.end(), s);
  if (it == states_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

FockBasis enumerate_basis(const ModeTable& table, std::optional<Truncation> truncation, std::size_t max_bits,
                          std::size_t max_states) {
  const std::size_t M = table.mode_count();
  std::vector<Occupation> masks;
  for (std::size_t i = 0; i < table.species_count(); ++i) {
    Occupation mask = 0;
    for (std::size_t m = table.offset(i); m < table.offset(i) + table.species_mode_count(i); ++m)
      mask |= Occupation{1} << m;
    masks.push_back(mask);
  }
  if (M > max_bits)
    throw std::length_error("basis: " + std::to_string(M) + " modes exceed the enumeration cap of " +
                            std::to_string(max_bits) + " bits");
  if (truncation && truncation->max_particles.size() != table.species_count())
    throw std::invalid_argument("basis: truncation needs one cap per species");
  const Occupation total = Occupation{1} << M;
  if (!truncation && total > max_states)
    throw std::length_error("basis: " + std::to_string(total) + " states exceed the memory budget");
  std::vector<Occupation> states;
  if (!truncation) {
    states.resize(static_cast<std::size_t>(total));
    for (Occupation s = 0; s < total; ++s) states[s] = s;
  } else {
    for (Occupation s = 0; s < total; ++s) {
      bool keep = true;
      for (std::size_t i = 0; i < masks.size() && keep; ++i)
        keep = static_cast<std::size_t>(std::popcount(s & masks[i])) <= truncation->max_particles[i];
      if (keep) {
        states.push_back(s);
        if (states.size() > max_states) throw std::length_error("basis: truncated basis exceeds the memory budget");
      }
    }
  }
  return FockBasis(M, std::move(states), std::move(masks), std::move(truncation));
}

int jordan_wigner_sign(Occupation s, std::size_t m) {
  const Occupation below = m == 0 ? 0 : (s & ((Occupation{1} << m) - 1));
  return (std::popcount(below) & 1) ? -1 : 1;
}

SparseOperator creation(const ModeTable&, const FockBasis& basis, std::size_t mode) {
  check_mode(basis, mode);
  const Occupation bit = Occupation{1} << mode;
  std::vector<Triplet> e;
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const Occupation s = basis.state(c);
    if (s & bit) continue;
    if (auto r = basis.index_of(s | bit)) e.push_back({*r, c, double(jordan_wigner_sign(s, mode))});
  }
  return SparseOperator::from_triplets(basis.size(), std::move(e));
}

SparseOperator annihilation(const ModeTable&, const FockBasis& basis, std::size_t mode) {
  check_mode(basis, mode);
  const Occupation bit = Occupation{1} << mode;
  std::vector<Triplet> e;
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const Occupation s = basis.state(c);
    if (!(s & bit)) continue;
    if (auto r = basis.index_of(s ^ bit)) e.push_back({*r, c, double(jordan_wigner_sign(s, mode))});
  }
  return SparseOperator::from_triplets(basis.size(), std::move(e));
}

SparseOperator smeared_creation(const ModeTable& table, const FockBasis& basis, std::size_t species,
                                std::span<const Complex> f) {
  check_species(table, species);
  const std::size_t count = table.species_mode_count(species);
  if (f.size() != count) throw std::invalid_argument("smeared: function length differs from species mode count");
  std::vector<Triplet> e;
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const Occupation s = basis.state(c);
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t m = table.offset(species) + j;
      const Occupation bit = Occupation{1} << m;
      if ((s & bit) || f[j] == Complex{}) continue;
      if (auto r = basis.index_of(s | bit))
        e.push_back({*r, c, std::sqrt(table.mode(m).weight) * f[j] * double(jordan_wigner_sign(s, m))});
    }
  }
  return SparseOperator::from_triplets(basis.size(), std::move(e));
}

SparseOperator smeared_annihilation(const ModeTable& table, const FockBasis& basis, std::size_t species,
                                    std::span<const Complex> f) {
  return smeared_creation(table, basis, species, f).adjoint();
}

SparseOperator second_quantize(const ModeTable& table, const FockBasis& basis, std::size_t species,
                               std::span<const double> energies) {
  check_species(table, species);
  const std::size_t count = table.species_mode_count(species);
  if (energies.size() != count) throw std::invalid_argument("second_quantize: energy list length mismatch");
  for (double w : energies)
    if (w < 0.0) throw std::invalid_argument("second_quantize: negative one-particle energy");
  std::vector<double> d(basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const Occupation s = basis.state(c);
    double acc = 0.0;
    for (std::size_t j = 0; j < count; ++j)
      if (s & (Occupation{1} << (table.offset(species) + j))) acc += energies[j];
    d[c] = acc;
  }
  return SparseOperator::diagonal(std::span<const double>(d));
}

SparseOperator free_hamiltonian(const ModeTable& table, const FockBasis& basis, std::size_t species) {
  auto e = table.energies(species);
  return second_quantize(table, basis, species, e);
}

SparseOperator free_hamiltonian(const ModeTable& table, const FockBasis& basis) {
  SparseOperator h(basis.size());
  for (std::size_t i = 0; i < table.species_count(); ++i) h = h + free_hamiltonian(table, basis, i);
  return h;
}

SparseOperator number_operator(const ModeTable& table, const FockBasis& basis, std::optional<std::size_t> species) {
  Occupation mask = 0;
  if (species) {
    check_species(table, *species);
    mask = basis.species_mask(*species);
  } else {
    for (std::size_t i = 0; i < table.species_count(); ++i) mask |= basis.species_mask(i);
  }
  std::vector<double> d(basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c) d[c] = std::popcount(basis.state(c) & mask);
  return SparseOperator::diagonal(std::span<const double>(d));
}

SparseOperator parity(const FockBasis& basis) {
  std::vector<double> d(basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c) d[c] = (std::popcount(basis.state(c)) & 1) ? -1.0 : 1.0;
  return SparseOperator::diagonal(std::span<const double>(d));
}

}  // namespace fqft
