#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fermiqft/modes.hpp"
#include "fermiqft/processes.hpp"
#include "fermiqft/sparse.hpp"

namespace fqft {

// Amplitude arguments are indexed by species (0..n-1), not by position in the signature.
using Amplitude = std::function<Complex(std::span<const Vec3> momenta, std::span<const double> spins)>;

// base(k) * exp(i wavevector . k) for one species.
struct PhaseFactor {
  std::size_t base = 0;
  Vec3 wavevector{};
};

struct SeparableTerm {
  Complex coefficient{1.0};
  std::vector<PhaseFactor> factors;  // one per species
};

// G(k_1..k_n) = sum_r c_r prod_i base_{b(r,i)}(k_i) exp(i t_{r,i} . k_i)
struct SeparableKernel {
  std::vector<std::function<Complex(const Vec3&)>> bases;
  std::vector<SeparableTerm> terms;

  Complex evaluate(std::span<const Vec3> momenta) const;
};

struct KernelSpec {
  std::size_t n = 0;
  ProcessSignature signature;
  Amplitude amplitude;
  std::string family;
  std::optional<SeparableKernel> separable;
};

struct KernelTensor {
  std::vector<std::size_t> extents;  // modes per species
  std::vector<Complex> values;       // species 0 is the slowest index

  std::size_t arity() const { return extents.size(); }
  std::size_t size() const { return values.size(); }
  std::size_t stride(std::size_t species) const;
  std::size_t flat_index(std::span<const std::size_t> local_modes) const;
  void unflatten(std::size_t flat, std::span<std::size_t> local_modes) const;
  double frobenius_norm() const;
  bool is_zero() const;

  static KernelTensor zeros(std::vector<std::size_t> extents);
};

inline constexpr std::size_t default_tensor_budget = std::size_t{1} << 22;

// Entries g[m_1..m_n] = G(xi_{m_1},...,xi_{m_n}) * prod_i sqrt(w_{m_i}).
KernelTensor sample_kernel_tensor(const KernelSpec& spec, const ModeTable& table,
                                  std::size_t budget = default_tensor_budget);

}  // namespace fqft
