#include "fermiqft/kernel_spec.hpp"

#include <cmath>
#include <stdexcept>

namespace fqft {

Complex SeparableKernel::evaluate(std::span<const Vec3> momenta) const {
  Complex total{};
  for (const auto& term : terms) {
    Complex prod = term.coefficient;
    for (std::size_t i = 0; i < term.factors.size(); ++i) {
      const auto& f = term.factors[i];
      const auto& k = momenta[i];
      double phase = f.wavevector[0] * k[0] + f.wavevector[1] * k[1] + f.wavevector[2] * k[2];
      prod *= bases.at(f.base)(k) * std::polar(1.0, phase);
    }
    total += prod;
  }
  return total;
}

std::size_t KernelTensor::stride(std::size_t species) const {
  std::size_t s = 1;
  for (std::size_t i = species + 1; i < extents.size(); ++i) s *= extents[i];
  return s;
}

std::size_t KernelTensor::flat_index(std::span<const std::size_t> local_modes) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < extents.size(); ++i) idx = idx * extents[i] + local_modes[i];
  return idx;
}

void KernelTensor::unflatten(std::size_t flat, std::span<std::size_t> local_modes) const {
  for (std::size_t i = extents.size(); i-- > 0;) {
    local_modes[i] = flat % extents[i];
    flat /= extents[i];
  }
}

double KernelTensor::frobenius_norm() const {
  double acc = 0.0;
  for (const auto& v : values) acc += std::norm(v);
  return std::sqrt(acc);
}

bool KernelTensor::is_zero() const {
  for (const auto& v : values)
    if (v != Complex{}) return false;
  return true;
}

KernelTensor KernelTensor::zeros(std::vector<std::size_t> extents) {
  std::size_t total = 1;
  for (auto e : extents) total *= e;
  KernelTensor t;
  t.extents = std::move(extents);
  t.values.assign(total, Complex{});
  return t;
}

KernelTensor sample_kernel_tensor(const KernelSpec& spec, const ModeTable& table, std::size_t budget) {
  if (spec.n != table.species_count() || spec.signature.n != spec.n)
    throw std::invalid_argument("sample_kernel_tensor: kernel arity " + std::to_string(spec.n) +
                                " does not match " + std::to_string(table.species_count()) + " species");
  if (!spec.amplitude) throw std::invalid_argument("sample_kernel_tensor: kernel has no amplitude");
  std::vector<std::size_t> extents;
  std::size_t total = 1;
  for (std::size_t i = 0; i < spec.n; ++i) {
    extents.push_back(table.species_mode_count(i));
    total *= extents.back();
    if (total > budget) throw std::length_error("sample_kernel_tensor: tensor size over budget");
  }
  KernelTensor t = KernelTensor::zeros(std::move(extents));
  std::vector<std::size_t> local(spec.n);
  std::vector<Vec3> momenta(spec.n);
  std::vector<double> spins(spec.n);
  for (std::size_t flat = 0; flat < total; ++flat) {
    t.unflatten(flat, local);
    double w = 1.0;
    for (std::size_t i = 0; i < spec.n; ++i) {
      const auto& md = table.mode(table.offset(i) + local[i]);
      momenta[i] = md.momentum;
      spins[i] = md.spin;
      w *= md.weight;
    }
    t.values[flat] = spec.amplitude(momenta, spins) * std::sqrt(w);
  }
  return t;
}

}  // namespace fqft
