#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fqft {

// Species order (i_1,...,i_n) of one process: the first p are created, the rest annihilated.
// Species are 0-based internally; labels print them 1-based.
struct ProcessSignature {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<std::size_t> order;

  std::span<const std::size_t> created() const { return {order.data(), p}; }
  std::span<const std::size_t> annihilated() const { return {order.data() + p, n - p}; }
  bool is_created(std::size_t species) const;
  // Position (0-based) of a species within order.
  std::size_t position(std::size_t species) const;
  std::string label() const;
  bool valid() const;

  auto operator<=>(const ProcessSignature&) const = default;
};

ProcessSignature parse_signature(std::size_t n, const std::string& label);

std::vector<ProcessSignature> enumerate_processes(std::size_t n, std::size_t p);
std::vector<ProcessSignature> enumerate_all_processes(std::size_t n);
// 1 for p in {0, n}, otherwise binomial(n-1, p-1).
std::size_t process_count(std::size_t n, std::size_t p);

}  // namespace fqft
