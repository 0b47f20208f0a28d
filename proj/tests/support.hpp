#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "fermiqft/modes.hpp"

namespace fqft::testing {

// Annihilator of mode m on M modes as an explicit Kronecker product: Z on modes below m, sigma^- on m.
// Mode q is bit q of the basis index, so the product runs from mode M-1 (leftmost) down to mode 0.
inline Eigen::MatrixXcd kron_annihilator(std::size_t M, std::size_t m) {
  Eigen::Matrix2cd Z, I, lower;
  Z << 1, 0, 0, -1;
  I.setIdentity();
  lower << 0, 1, 0, 0;  // |0><1|
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (std::size_t q = M; q-- > 0;) {
    const Eigen::Matrix2cd& f = q < m ? Z : (q == m ? lower : I);
    out = Eigen::kroneckerProduct(out, f).eval();
  }
  return out;
}

inline SpeciesConfig species(double mass, std::vector<Vec3> points, std::vector<double> weights = {},
                             std::vector<double> spins = {0.5}) {
  SpeciesConfig s;
  s.mass = mass;
  s.points = std::move(points);
  s.weights = std::move(weights);
  s.spins = std::move(spins);
  return s;
}

// Two species, two points each, one spin: 4 modes.
inline ModeTable small_table(double m0 = 1.0, double m1 = 0.7) {
  return ModeTable({species(m0, {{0.3, 0, 0}, {0, 0.5, 0}}, {0.5, 0.25}),
                    species(m1, {{0, 0, 0.4}, {0.2, 0.2, 0}}, {0.4, 0.6})});
}

inline Eigen::VectorXcd random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = {nd(rng), nd(rng)};
  return v;
}

}  // namespace fqft::testing
