#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "fermiqft/hermite.hpp"
#include "fermiqft/kernel_spec.hpp"
#include "fermiqft/modes.hpp"
#include "fermiqft/processes.hpp"
#include "fermiqft/sparse.hpp"

namespace fqft {

using Rational = boost::rational<long long>;

// ---------------------------------------------------------------- form factors

// f(k) = C |k|^nu chi(|k| / cutoff), chi smooth, equal to 1 below 1 - edge and 0 above 1.
struct FormFactor {
  double nu = 0.0;
  double cutoff = 1.0;
  double edge = 0.5;
  double normalization = 1.0;

  double radial(double r) const;
  double radial_derivative(double r) const;
  double operator()(const Vec3& k) const { return radial(norm3(k)); }
  Vec3 gradient(const Vec3& k) const;
};

void validate(const FormFactor& f);

// Smooth step: 1 for t <= 0, 0 for t >= 1.
double smooth_step(double t);

// max over sampled points at radius r of |d^alpha f / dk_x^alpha| / r^{nu - alpha}, by central differences.
double form_factor_derivative_ratio(const FormFactor& f, int alpha, double r);

// ---------------------------------------------------------------- kernel families

KernelSpec constant_kernel(const ProcessSignature& sig, Complex value);
// c * prod_i exp(-|k_i|^2 / (2 width^2))
KernelSpec gaussian_kernel(const ProcessSignature& sig, double width, Complex value = 1.0);
// c * prod_i f_i(k_i)
KernelSpec power_kernel(const ProcessSignature& sig, const std::vector<FormFactor>& factors, Complex value = 1.0);
// Deterministic pseudo-random amplitude in the unit square, keyed by (seed, momenta, spins).
KernelSpec random_kernel(const ProcessSignature& sig, std::uint64_t seed, double scale = 1.0);

// Momentum-conservation regularizer exp(-|q|^2 / (2 sigma^2)), q = sum_i s_i k_i with s_i = +1 for created,
// -1 for annihilated species.
double delta_reg(std::span<const Vec3> momenta, const ProcessSignature& sig, double sigma);

struct FermiKernelOptions {
  double cutoff = 3.0;
  double sigma = 9.0;
  std::vector<double> nu{0.0, 0.0, 0.0, 0.0};
  double edge = 0.5;
  std::size_t quadrature_nodes = 5;  // per dimension, separable expansion of delta_reg
  Complex coupling = 1.0;
};

KernelSpec fermi_demo_kernel(const ProcessSignature& sig, const FermiKernelOptions& options);

// ---------------------------------------------------------------- exponents

enum class ExponentRole { massive, massless, exempt };

struct ExponentEntry {
  std::size_t species = 0;
  ExponentRole role = ExponentRole::massive;
  Rational offset;  // exponent = offset + epsilon, or 0 for the exempt species
  bool plus_epsilon = true;
  double value(double epsilon) const { return boost::rational_cast<double>(offset) + (plus_epsilon ? epsilon : 0.0); }
  std::string text() const;
  // nu threshold for |k|^nu form factors as epsilon -> 0: nu > 6 * offset - 3/2
  Rational nu_threshold() const { return Rational(6) * offset - Rational(3, 2); }
};

// massive (not i0): 1/2 - 1/(n-1) + eps; massless (not i0): 1/2 - (5/6)/(n-1) + eps; i0: 0.
std::vector<ExponentEntry> exponent_table(std::size_t n, double epsilon, const std::vector<bool>& massless,
                                          std::size_t i0);
std::vector<double> exponent_values(const std::vector<ExponentEntry>& table, double epsilon);

// ---------------------------------------------------------------- discrete regularity on mode tables

// Orthonormal basis of C^{points} from sampled 3D Hermite functions sqrt(w_m) E_l(k_m), ordered by total level.
struct ModeOscillator {
  std::size_t species = 0;
  DenseMatrix basis;                         // points x points, column j = u_j
  std::vector<double> eigenvalues;           // prod_axes (2 l_a + 1)
  std::vector<std::array<int, 3>> levels;
};

ModeOscillator mode_oscillator(const ModeTable& table, std::size_t species, double tolerance = 1e-8);
// h^a acting on the point index of a species; identity on spin.
DenseMatrix mode_oscillator_power(const ModeOscillator& osc, const ModeTable& table, double a);

// Applies prod_i h_i^{a_i} to the species axes of a kernel tensor (a_i = 0 leaves the axis alone).
KernelTensor apply_mode_regularity(const KernelTensor& tensor, const ModeTable& table,
                                   std::span<const double> exponents);

// Multiplies the tensor by a per-mode weight along one species axis.
KernelTensor scale_species_axis(const KernelTensor& tensor, const ModeTable& table, std::size_t species,
                                std::span<const double> weights);

// ---------------------------------------------------------------- weighted kernel norms

enum class WeightKind {
  unit,
  inverse_sqrt_dispersion,  // omega^{-1/2} on the selected species
  one_plus_inverse_sqrt,    // 1 + omega^{-1/2} on the selected species
  hermite,                  // prod h^{a_i}
  momentum_substitution,    // min over subsets I: |k|^{-1/2} on I and massless species, m^{-1/2} elsewhere
};

struct WeightChoice {
  WeightKind kind = WeightKind::unit;
  std::vector<bool> species;   // which species carry the weight
  std::vector<double> exponents;
  std::vector<std::vector<std::size_t>> subsets;  // candidate I for the substitution variant
};

double weighted_kernel_norm(const KernelTensor& tensor, const ModeTable& table, const WeightChoice& choice);

// ---------------------------------------------------------------- continuum analysis

struct ContinuumSettings {
  std::size_t l_max = 16;
  std::size_t nodes_per_panel = 12;
  double box = 3.0;             // half-width of the sampling box per axis (>= cutoff for compact kernels)
  bool gauss_hermite = false;   // use a Gauss-Hermite grid instead of the composite box grid
  std::size_t hermite_nodes = 40;
  double tail_tolerance = 1e-2;
  std::size_t coarse_l_max = 12;   // truncation compared against l_max for the refinement test
  double refinement_tolerance = 5e-2;
};

struct SeparableNormReport {
  double norm = 0.0;
  double coarse_norm = 0.0;    // same norm with every axis truncated at coarse_l_max
  double tail_fraction = 0.0;  // worst species factor tail
  bool converged = true;       // tail and coarse/fine change within tolerance
};

// ||S G||_2 for a separable kernel with per-species exponent a_i on all three axes of species i.
SeparableNormReport separable_regularity_norm(const SeparableKernel& kernel, std::span<const double> exponents,
                                              std::span<const std::size_t> spin_counts,
                                              const ContinuumSettings& settings);

struct InfraredReport {
  std::size_t species = 0;
  double r = 1.9;
  double cutoff = 1.0;
  std::vector<double> radii;       // lower cutoffs rho_l
  std::vector<double> gs1_values;  // integral over rho_l <= |k| <= cutoff
  std::vector<double> gs2_values;
  double gs1_exponent = 0.0;       // fitted shell exponent; the integral converges at 0 iff positive
  double gs2_exponent = 0.0;
  bool gs1_finite = true;
  bool gs2_finite = true;
  double tail_fraction = 0.0;
  std::string verdict() const { return gs1_finite && gs2_finite ? "finite" : "divergent"; }
};

struct InfraredSettings {
  ContinuumSettings continuum;
  std::size_t levels = 3;
  double ratio = 8.0;           // rho_l = cutoff * ratio^{-(l+1)}
  std::size_t radial_nodes = 16;
  std::size_t polar_nodes = 8;
  std::size_t azimuth_nodes = 12;
  double divergence_margin = 0.05;
};

// Integrals of |k|^{-2r} ||S G(.., xi_{i'}, ..)||^r and |k|^{-r} ||S grad G(.., xi_{i'}, ..)||^r over shells.
InfraredReport infrared_integrals(const SeparableKernel& kernel, std::size_t target, double r, double cutoff,
                                  std::span<const double> exponents, std::span<const std::size_t> spin_counts,
                                  const InfraredSettings& settings);

// Radial power of the shell increments predicted for a |k|^nu form factor: nu r - 2 r + 3 (first condition).
double power_counting_exponent(double nu, double r);

}  // namespace fqft
