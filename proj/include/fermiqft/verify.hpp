#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fermiqft/fock.hpp"
#include "fermiqft/hamiltonian.hpp"
#include "fermiqft/kernels.hpp"
#include "fermiqft/modes.hpp"
#include "fermiqft/report.hpp"
#include "fermiqft/spectra.hpp"

namespace fqft {

struct TrialSettings {
  std::size_t trials = 1000;  // Haar-random trials, on top of the structured candidates
  std::uint64_t seed = 20240601;
  double tolerance = 1e-9;
  std::size_t phase_grid = 8;  // angles used to approach the numerical radius of a single term
  std::size_t basis_state_cap = 256;
  std::size_t extremal_dim_cap = 512;  // largest sparsity block solved densely for extremal candidates
};

// |<phi, A phi>| <= ||prod_{i != i0} omega_i^{-1/2} G||_2 ||(X + 1)^{(n-1)/2} phi||^2 with X = sum_{i != i0} H_{f,i},
// A the term or, with `with_conjugate`, the term plus its adjoint (same right side).
BoundReport check_form_bound(const InteractionTerm& term, const ModeTable& table, const FockBasis& basis,
                             std::size_t i0, const TrialSettings& settings, bool with_conjugate = false);

// |<phi, T psi>| <= ||prod omega^{-1/2} G||_2 ||prod_{created != i0} H_{f,i}^{1/2} phi||
//                                            ||prod_{annihilated != i0} H_{f,i}^{1/2} psi||
BoundReport check_refined_form_bound(const InteractionTerm& term, const ModeTable& table, const FockBasis& basis,
                                     std::size_t i0, const TrialSettings& settings);

// ||T phi|| <= ||prod_{i != i0} (1 + omega_i^{-1/2}) G||_2 ||(X + 1)^{(n-1)/2} phi||
BoundReport check_operator_bound(const InteractionTerm& term, const ModeTable& table, const FockBasis& basis,
                                 std::size_t i0, const TrialSettings& settings);

// prod_{i != i0} [spins_i sum_j lambda_{i,j}^{-2s}]^{1/2} over the discrete oscillator eigenvalues.
double hermite_bound_constant(const ModeTable& table, std::size_t i0, double s);
// 2^{(n-1)/2} prod over the 3(n-1) axes of (sum_l (2l+1)^{-2s})^{1/2}.
double reference_hermite_constant(std::size_t n, double s);

// |<phi, T phi>| <= C_s ||prod_{i != i0} h_i^s G||_2 ||phi||^2
BoundReport check_hermite_bound(const InteractionTerm& term, const ModeTable& table, const FockBasis& basis,
                                std::size_t i0, double s, const TrialSettings& settings);

enum class TrialFamily { random_profile, gaussian_profile, projected_kernel };
std::string to_string(TrialFamily f);
TrialFamily parse_trial_family(const std::string& name);

struct InterpolationSettings {
  std::vector<double> thetas{0.0, 0.25, 0.5, 0.75, 1.0};
  double s = 0.75;
  std::size_t trials = 200;
  std::uint64_t seed = 20240601;
  double log_tolerance = 1e-6;
};

// Empirical best constants M_theta of the blended estimate over oscillator-eigentensor trials; interior theta
// must satisfy log M_theta <= (1 - theta) log M_0 + theta log M_1 + tolerance.
BoundReport check_interpolation(const ProcessSignature& sig, const ModeTable& table, const FockBasis& basis,
                                std::size_t i0, TrialFamily family, const InterpolationSettings& settings,
                                const KernelTensor* physical = nullptr);

struct RelativeBoundSettings {
  double epsilon = 0.1;
  std::vector<double> mus{2.0, 1.0, 0.5, 0.25, 0.125};
};

// sup_{x >= 0} ((x + 1)^{1 - eps} - mu x)
double young_constant(double epsilon, double mu);

// ||g H_I phi|| <= mu ||H_f phi|| + C_mu ||phi||: empirical C_mu from the basis scan against the certified
// R C'_{mu/R}, with R = ||g H_I (H_f + 1)^{-(1-eps)}||.
BoundReport check_relative_bound_zero(const HamiltonianBundle& bundle, const FockBasis& basis,
                                      const RelativeBoundSettings& settings);

enum class NumberVariant { massless_target, massive_target };

struct NumberEstimateSettings {
  std::size_t target = 0;
  std::size_t i0 = 1;
  double epsilon = 0.1;
  double uniformity_factor = 4.0;
  NumberVariant variant = NumberVariant::massless_target;
  bool resolvent_check = true;
  double resolvent_tolerance = 1e-7;
  double richardson_tolerance = 0.5;
};

// Per mode xi of the target species: a(xi) |k| / sum_terms ||S G(xi, .)||_2 (or omega(k) for the massive
// variant), maximized over xi at each sweep mass; passes when the per-mass sups stay within the uniformity factor.
BoundReport check_number_estimate(const Model& model, const MassCurve& curve, const NumberEstimateSettings& settings);

// Finite differences of psi = b(xi) Phi / sqrt(w) along the target chains against
// |k|^{-2} sum ||S G slice|| + |k|^{-1} sum ||S grad G slice|| at segment midpoints.
BoundReport check_gradient_estimate(const Model& model, const MassCurve& curve,
                                    const NumberEstimateSettings& settings);

// CAR, adjoint pairs, smeared norms, pull-through, hermiticity, parity (odd n) and the commutator
// decomposition on an untruncated model.
std::vector<BoundReport> exact_identity_suite(const Model& model, std::uint64_t seed, double tolerance = 1e-12,
                                              const SolverSettings& solver = {});

struct GapFit {
  std::vector<double> couplings;
  std::vector<double> gaps;
  double gap0 = 0.0;
  double threshold = 0.0;   // smallest one-particle energy
  double coefficient = 0.0; // least-squares C in gap(g) - gap(0) = C g^2
  double relative_residual = 0.0;
};

GapFit fit_gap(const Model& model, const std::vector<double>& couplings, const SolverSettings& solver = {});
BoundReport check_gap_proxy(const Model& model, const std::vector<double>& couplings, double max_residual = 0.1,
                            const SolverSettings& solver = {});

}  // namespace fqft
