#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fermiqft/fock.hpp"
#include "fermiqft/hamiltonian.hpp"
#include "fermiqft/modes.hpp"
#include "fermiqft/sparse.hpp"

namespace fqft {

enum class SolverMethod { automatic, dense, iterative };

SolverMethod parse_solver_method(const std::string& name);
std::string to_string(SolverMethod m);

struct SolverSettings {
  SolverMethod method = SolverMethod::automatic;
  double tolerance = 1e-9;  // relative residual target
  std::uint64_t seed = 20240601;
  std::size_t dense_cap = 2048;
  std::size_t krylov_dim = 60;
  std::size_t max_restarts = 400;
  double degeneracy_tolerance = 1e-8;
};

using MatVec = std::function<void(const Vector& in, Vector& out)>;

struct EigenPairs {
  Eigen::VectorXd values;  // ascending
  DenseMatrix vectors;     // columns
  std::string method;
  std::size_t iterations = 0;
};

// Restarted block Krylov (Rayleigh-Ritz with full reorthogonalization) for the lowest eigenpairs.
EigenPairs krylov_lowest(const MatVec& apply, std::size_t dim, std::size_t count, const SolverSettings& settings);
EigenPairs lowest_eigenpairs(const SparseOperator& H, std::size_t count, const SolverSettings& settings);
EigenPairs dense_eigenpairs(const SparseOperator& H);

// Largest singular value; dense SVD for small dimension, Krylov on A^dagger A otherwise.
double spectral_norm(const SparseOperator& A, const SolverSettings& settings = {});
double spectral_norm(const DenseMatrix& A);

struct GroundStateResult {
  double energy = 0.0;
  Vector state;
  double residual = 0.0;
  std::size_t degeneracy = 1;
  std::string method;
};

GroundStateResult ground_state(const SparseOperator& H, const SolverSettings& settings = {});

struct SpectrumReport {
  std::vector<double> eigenvalues;
  double gap = 0.0;  // first eigenvalue above the ground level minus the ground energy
  double single_particle_threshold = 0.0;
  std::string method;
};

SpectrumReport low_spectrum(const SparseOperator& H, std::size_t count, const ModeTable& table,
                            const SolverSettings& settings = {});

struct ChainGradient {
  std::size_t species = 0;
  std::size_t chain = 0;
  std::size_t spin_index = 0;
  std::size_t segment = 0;  // between chain points segment and segment+1
  Vec3 midpoint{};
  // || (psi(xi_{j+1}) - psi(xi_j)) / Delta || with psi(xi) = b(xi) Phi / sqrt(w)
  double value = 0.0;
};

struct ObservableReport {
  std::vector<double> species_numbers;
  double total_number = 0.0;
  // ||b_m Phi|| / sqrt(w_m): continuum-normalized amplitude per mode
  std::vector<double> mode_amplitudes;
  std::vector<ChainGradient> gradients;
};

ObservableReport observables(const GroundStateResult& result, const ModeTable& table, const FockBasis& basis,
                             bool with_gradients = false);

// psi(xi) = b(xi) Phi / sqrt(w_xi) for a global mode.
Vector mode_wavefunction(const Vector& phi, const ModeTable& table, const FockBasis& basis, std::size_t mode);

struct Model {
  ModeTable table;
  FockBasis basis;
  HamiltonianBundle bundle;
};

Model rebuild_with_mass(const Model& model, std::size_t species, double mass);

struct MassCurve {
  std::size_t species = 0;
  std::vector<double> masses;
  std::vector<double> energies;
  std::vector<double> overlaps;        // |<Phi_j, Phi_{j+1}>|
  std::vector<double> cross_energies;  // <Phi_j, H_{m=0} Phi_j>
  std::vector<double> total_numbers;
  std::vector<GroundStateResult> states;
  std::vector<std::size_t> degeneracies;
  double zero_mass_energy = 0.0;
  GroundStateResult zero_mass_state;
  double max_monotonicity_violation = 0.0;
  double max_sandwich_violation = 0.0;
  bool monotone = true;
  bool sandwich = true;
};

MassCurve mass_sweep(const Model& model, std::size_t species, std::span<const double> masses,
                     const SolverSettings& settings = {}, double slack = 1e-9);

}  // namespace fqft
