#include <cmath>

#include <gtest/gtest.h>

#include "fermiqft/config.hpp"
#include "fermiqft/spectra.hpp"
#include "support.hpp"

using namespace fqft;

namespace {

SparseOperator random_hermitian(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, Complex{3.0 * u(rng)}});
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng) < density) {
        const Complex v{u(rng), u(rng)};
        t.push_back({i, j, v});
        t.push_back({j, i, std::conj(v)});
      }
  }
  return SparseOperator::from_triplets(n, t);
}

}  // namespace

TEST(Spectra, SpectralNormMatchesSingularValueOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    DenseMatrix A = DenseMatrix::Random(37, 37);
    A.col(3) *= 5.0;
    const double oracle = Eigen::JacobiSVD<DenseMatrix>(A).singularValues()(0);
    EXPECT_NEAR(spectral_norm(A), oracle, 1e-12 * oracle) << seed;
    EXPECT_NEAR(spectral_norm(SparseOperator::from_dense(A)), oracle, 1e-9 * oracle);
  }
  EXPECT_EQ(spectral_norm(DenseMatrix::Zero(4, 4)), 0.0);
}

TEST(Spectra, KrylovAgreesWithDenseDiagonalization) {
  const SparseOperator H = random_hermitian(300, 0.03, 17);
  const auto dense = dense_eigenpairs(H);
  SolverSettings s;
  s.method = SolverMethod::iterative;
  s.tolerance = 1e-11;
  const auto low = lowest_eigenpairs(H, 4, s);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(low.values[k], dense.values[k], 1e-9) << k;
  const auto gs = ground_state(H, s);
  EXPECT_NEAR(gs.energy, dense.values[0], 1e-9);
  EXPECT_LT((H.apply(gs.state) - gs.energy * gs.state).norm(), 1e-7);
  EXPECT_NEAR(gs.state.norm(), 1.0, 1e-12);
}

TEST(Spectra, ToyGroundStateAndMassCurve) {
  const RunConfig cfg = load_run_config(std::string(FERMIQFT_CONFIG_DIR) + "/toy.json");
  const Model model = build_model(cfg);
  const auto gs = ground_state(model.bundle.total);
  EXPECT_NEAR(gs.energy, 1.0 - std::sqrt(2.0), 1e-12);
  const auto obs = observables(gs, model.table, model.basis);
  // weight of |11> is sin^2 of the mixing angle: (1 - 1/sqrt 2) / 2
  EXPECT_NEAR(obs.total_number, 1.0 - 1.0 / std::sqrt(2.0), 1e-12);
  const std::vector<double> masses{1.0, 0.3, 0.01};
  const auto curve = mass_sweep(model, 0, masses);
  EXPECT_TRUE(curve.monotone);
  EXPECT_TRUE(curve.sandwich);
  for (std::size_t j = 0; j < masses.size(); ++j) {
    const double w = 1.0 + masses[j];
    EXPECT_NEAR(curve.energies[j], (w - std::sqrt(w * w + 4.0)) / 2.0, 1e-12);
  }
  EXPECT_NEAR(curve.zero_mass_energy, (1.0 - std::sqrt(5.0)) / 2.0, 1e-12);
}

TEST(Spectra, LowSpectrumGapOfFreeModelIsTheLightestMode) {
  const ModeTable t = fqft::testing::small_table();
  const FockBasis b = enumerate_basis(t);
  const auto rep = low_spectrum(free_hamiltonian(t, b), 6, t);
  double lightest = 1e9;
  for (std::size_t m = 0; m < t.mode_count(); ++m) lightest = std::min(lightest, t.energy(m));
  EXPECT_NEAR(rep.gap, lightest, 1e-12);
  EXPECT_NEAR(rep.single_particle_threshold, lightest, 1e-12);
}

TEST(Spectra, SolverMethodNames) {
  for (auto m : {SolverMethod::automatic, SolverMethod::dense, SolverMethod::iterative})
    EXPECT_EQ(parse_solver_method(to_string(m)), m);
  EXPECT_THROW(parse_solver_method("lanczos?"), std::invalid_argument);
}
