#include <cmath>

#include <gtest/gtest.h>

#include "fermiqft/hamiltonian.hpp"
#include "fermiqft/kernels.hpp"
#include "support.hpp"

using namespace fqft;
using fqft::testing::kron_annihilator;

namespace {

KernelTensor random_tensor(const ModeTable& t, std::uint64_t seed) {
  std::vector<std::size_t> ext;
  for (std::size_t i = 0; i < t.species_count(); ++i) ext.push_back(t.species_mode_count(i));
  KernelTensor g = KernelTensor::zeros(ext);
  const auto v = fqft::testing::random_vector(g.size(), seed);
  for (std::size_t k = 0; k < g.size(); ++k) g.values[k] = v[static_cast<Eigen::Index>(k)];
  return g;
}

// Dense sum over mode tuples of g * prod of Kronecker ladder matrices in signature order.
Eigen::MatrixXcd oracle_term(const KernelTensor& g, const ProcessSignature& sig, const ModeTable& t) {
  const std::size_t M = t.mode_count(), dim = std::size_t{1} << M;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<std::size_t> local(sig.n);
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    g.unflatten(flat, local);
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(dim, dim);
    for (std::size_t j = 0; j < sig.n; ++j) {
      const std::size_t sp = sig.order[j];
      const Eigen::MatrixXcd a = kron_annihilator(M, t.offset(sp) + local[sp]);
      prod = prod * (j < sig.p ? Eigen::MatrixXcd(a.adjoint()) : a);
    }
    out += g.values[flat] * prod;
  }
  return out;
}

}  // namespace

TEST(Hamiltonian, TermsMatchKroneckerOracleForEveryProcess) {
  const ModeTable t = fqft::testing::small_table();
  const FockBasis b = enumerate_basis(t);
  std::uint64_t seed = 11;
  for (const auto& sig : enumerate_all_processes(2)) {
    const KernelTensor g = random_tensor(t, seed++);
    const auto op = assemble_interaction_term(g, sig, t, b);
    EXPECT_LT((op.to_dense() - oracle_term(g, sig, t)).cwiseAbs().maxCoeff(), 1e-13) << sig.label();
  }
}

TEST(Hamiltonian, TotalIsFreePlusCoupledHermitianInteraction) {
  const ModeTable t = fqft::testing::small_table();
  const FockBasis b = enumerate_basis(t);
  TermList terms;
  std::uint64_t seed = 3;
  for (const auto& sig : enumerate_all_processes(2)) terms.emplace_back(sig, random_tensor(t, seed++));
  const auto H = assemble_total(terms, 0.37, b, t);
  EXPECT_LT(H.total.hermiticity_defect(), 1e-14);
  Eigen::MatrixXcd oracle = free_hamiltonian(t, b).to_dense();
  for (const auto& [sig, g] : terms) {
    const Eigen::MatrixXcd T = oracle_term(g, sig, t);
    oracle += 0.37 * (T + T.adjoint());
  }
  EXPECT_LT((H.total.to_dense() - oracle).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_THROW(assemble_total({terms[0], terms[0]}, 1.0, b, t), std::invalid_argument);
  const auto H0 = with_coupling(H, 0.0);
  EXPECT_LT(max_abs_difference(H0.total, H.free), 1e-15);
}

TEST(Hamiltonian, OddParityIdentityAndEvenParityCommutation) {
  const ModeTable t3({fqft::testing::species(1.0, {{0, 0, 0.1}}), fqft::testing::species(0.5, {{0.2, 0, 0}}),
                      fqft::testing::species(2.0, {{0, 0.3, 0}, {0.1, 0.1, 0}})});
  const FockBasis b = enumerate_basis(t3);
  TermList terms;
  std::uint64_t seed = 5;
  for (const auto& sig : enumerate_all_processes(3)) terms.emplace_back(sig, random_tensor(t3, seed++));
  const auto H = assemble_total(terms, 0.8, b, t3);
  const auto r = parity_identity_check(H, b);
  EXPECT_TRUE(r.pass) << r.lhs;
  // P H_I P = -H_I for odd n
  const auto P = parity(b);
  EXPECT_LT(max_abs_difference(P * H.interaction * P, (-1.0) * H.interaction), 1e-14);
}

TEST(Hamiltonian, CommutatorDecompositionResidualVanishes) {
  for (std::size_t n : {2u, 3u}) {
    std::vector<SpeciesConfig> sp;
    for (std::size_t i = 0; i < n; ++i)
      sp.push_back(fqft::testing::species(1.0 + 0.3 * double(i), {{0.1 * double(i + 1), 0, 0}, {0, 0.2, 0.1}}));
    const ModeTable t(sp);
    const FockBasis b = enumerate_basis(t);
    TermList terms;
    std::uint64_t seed = 40;
    for (const auto& sig : enumerate_all_processes(n)) terms.emplace_back(sig, random_tensor(t, seed++));
    const auto H = assemble_total(terms, 1.0, b, t);
    for (std::size_t m = 0; m < t.mode_count(); ++m) {
      const auto d = commutator_with_annihilator(H, t, b, m);
      EXPECT_LT(d.residual, 1e-13) << "n=" << n << " mode " << m;
    }
  }
}

TEST(Hamiltonian, ToyMatrixIsTwoLevel) {
  const ModeTable t({fqft::testing::species(1.0, {{0, 0, 0}}), fqft::testing::species(1.0, {{0, 0, 0}})});
  const FockBasis b = enumerate_basis(t);
  KernelTensor g = KernelTensor::zeros({1, 1});
  g.values[0] = 1.0;
  const auto H = assemble_total({{parse_signature(2, "(1,2;)"), g}}, 1.0, b, t);
  // b1* b2* |00> = |11>
  EXPECT_NEAR(H.total.at(0b11, 0b00).real(), 1.0, 1e-15);
  EXPECT_NEAR(H.total.at(0b11, 0b11).real(), 2.0, 1e-15);
  EXPECT_NEAR(H.total.at(0b01, 0b01).real(), 1.0, 1e-15);
  EXPECT_EQ(H.total.nnz(), 5u);
}
