#include <bit>
#include <cmath>

#include <gtest/gtest.h>

#include "fermiqft/fock.hpp"
#include "support.hpp"

using namespace fqft;
using fqft::testing::kron_annihilator;

TEST(Fock, BasisSizeAndIndexing) {
  const ModeTable t = fqft::testing::small_table();
  const FockBasis b = enumerate_basis(t);
  EXPECT_EQ(b.size(), 16u);
  EXPECT_EQ(b.index_of(0b1010).value(), 10u);
  EXPECT_FALSE(b.index_of(0b10000).has_value());
  EXPECT_EQ(b.species_mask(1), Occupation{0b1100});
}

TEST(Fock, TruncationCapsEachSpecies) {
  const ModeTable t = fqft::testing::small_table();
  const FockBasis b = enumerate_basis(t, Truncation{{1, 2}});
  // species 0 holds at most one of its two modes: 3 * 4 states
  EXPECT_EQ(b.size(), 12u);
  for (Occupation s : b.states()) EXPECT_LE(std::popcount(s & 0b11), 1);
  EXPECT_FALSE(b.index_of(0b0011).has_value());
  EXPECT_THROW(enumerate_basis(t, Truncation{{1}}), std::invalid_argument);
  EXPECT_THROW(enumerate_basis(t, std::nullopt, 3), std::length_error);
}

TEST(Fock, JordanWignerSign) {
  EXPECT_EQ(jordan_wigner_sign(0b0000, 3), 1);
  EXPECT_EQ(jordan_wigner_sign(0b0101, 3), 1);
  EXPECT_EQ(jordan_wigner_sign(0b0111, 3), -1);
  EXPECT_EQ(jordan_wigner_sign(0b1000, 3), 1);
  EXPECT_EQ(jordan_wigner_sign(0b1111, 0), 1);
}

TEST(Fock, LadderOperatorsMatchKroneckerOracle) {
  const ModeTable t = fqft::testing::small_table();
  const FockBasis b = enumerate_basis(t);
  for (std::size_t m = 0; m < t.mode_count(); ++m) {
    const Eigen::MatrixXcd oracle = kron_annihilator(t.mode_count(), m);
    EXPECT_LT((annihilation(t, b, m).to_dense() - oracle).cwiseAbs().maxCoeff(), 1e-15) << m;
    EXPECT_LT((creation(t, b, m).to_dense() - oracle.adjoint()).cwiseAbs().maxCoeff(), 1e-15) << m;
  }
}

TEST(Fock, CanonicalAnticommutationOnTruncatedBasisIsBrokenOnlyAtTheCap) {
  // Compression onto a truncated space: {b, b*} = 1 away from the cap.
  const ModeTable t = fqft::testing::small_table();
  const FockBasis b = enumerate_basis(t, Truncation{{1, 2}});
  const auto anti = anticommutator(annihilation(t, b, 0), creation(t, b, 0));
  const auto idx = b.index_of(0b0000).value();
  EXPECT_NEAR(std::abs(anti.at(idx, idx) - 1.0), 0.0, 1e-15);
  const auto capped = b.index_of(0b0010).value();
  EXPECT_NEAR(std::abs(anti.at(capped, capped)), 0.0, 1e-15);
}

TEST(Fock, SmearedOperatorsHaveNormOfTheWeightedFunction) {
  const ModeTable t = fqft::testing::small_table();
  const FockBasis b = enumerate_basis(t);
  const std::vector<Complex> f{{0.3, -1.2}, {2.0, 0.5}};
  const auto A = smeared_creation(t, b, 1, f).to_dense();
  const double sigma = Eigen::JacobiSVD<Eigen::MatrixXcd>(A).singularValues()(0);
  EXPECT_NEAR(sigma, weighted_l2_norm(f, t, 1), 1e-13);
  EXPECT_LT((smeared_annihilation(t, b, 1, f).to_dense() - A.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Fock, FreeHamiltonianIsSumOfOccupiedEnergies) {
  const ModeTable t = fqft::testing::small_table();
  const FockBasis b = enumerate_basis(t);
  const auto H = free_hamiltonian(t, b);
  ASSERT_TRUE(H.is_diagonal());
  Eigen::MatrixXcd oracle = Eigen::MatrixXcd::Zero(16, 16);
  for (std::size_t m = 0; m < 4; ++m) {
    const Eigen::MatrixXcd a = kron_annihilator(4, m);
    oracle += t.energy(m) * a.adjoint() * a;
  }
  EXPECT_LT((H.to_dense() - oracle).cwiseAbs().maxCoeff(), 1e-14);
  const auto N = number_operator(t, b, 1);
  EXPECT_DOUBLE_EQ(N.at(0b1100, 0b1100).real(), 2.0);
  EXPECT_DOUBLE_EQ(parity(b).at(0b0111, 0b0111).real(), -1.0);
}
