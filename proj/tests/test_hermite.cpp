#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fermiqft/hermite.hpp"

using namespace fqft;

TEST(Hermite, LowOrderFunctionsInClosedForm) {
  const std::vector<double> x{-1.3, 0.0, 0.4, 2.1};
  const auto H = hermite_functions(2, x);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double psi0 = std::pow(std::numbers::pi, -0.25) * std::exp(-x[j] * x[j] / 2);
    EXPECT_NEAR(H(0, j), psi0, 1e-15);
    EXPECT_NEAR(H(1, j), std::sqrt(2.0) * x[j] * psi0, 1e-15);
    EXPECT_NEAR(H(2, j), (2 * x[j] * x[j] - 1) / std::sqrt(2.0) * psi0, 1e-14);
  }
}

TEST(Hermite, OrthonormalUnderGaussHermiteQuadrature) {
  const Grid1D g = gauss_hermite_grid(60);
  const auto basis = hermite_basis(30, g);
  EXPECT_LT(basis.orthonormality_residual, 1e-12);
}

TEST(Quadrature, LegendreIsExactForPolynomials) {
  const Grid1D g = gauss_legendre_grid(4, -1.0, 2.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) acc += g.weights[j] * std::pow(g.nodes[j], 7);
  EXPECT_NEAR(acc, (std::pow(2.0, 8) - 1.0) / 8.0, 1e-12);
  const std::vector<double> br{0.0, 0.5, 1.0};
  const Grid1D c = composite_legendre_grid(3, br);
  EXPECT_EQ(c.size(), 6u);
}

TEST(Oscillator, SincDiscretizationHasOddIntegerSpectrum) {
  const Grid1D u = uniform_grid(81, 9.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sinc_dvr_oscillator(u));
  for (int l = 0; l < 8; ++l) EXPECT_NEAR(es.eigenvalues()(l), 2 * l + 1, 1e-8) << l;
}

TEST(Regularity, CoefficientRouteAgreesWithSpectralPowerRoute) {
  const Grid1D u = uniform_grid(61, 8.0);
  const auto f = [](std::span<const double> x) {
    return Complex{std::exp(-0.7 * x[0] * x[0]) * (1.0 + 0.3 * x[0]) * std::exp(-0.5 * x[1] * x[1] + 0.2 * x[1])};
  };
  const AxisTensor t = sample_axis_tensor(f, u, 2);
  const std::vector<double> s{0.4, 0.25};
  const auto coeff = apply_regularity_operator(t, u, 40, s);
  const auto direct = apply_spectral_powers(t, u, s);
  EXPECT_LT(coeff.tail_fraction, 1e-6);
  EXPECT_NEAR(coeff.norm, quadrature_norm(direct, u), 1e-6 * coeff.norm);
  EXPECT_NEAR(coeff.input_norm, quadrature_norm(t, u), 1e-12);
}

TEST(Regularity, ThreeDimensionalGroundStateIsTheFirstCoefficient) {
  const HermiteTransform3D T(gauss_hermite_grid(20), 6);
  const std::size_t N = T.grid().size();
  Eigen::VectorXcd s(static_cast<Eigen::Index>(T.sample_count()));
  const double c = std::pow(std::numbers::pi, -0.75);
  for (std::size_t ix = 0; ix < N; ++ix)
    for (std::size_t iy = 0; iy < N; ++iy)
      for (std::size_t iz = 0; iz < N; ++iz) {
        const double x = T.grid().nodes[ix], y = T.grid().nodes[iy], z = T.grid().nodes[iz];
        s[static_cast<Eigen::Index>(iz + N * (iy + N * ix))] = c * std::exp(-(x * x + y * y + z * z) / 2);
      }
  const auto coef = T.transform(s);
  EXPECT_NEAR(std::abs(coef[0]), 1.0, 1e-12);
  EXPECT_NEAR(coef.norm(), 1.0, 1e-12);
  EXPECT_NEAR(T.quadrature_norm2(s), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(T.levels()[1], 3.0);
}
