#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fermiqft/kernels.hpp"
#include "support.hpp"

using namespace fqft;

TEST(Exponents, TableMatchesClosedFormForAllN) {
  for (std::size_t n = 2; n <= 7; ++n) {
    const auto m = static_cast<long long>(n - 1);
    std::vector<bool> massless(n, false);
    massless[0] = true;
    const auto table = exponent_table(n, 0.05, massless, n - 1);
    ASSERT_EQ(table.size(), n);
    EXPECT_EQ(table[0].role, ExponentRole::massless);
    EXPECT_EQ(table[0].offset, Rational(1, 2) - Rational(5, 6 * m));
    for (std::size_t i = 1; i + 1 < n; ++i) EXPECT_EQ(table[i].offset, Rational(1, 2) - Rational(1, m));
    EXPECT_EQ(table[n - 1].role, ExponentRole::exempt);
    EXPECT_DOUBLE_EQ(table[n - 1].value(0.05), 0.0);
  }
}

TEST(Exponents, FourSpeciesValuesAndText) {
  const auto t = exponent_table(4, 0.1, {true, false, false, false}, 2);
  EXPECT_EQ(t[0].offset, Rational(2, 9));
  EXPECT_EQ(t[1].offset, Rational(1, 6));
  EXPECT_EQ(t[0].text(), "2/9+eps");
  EXPECT_EQ(t[1].text(), "1/6+eps");
  EXPECT_EQ(t[2].text(), "0");
  EXPECT_NEAR(t[1].value(0.1), 1.0 / 6.0 + 0.1, 1e-15);
  EXPECT_EQ(t[0].nu_threshold(), Rational(-1, 6));
  // n = 3 massive offset is exactly zero
  EXPECT_EQ(exponent_table(3, 0.1, {false, false, false}, 0)[1].text(), "eps");
  EXPECT_THROW(exponent_table(4, 0.0, {false, false, false, false}, 0), std::invalid_argument);
  EXPECT_THROW(exponent_table(4, 0.1, {false, false, false, false}, 4), std::invalid_argument);
}

TEST(FormFactors, SmoothStepIsAPartitionOfUnity) {
  for (double t = -0.5; t <= 1.5; t += 0.0625) {
    EXPECT_NEAR(smooth_step(t) + smooth_step(1.0 - t), 1.0, 1e-15) << t;
    EXPECT_LE(smooth_step(t + 0.0625), smooth_step(t));
  }
  EXPECT_EQ(smooth_step(0.0), 1.0);
  EXPECT_EQ(smooth_step(1.0), 0.0);
}

TEST(FormFactors, PowerLawBelowTheEdgeAndDerivative) {
  const FormFactor f{0.5, 2.0, 0.5, 1.5};
  EXPECT_NEAR(f.radial(0.64), 1.5 * 0.8, 1e-15);
  EXPECT_EQ(f.radial(2.0), 0.0);
  EXPECT_EQ(f.radial(3.0), 0.0);
  for (double r : {0.3, 1.1, 1.5, 1.9}) {
    const double h = 1e-5;
    EXPECT_NEAR(f.radial_derivative(r), (f.radial(r + h) - f.radial(r - h)) / (2 * h), 1e-7) << r;
  }
  const Vec3 k{0.3, -0.4, 1.2};
  const Vec3 g = f.gradient(k);
  const double h = 1e-6;
  for (int a = 0; a < 3; ++a) {
    Vec3 kp = k, km = k;
    kp[a] += h;
    km[a] -= h;
    EXPECT_NEAR(g[a], (f(kp) - f(km)) / (2 * h), 1e-7);
  }
  EXPECT_THROW(validate(FormFactor{0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(validate(FormFactor{0.0, 1.0, 1.5}), std::invalid_argument);
}

TEST(KernelFamilies, DeltaRegIsOneOnConservedMomenta) {
  const auto sig = parse_signature(4, "(1,2;3,4)");
  const std::vector<Vec3> k{{0.3, 0, 0}, {0, 0.2, 0}, {0.1, 0.1, 0}, {0.2, 0.1, 0}};
  EXPECT_NEAR(delta_reg(k, sig, 1.0), 1.0, 1e-15);
  const std::vector<Vec3> q{{1, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  EXPECT_NEAR(delta_reg(q, sig, 2.0), std::exp(-1.0 / 8.0), 1e-15);
}

TEST(KernelFamilies, FermiSeparableExpansionReproducesTheAmplitude) {
  FermiKernelOptions opt;
  opt.nu = {0.5, 0.5, 0.0, 0.0};
  const auto spec = fermi_demo_kernel(parse_signature(4, "(1,2;3,4)"), opt);
  ASSERT_TRUE(spec.separable.has_value());
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  const std::vector<double> spins(4, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec3> k(4);
    for (auto& v : k) v = {u(rng), u(rng), u(rng)};
    const Complex direct = spec.amplitude(k, spins);
    // five Gauss-Hermite nodes per axis for the Gaussian momentum regularizer
    EXPECT_LT(std::abs(spec.separable->evaluate(k) - direct), 1e-8 * std::max(1.0, std::abs(direct)));
  }
}

TEST(KernelFamilies, RandomKernelIsDeterministicAndProcessDependent) {
  const auto a = random_kernel(parse_signature(3, "(1,2,3;)"), 7);
  const auto b = random_kernel(parse_signature(3, "(;1,2,3)"), 7);
  const std::vector<Vec3> k{{0.1, 0, 0}, {0, 0.2, 0}, {0, 0, 0.3}};
  const std::vector<double> s{0.5, 0.5, 0.5};
  EXPECT_EQ(a.amplitude(k, s), random_kernel(parse_signature(3, "(1,2,3;)"), 7).amplitude(k, s));
  EXPECT_NE(a.amplitude(k, s), b.amplitude(k, s));
  const Complex v = a.amplitude(k, s);
  EXPECT_TRUE(v.real() >= -1.0 && v.real() <= 1.0 && v.imag() >= -1.0 && v.imag() <= 1.0);
}

TEST(KernelTensors, SamplingCarriesSqrtWeights) {
  const ModeTable t = fqft::testing::small_table();
  const auto spec = gaussian_kernel(parse_signature(2, "(1;2)"), 0.8, 2.0);
  const KernelTensor g = sample_kernel_tensor(spec, t);
  ASSERT_EQ(g.size(), 4u);
  const std::size_t idx[2] = {1, 0};
  const Vec3 k0 = t.mode(1).momentum, k1 = t.mode(2).momentum;
  const double expect = 2.0 * std::exp(-(k0[0] * k0[0] + k0[1] * k0[1] + k0[2] * k0[2]) / (2 * 0.64)) *
                        std::exp(-(k1[0] * k1[0] + k1[1] * k1[1] + k1[2] * k1[2]) / (2 * 0.64)) *
                        std::sqrt(t.mode(1).weight * t.mode(2).weight);
  EXPECT_NEAR(g.values[g.flat_index(idx)].real(), expect, 1e-14);
}

TEST(KernelTensors, DispersionWeightedNorm) {
  const ModeTable t = fqft::testing::small_table();
  KernelTensor g = KernelTensor::zeros({2, 2});
  for (std::size_t k = 0; k < 4; ++k) g.values[k] = Complex{double(k + 1), -0.5};
  WeightChoice w{WeightKind::inverse_sqrt_dispersion, {false, true}, {}, {}};
  double acc = 0.0;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) acc += std::norm(g.values[2 * a + b]) / t.energy(2 + b);
  EXPECT_NEAR(weighted_kernel_norm(g, t, w), std::sqrt(acc), 1e-14);
  w.kind = WeightKind::unit;
  EXPECT_NEAR(weighted_kernel_norm(g, t, w), g.frobenius_norm(), 1e-15);
}

TEST(Infrared, PowerCountingExponent) {
  EXPECT_NEAR(power_counting_exponent(0.0, 1.9), -0.8, 1e-15);
  EXPECT_NEAR(power_counting_exponent(0.5, 1.9), 0.15, 1e-15);
  EXPECT_GT(power_counting_exponent(2.0 - 3.0 / 1.9 + 1e-9, 1.9), 0.0);
}
