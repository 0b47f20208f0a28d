#include <cmath>

#include <boost/math/special_functions/zeta.hpp>
#include <gtest/gtest.h>

#include "fermiqft/config.hpp"
#include "fermiqft/verify.hpp"
#include "support.hpp"

using namespace fqft;

namespace {

RunConfig config(const std::string& name) {
  return load_run_config(std::string(FERMIQFT_CONFIG_DIR) + "/" + name + ".json");
}

Model random_model(std::size_t n, std::uint64_t seed) {
  std::vector<SpeciesConfig> sp;
  for (std::size_t i = 0; i < n; ++i)
    sp.push_back(fqft::testing::species(0.5 + 0.25 * double(i), {{0.2 * double(i + 1), 0, 0}, {0, 0.3, -0.1}},
                                        {0.6, 0.3}));
  ModeTable table(sp);
  FockBasis basis = enumerate_basis(table);
  TermList terms;
  for (const auto& sig : enumerate_all_processes(n))
    terms.emplace_back(sig, sample_kernel_tensor(random_kernel(sig, seed), table));
  auto bundle = assemble_total(terms, 0.7, basis, table);
  return {std::move(table), std::move(basis), std::move(bundle)};
}

}  // namespace

TEST(Young, MatchesBruteForceSupremum) {
  for (double eps : {0.05, 0.1, 0.5})
    for (double mu : {2.0, 0.9, 0.3, 0.05}) {
      double best = -1e300;
      for (double x = 0.0; x < 1e40; x = x * 1.0002 + 1e-4) best = std::max(best, std::pow(x + 1, 1 - eps) - mu * x);
      EXPECT_NEAR(young_constant(eps, mu), best, 1e-6 * std::max(1.0, best)) << eps << " " << mu;
      EXPECT_GE(young_constant(eps, mu), best - 1e-12);
    }
}

TEST(HermiteConstant, ReferenceAgreesWithZetaOracle) {
  for (double s : {0.6, 0.75, 1.0})
    for (std::size_t n : {2u, 3u, 4u}) {
      // sum_{l >= 0} (2l + 1)^{-2s} = (1 - 2^{-2s}) zeta(2s)
      const double odd = (1.0 - std::pow(2.0, -2 * s)) * boost::math::zeta(2 * s);
      const double oracle = std::pow(2.0, 0.5 * double(n - 1)) * std::pow(odd, 1.5 * double(n - 1));
      EXPECT_NEAR(reference_hermite_constant(n, s), oracle, 1e-7 * oracle) << n << " " << s;
    }
}

TEST(FormBound, ToyBellStateRatio) {
  const RunConfig cfg = config("toy");
  const Model model = build_model(cfg);
  const auto& T = model.bundle.terms.front().op;
  Vector phi = Vector::Zero(4);
  phi[0] = phi[3] = 1.0 / std::sqrt(2.0);
  const double lhs = std::abs(phi.dot((T + T.adjoint()).apply(phi)));
  // i0 = 0: X = H_f of the second species (omega = 1), kernel norm 1
  const double rhs = 0.5 * 1.0 + 0.5 * 2.0;
  EXPECT_NEAR(lhs / rhs, 2.0 / 3.0, 1e-15);
  TrialSettings ts;
  const auto sym = check_form_bound(model.bundle.terms.front(), model.table, model.basis, 0, ts, true);
  EXPECT_TRUE(sym.pass);
  EXPECT_GE(sym.ratio, 2.0 / 3.0 - 1e-12);
  const auto refined = check_refined_form_bound(model.bundle.terms.front(), model.table, model.basis, 0, ts);
  EXPECT_TRUE(refined.pass);
  EXPECT_NEAR(refined.ratio, 1.0, 1e-9);
}

class BoundProperty : public ::testing::TestWithParam<std::tuple<std::size_t, std::uint64_t>> {};

TEST_P(BoundProperty, ConstantOneBoundsHoldForEveryTermAndExemptSpecies) {
  const auto [n, seed] = GetParam();
  const Model model = random_model(n, seed);
  TrialSettings ts;
  ts.trials = 300;
  ts.seed = seed;
  for (const auto& term : model.bundle.terms)
    for (std::size_t i0 = 0; i0 < n; ++i0) {
      for (const auto& r : {check_form_bound(term, model.table, model.basis, i0, ts),
                            check_form_bound(term, model.table, model.basis, i0, ts, true),
                            check_refined_form_bound(term, model.table, model.basis, i0, ts),
                            check_operator_bound(term, model.table, model.basis, i0, ts)}) {
        EXPECT_TRUE(r.pass) << r.name << " " << term.signature.label() << " i0=" << i0 << " ratio " << r.ratio;
        EXPECT_LE(r.ratio, 1.0 + 1e-9);
      }
      const auto h = check_hermite_bound(term, model.table, model.basis, i0, 0.75, ts);
      EXPECT_TRUE(h.pass) << term.signature.label();
    }
}

INSTANTIATE_TEST_SUITE_P(SmallModels, BoundProperty,
                         ::testing::Values(std::make_tuple(2u, 1u), std::make_tuple(2u, 2u),
                                           std::make_tuple(3u, 3u), std::make_tuple(3u, 4u)));

TEST(RelativeBound, HoldsAcrossMu) {
  const Model model = random_model(3, 8);
  const auto r = check_relative_bound_zero(model.bundle, model.basis, {});
  EXPECT_TRUE(r.pass) << r.ratio;
  EXPECT_LE(r.ratio, 1.0 + 1e-12);
}

TEST(Interpolation, LogConvexityOnEveryFamily) {
  const Model model = random_model(3, 5);
  InterpolationSettings is;
  is.trials = 40;
  for (auto fam : {TrialFamily::random_profile, TrialFamily::gaussian_profile, TrialFamily::projected_kernel}) {
    const auto& term = model.bundle.terms.front();
    const auto r = check_interpolation(term.signature, model.table, model.basis, 0, fam, is, &term.tensor);
    EXPECT_TRUE(r.pass) << to_string(fam);
  }
}

TEST(ExactIdentities, PassOnRandomModels) {
  for (std::size_t n : {2u, 3u, 4u}) {
    const Model model = random_model(n, 12 + n);
    for (const auto& r : exact_identity_suite(model, 1)) EXPECT_TRUE(r.pass) << "n=" << n << " " << r.name << " " << r.lhs;
  }
}

TEST(NumberEstimate, DecoupledVacuumIsNotAPass) {
  // The same real kernel on every process cancels the odd-n hermitian pairs and decouples the vacuum.
  RunConfig cfg = config("n3_smooth");
  cfg.kernels.front().processes.clear();
  const Model model = build_model(cfg);
  const auto curve = mass_sweep(model, 0, cfg.mass_limit->masses, cfg.solver);
  NumberEstimateSettings ns;
  ns.target = 0;
  ns.i0 = 1;
  const auto r = check_number_estimate(model, curve, ns);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(r.details.value("degenerate", false));
}

TEST(NumberEstimate, SmoothKernelIsUniformAcrossMasses) {
  const RunConfig cfg = config("n3_smooth");
  const Model model = build_model(cfg);
  const auto curve = mass_sweep(model, 0, cfg.mass_limit->masses, cfg.solver);
  NumberEstimateSettings ns;
  ns.target = 0;
  ns.i0 = 1;
  const auto n = check_number_estimate(model, curve, ns);
  const auto g = check_gradient_estimate(model, curve, ns);
  EXPECT_TRUE(n.pass) << n.ratio;
  EXPECT_TRUE(g.pass) << g.ratio;
  EXPECT_GT(n.lhs, 0.0);
}

TEST(GapProxy, QuadraticShiftOnMassiveInstance) {
  const RunConfig cfg = config("n3_massive");
  const Model model = build_model(cfg);
  const auto fit = fit_gap(model, cfg.verify.gap_couplings);
  EXPECT_NEAR(fit.gap0, fit.threshold, 1e-12);
  EXPECT_LT(fit.relative_residual, 0.1);
  EXPECT_NE(fit.coefficient, 0.0);
  EXPECT_THROW(fit_gap(build_model(config("n3_small")), {0.1}), std::invalid_argument);
}
