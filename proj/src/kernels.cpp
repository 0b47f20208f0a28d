#include "fermiqft/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fqft {

namespace {

double bump(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double bump_derivative(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }

double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = bump(1.0 - t), b = bump(t);
  const double da = -bump_derivative(1.0 - t), db = bump_derivative(t);
  return (da * b - a * db) / ((a + b) * (a + b));
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_double(std::uint64_t h, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  if (v == 0.0) v = 0.0;  // fold -0
  std::memcpy(&bits, &v, sizeof(v));
  return splitmix(h ^ bits);
}

double unit_interval(std::uint64_t h) { return double(h >> 11) * 0x1.0p-53 * 2.0 - 1.0; }

void check_signature(const ProcessSignature& sig) {
  if (!sig.valid()) throw std::invalid_argument("kernel: invalid process signature");
}

KernelSpec separable_spec(const ProcessSignature& sig, std::string family, SeparableKernel sep) {
  KernelSpec spec;
  spec.n = sig.n;
  spec.signature = sig;
  spec.family = std::move(family);
  spec.separable = std::move(sep);
  auto shared = std::make_shared<SeparableKernel>(*spec.separable);
  spec.amplitude = [shared](std::span<const Vec3> k, std::span<const double>) { return shared->evaluate(k); };
  return spec;
}

double species_sign(const ProcessSignature& sig, std::size_t species) {
  return sig.is_created(species) ? 1.0 : -1.0;
}

}  // namespace

// ---------------------------------------------------------------- form factors

double smooth_step(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = bump(1.0 - t), b = bump(t);
  return a / (a + b);
}

void validate(const FormFactor& f) {
  if (!(f.cutoff > 0.0)) throw std::invalid_argument("form factor: cutoff must be positive");
  if (!(f.edge > 0.0 && f.edge <= 1.0)) throw std::invalid_argument("form factor: edge must lie in (0, 1]");
  if (!std::isfinite(f.normalization) || !std::isfinite(f.nu))
    throw std::invalid_argument("form factor: non-finite parameter");
}

double FormFactor::radial(double r) const {
  const double t = (r / cutoff - (1.0 - edge)) / edge;
  const double chi = smooth_step(t);
  if (chi == 0.0) return 0.0;
  return normalization * (nu == 0.0 ? 1.0 : std::pow(r, nu)) * chi;
}

double FormFactor::radial_derivative(double r) const {
  const double t = (r / cutoff - (1.0 - edge)) / edge;
  const double chi = smooth_step(t);
  const double dchi = smooth_step_derivative(t) / (edge * cutoff);
  const double power = nu == 0.0 ? 1.0 : std::pow(r, nu);
  const double dpower = nu == 0.0 ? 0.0 : nu * std::pow(r, nu - 1.0);
  return normalization * (dpower * chi + power * dchi);
}

Vec3 FormFactor::gradient(const Vec3& k) const {
  const double r = norm3(k);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const double d = radial_derivative(r) / r;
  return {d * k[0], d * k[1], d * k[2]};
}

double form_factor_derivative_ratio(const FormFactor& f, int alpha, double r) {
  if (alpha < 0 || alpha > 2) throw std::invalid_argument("derivative ratio: alpha must be 0, 1 or 2");
  if (!(r > 0.0)) throw std::invalid_argument("derivative ratio: radius must be positive");
  static const Vec3 dirs[] = {{1, 0, 0}, {0, 1, 0}, {0.6, 0.8, 0}, {0.48, 0.6, 0.64}, {-0.36, 0.48, 0.8}};
  const double h = 1e-4 * r;
  double worst = 0.0;
  for (const auto& d : dirs) {
    const Vec3 k{r * d[0], r * d[1], r * d[2]};
    auto at = [&](double dx) { return f(Vec3{k[0] + dx, k[1], k[2]}); };
    double v = 0.0;
    if (alpha == 0) v = at(0.0);
    if (alpha == 1) v = (at(h) - at(-h)) / (2 * h);
    if (alpha == 2) v = (at(h) - 2 * at(0.0) + at(-h)) / (h * h);
    worst = std::max(worst, std::abs(v) / std::pow(r, f.nu - alpha));
  }
  return worst;
}

// ---------------------------------------------------------------- kernel families

KernelSpec constant_kernel(const ProcessSignature& sig, Complex value) {
  check_signature(sig);
  SeparableKernel sep;
  sep.bases.push_back([](const Vec3&) { return Complex{1.0}; });
  sep.terms.push_back({value, std::vector<PhaseFactor>(sig.n)});
  return separable_spec(sig, "constant", std::move(sep));
}

KernelSpec gaussian_kernel(const ProcessSignature& sig, double width, Complex value) {
  check_signature(sig);
  if (!(width > 0.0)) throw std::invalid_argument("gaussian kernel: width must be positive");
  SeparableKernel sep;
  sep.bases.push_back([width](const Vec3& k) {
    const double r = norm3(k);
    return Complex{std::exp(-r * r / (2 * width * width))};
  });
  sep.terms.push_back({value, std::vector<PhaseFactor>(sig.n)});
  return separable_spec(sig, "gaussian", std::move(sep));
}

KernelSpec power_kernel(const ProcessSignature& sig, const std::vector<FormFactor>& factors, Complex value) {
  check_signature(sig);
  if (factors.size() != sig.n) throw std::invalid_argument("power kernel: one form factor per species required");
  SeparableKernel sep;
  SeparableTerm term{value, {}};
  for (std::size_t i = 0; i < sig.n; ++i) {
    validate(factors[i]);
    sep.bases.push_back([f = factors[i]](const Vec3& k) { return Complex{f(k)}; });
    term.factors.push_back({i, {}});
  }
  sep.terms.push_back(std::move(term));
  return separable_spec(sig, "power", std::move(sep));
}

KernelSpec random_kernel(const ProcessSignature& sig, std::uint64_t seed, double scale) {
  check_signature(sig);
  KernelSpec spec;
  spec.n = sig.n;
  spec.signature = sig;
  spec.family = "random";
  const std::uint64_t key = splitmix(seed ^ (std::uint64_t(sig.p) << 32) ^ std::uint64_t(sig.n));
  std::uint64_t order_key = key;
  for (auto s : sig.order) order_key = splitmix(order_key ^ s);
  spec.amplitude = [order_key, scale](std::span<const Vec3> k, std::span<const double> spins) {
    std::uint64_t h = order_key;
    for (const auto& v : k)
      for (double c : v) h = mix_double(h, c);
    for (double s : spins) h = mix_double(h, s);
    const std::uint64_t h2 = splitmix(h);
    return scale * Complex{unit_interval(h), unit_interval(h2)};
  };
  return spec;
}

double delta_reg(std::span<const Vec3> momenta, const ProcessSignature& sig, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("delta_reg: width must be positive");
  if (momenta.size() != sig.n) throw std::invalid_argument("delta_reg: one momentum per species required");
  Vec3 q{};
  for (std::size_t i = 0; i < sig.n; ++i) {
    const double s = species_sign(sig, i);
    for (int a = 0; a < 3; ++a) q[a] += s * momenta[i][a];
  }
  const double q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
  return std::exp(-q2 / (2 * sigma * sigma));
}

KernelSpec fermi_demo_kernel(const ProcessSignature& sig, const FermiKernelOptions& options) {
  check_signature(sig);
  if (sig.n != 4) throw std::invalid_argument("fermi kernel: four species required");
  if (options.nu.size() != 4) throw std::invalid_argument("fermi kernel: one exponent per species required");
  if (!(options.sigma > 0.0)) throw std::invalid_argument("fermi kernel: width must be positive");
  if (options.quadrature_nodes == 0) throw std::invalid_argument("fermi kernel: need quadrature nodes");
  std::vector<FormFactor> ff;
  for (double nu : options.nu) {
    FormFactor f{nu, options.cutoff, options.edge, 1.0};
    validate(f);
    ff.push_back(f);
  }

  // exp(-x^2 / (2 sigma^2)) = pi^{-1/2} int exp(-u^2) exp(i sqrt(2) u x / sigma) du, Gauss-Hermite in u
  const Grid1D gh = gauss_hermite_rule(options.quadrature_nodes);
  const std::size_t Q = gh.size();
  SeparableKernel sep;
  for (std::size_t i = 0; i < 4; ++i) sep.bases.push_back([f = ff[i]](const Vec3& k) { return Complex{f(k)}; });
  const double scale = std::sqrt(2.0) / options.sigma;
  const double norm = std::pow(std::numbers::pi, -1.5);
  for (std::size_t a = 0; a < Q; ++a)
    for (std::size_t b = 0; b < Q; ++b)
      for (std::size_t c = 0; c < Q; ++c) {
        SeparableTerm term;
        term.coefficient = options.coupling * norm * gh.weights[a] * gh.weights[b] * gh.weights[c];
        const Vec3 t{scale * gh.nodes[a], scale * gh.nodes[b], scale * gh.nodes[c]};
        for (std::size_t i = 0; i < 4; ++i) {
          const double s = species_sign(sig, i);
          term.factors.push_back({i, {s * t[0], s * t[1], s * t[2]}});
        }
        sep.terms.push_back(std::move(term));
      }

  KernelSpec spec;
  spec.n = 4;
  spec.signature = sig;
  spec.family = "fermi";
  spec.separable = std::move(sep);
  const double sigma = options.sigma;
  const Complex coupling = options.coupling;
  spec.amplitude = [ff, sig, sigma, coupling](std::span<const Vec3> k, std::span<const double>) {
    Complex v = coupling;
    for (std::size_t i = 0; i < 4; ++i) {
      v *= ff[i](k[i]);
      if (v == Complex{}) return v;
    }
    return v * delta_reg(k, sig, sigma);
  };
  return spec;
}

// ---------------------------------------------------------------- exponents

std::string ExponentEntry::text() const {
  if (role == ExponentRole::exempt) return "0";
  std::string s = std::to_string(offset.numerator());
  if (offset.denominator() != 1) s += "/" + std::to_string(offset.denominator());
  if (!plus_epsilon) return s;
  if (offset.numerator() == 0) return "eps";
  return s + "+eps";
}

std::vector<ExponentEntry> exponent_table(std::size_t n, double epsilon, const std::vector<bool>& massless,
                                          std::size_t i0) {
  if (n < 2) throw std::invalid_argument("exponent table: n must be at least 2");
  if (!(epsilon > 0.0)) throw std::invalid_argument("exponent table: epsilon must be positive");
  if (i0 >= n) throw std::invalid_argument("exponent table: exempt species out of range");
  if (massless.size() != n) throw std::invalid_argument("exponent table: one massless flag per species required");
  const auto m = static_cast<long long>(n - 1);
  std::vector<ExponentEntry> out;
  for (std::size_t i = 0; i < n; ++i) {
    ExponentEntry e;
    e.species = i;
    if (i == i0) {
      e.role = ExponentRole::exempt;
      e.offset = 0;
      e.plus_epsilon = false;
    } else if (massless[i]) {
      e.role = ExponentRole::massless;
      e.offset = Rational(1, 2) - Rational(5, 6 * m);
    } else {
      e.role = ExponentRole::massive;
      e.offset = Rational(1, 2) - Rational(1, m);
    }
    out.push_back(e);
  }
  return out;
}

std::vector<double> exponent_values(const std::vector<ExponentEntry>& table, double epsilon) {
  std::vector<double> v;
  for (const auto& e : table) v.push_back(e.value(epsilon));
  return v;
}

// ---------------------------------------------------------------- discrete regularity

ModeOscillator mode_oscillator(const ModeTable& table, std::size_t species, double tolerance) {
  if (species >= table.species_count()) throw std::out_of_range("mode oscillator: invalid species");
  const auto& cfg = table.species(species);
  const std::size_t P = cfg.points.size();
  const std::size_t max_level = 4 * P + 8;
  std::array<Eigen::MatrixXd, 3> axis;
  for (int a = 0; a < 3; ++a) {
    std::vector<double> x(P);
    for (std::size_t j = 0; j < P; ++j) x[j] = cfg.points[j][a];
    axis[a] = hermite_functions(max_level, x);
  }
  ModeOscillator osc;
  osc.species = species;
  osc.basis = DenseMatrix::Zero(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(P));
  std::size_t accepted = 0;
  for (std::size_t total = 0; total <= max_level && accepted < P; ++total)
    for (std::size_t lx = total + 1; lx-- > 0 && accepted < P;)
      for (std::size_t ly = total - lx + 1; ly-- > 0 && accepted < P;) {
        const std::size_t lz = total - lx - ly;
        Vector u(static_cast<Eigen::Index>(P));
        for (std::size_t j = 0; j < P; ++j)
          u[static_cast<Eigen::Index>(j)] = std::sqrt(cfg.weights[j]) * axis[0](lx, j) * axis[1](ly, j) *
                                            axis[2](lz, j);
        const double original = u.norm();
        if (original < 1e-300) continue;
        for (int pass = 0; pass < 2; ++pass)
          for (std::size_t q = 0; q < accepted; ++q) {
            auto col = osc.basis.col(static_cast<Eigen::Index>(q));
            u -= col * col.dot(u);
          }
        const double rest = u.norm();
        if (rest <= tolerance * original) continue;
        osc.basis.col(static_cast<Eigen::Index>(accepted)) = u / rest;
        osc.eigenvalues.push_back(double((2 * lx + 1) * (2 * ly + 1) * (2 * lz + 1)));
        osc.levels.push_back({int(lx), int(ly), int(lz)});
        ++accepted;
      }
  if (accepted < P)
    throw std::runtime_error("mode oscillator: sampled Hermite functions do not span species " +
                             std::to_string(species));
  return osc;
}

DenseMatrix mode_oscillator_power(const ModeOscillator& osc, const ModeTable& table, double a) {
  const std::size_t P = static_cast<std::size_t>(osc.basis.cols());
  const std::size_t S = table.spin_count(osc.species);
  Eigen::VectorXd d(static_cast<Eigen::Index>(P));
  for (std::size_t j = 0; j < P; ++j) d[static_cast<Eigen::Index>(j)] = std::pow(osc.eigenvalues[j], a);
  const DenseMatrix hp = osc.basis * d.asDiagonal() * osc.basis.adjoint();
  DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(P * S), static_cast<Eigen::Index>(P * S));
  for (std::size_t i = 0; i < P; ++i)
    for (std::size_t j = 0; j < P; ++j)
      for (std::size_t s = 0; s < S; ++s)
        out(static_cast<Eigen::Index>(i * S + s), static_cast<Eigen::Index>(j * S + s)) =
            hp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

KernelTensor apply_mode_regularity(const KernelTensor& tensor, const ModeTable& table,
                                   std::span<const double> exponents) {
  if (exponents.size() != tensor.arity()) throw std::invalid_argument("regularity: one exponent per species");
  if (tensor.arity() != table.species_count()) throw std::invalid_argument("regularity: table/tensor mismatch");
  KernelTensor out = tensor;
  for (std::size_t i = 0; i < tensor.arity(); ++i) {
    if (exponents[i] == 0.0) continue;
    const DenseMatrix A = mode_oscillator_power(mode_oscillator(table, i), table, exponents[i]);
    out.values = mode_product(out.values, out.extents, i, A);
  }
  return out;
}

KernelTensor scale_species_axis(const KernelTensor& tensor, const ModeTable& table, std::size_t species,
                                std::span<const double> weights) {
  if (species >= tensor.arity()) throw std::out_of_range("scale axis: invalid species");
  if (weights.size() != tensor.extents[species] || weights.size() != table.species_mode_count(species))
    throw std::invalid_argument("scale axis: weight count mismatch");
  KernelTensor out = tensor;
  const std::size_t stride = tensor.stride(species), extent = tensor.extents[species];
  for (std::size_t f = 0; f < out.values.size(); ++f) out.values[f] *= weights[(f / stride) % extent];
  return out;
}

// ---------------------------------------------------------------- weighted kernel norms

namespace {

std::vector<double> dispersion_weights(const ModeTable& table, std::size_t species, bool one_plus) {
  std::vector<double> w;
  for (std::size_t j = 0; j < table.species_mode_count(species); ++j) {
    const double om = table.energy(table.offset(species) + j);
    if (!(om > 0.0))
      throw std::domain_error("weighted norm: omega^{-1/2} undefined at a zero-energy mode of species " +
                              std::to_string(species));
    w.push_back((one_plus ? 1.0 : 0.0) + 1.0 / std::sqrt(om));
  }
  return w;
}

std::vector<double> momentum_weights(const ModeTable& table, std::size_t species) {
  std::vector<double> w;
  for (std::size_t j = 0; j < table.species_mode_count(species); ++j) {
    const double k = norm3(table.mode(table.offset(species) + j).momentum);
    if (!(k > 0.0))
      throw std::domain_error("weighted norm: |k|^{-1/2} undefined at a zero-momentum mode of species " +
                              std::to_string(species));
    w.push_back(1.0 / std::sqrt(k));
  }
  return w;
}

bool selected(const WeightChoice& c, std::size_t i) { return c.species.empty() || (i < c.species.size() && c.species[i]); }

}  // namespace

double weighted_kernel_norm(const KernelTensor& tensor, const ModeTable& table, const WeightChoice& choice) {
  const std::size_t n = tensor.arity();
  if (n != table.species_count()) throw std::invalid_argument("weighted norm: table/tensor mismatch");
  switch (choice.kind) {
    case WeightKind::unit:
      return tensor.frobenius_norm();
    case WeightKind::inverse_sqrt_dispersion:
    case WeightKind::one_plus_inverse_sqrt: {
      KernelTensor t = tensor;
      for (std::size_t i = 0; i < n; ++i)
        if (selected(choice, i))
          t = scale_species_axis(t, table, i,
                                 dispersion_weights(table, i, choice.kind == WeightKind::one_plus_inverse_sqrt));
      return t.frobenius_norm();
    }
    case WeightKind::hermite:
      return apply_mode_regularity(tensor, table, choice.exponents).frobenius_norm();
    case WeightKind::momentum_substitution: {
      if (choice.subsets.empty()) throw std::invalid_argument("weighted norm: no candidate subsets declared");
      double best = std::numeric_limits<double>::infinity();
      for (const auto& I : choice.subsets) {
        KernelTensor t = tensor;
        for (std::size_t i = 0; i < n; ++i) {
          if (!selected(choice, i)) continue;
          const bool in_I = std::find(I.begin(), I.end(), i) != I.end();
          const double m = table.species(i).mass;
          if (in_I || m == 0.0) {
            t = scale_species_axis(t, table, i, momentum_weights(table, i));
          } else {
            const std::vector<double> w(table.species_mode_count(i), 1.0 / std::sqrt(m));
            t = scale_species_axis(t, table, i, w);
          }
        }
        best = std::min(best, t.frobenius_norm());
      }
      return best;
    }
  }
  throw std::logic_error("weighted norm: unknown weight kind");
}

// ---------------------------------------------------------------- continuum analysis

namespace {

struct GramSet {
  std::vector<Eigen::MatrixXcd> grams;  // per species, R x R
  std::vector<Eigen::MatrixXcd> coarse;
  double tail = 0.0;
};

Grid1D continuum_grid(const ContinuumSettings& s) {
  if (s.gauss_hermite) return gauss_hermite_grid(s.hermite_nodes);
  const double bp[] = {-s.box, 0.0, s.box};
  return composite_legendre_grid(s.nodes_per_panel, bp);
}

void check_separable(const SeparableKernel& kernel, std::size_t n) {
  if (kernel.terms.empty()) return;
  for (const auto& t : kernel.terms) {
    if (t.factors.size() != n) throw std::invalid_argument("separable kernel: one factor per species required");
    for (const auto& f : t.factors)
      if (f.base >= kernel.bases.size()) throw std::invalid_argument("separable kernel: invalid base index");
  }
}

// Gram matrices of the species factors weighted by the oscillator power a on all three axes, at full and
// coarse truncation.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> species_gram(const SeparableKernel& kernel, std::size_t species,
                                                           double a, const HermiteTransform3D& tf,
                                                           std::size_t coarse_l_max, double& tail) {
  const Grid1D& g = tf.grid();
  const std::size_t N = g.size(), R = kernel.terms.size();
  const auto C = static_cast<Eigen::Index>(tf.coefficient_count());
  std::vector<Eigen::VectorXcd> base_samples(kernel.bases.size());
  Eigen::MatrixXcd W(C, static_cast<Eigen::Index>(R));
  Eigen::VectorXd scale = tf.levels().array().pow(a);
  for (std::size_t r = 0; r < R; ++r) {
    const PhaseFactor& pf = kernel.terms[r].factors[species];
    auto& bs = base_samples[pf.base];
    if (bs.size() == 0) {
      bs.resize(static_cast<Eigen::Index>(N * N * N));
      for (std::size_t ix = 0; ix < N; ++ix)
        for (std::size_t iy = 0; iy < N; ++iy)
          for (std::size_t iz = 0; iz < N; ++iz)
            bs[static_cast<Eigen::Index>(iz + N * (iy + N * ix))] =
                kernel.bases[pf.base](Vec3{g.nodes[ix], g.nodes[iy], g.nodes[iz]});
    }
    std::array<std::vector<Complex>, 3> phase;
    for (int ax = 0; ax < 3; ++ax) {
      phase[ax].resize(N);
      for (std::size_t j = 0; j < N; ++j) phase[ax][j] = std::exp(Complex{0.0, pf.wavevector[ax] * g.nodes[j]});
    }
    Eigen::VectorXcd samples(bs.size());
    for (std::size_t ix = 0; ix < N; ++ix)
      for (std::size_t iy = 0; iy < N; ++iy) {
        const Complex pxy = phase[0][ix] * phase[1][iy];
        for (std::size_t iz = 0; iz < N; ++iz) {
          const auto f = static_cast<Eigen::Index>(iz + N * (iy + N * ix));
          samples[f] = bs[f] * pxy * phase[2][iz];
        }
      }
    const Eigen::VectorXcd coef = tf.transform(samples);
    const double total = tf.quadrature_norm2(samples);
    if (total > 0.0) tail = std::max(tail, std::max(0.0, 1.0 - coef.squaredNorm() / total));
    W.col(static_cast<Eigen::Index>(r)) = coef.cwiseProduct(scale.cast<Complex>());
  }
  const std::size_t L = tf.l_max() + 1;
  Eigen::MatrixXcd Wc = W;
  for (Eigen::Index q = 0; q < C; ++q) {
    const auto idx = static_cast<std::size_t>(q);
    const std::size_t lz = idx % L, ly = (idx / L) % L, lx = idx / (L * L);
    if (std::max({lx, ly, lz}) > coarse_l_max) Wc.row(q).setZero();
  }
  return {W.adjoint() * W, Wc.adjoint() * Wc};
}

GramSet gram_set(const SeparableKernel& kernel, std::span<const double> exponents,
                 const ContinuumSettings& settings, std::optional<std::size_t> skip) {
  const HermiteTransform3D tf(continuum_grid(settings), settings.l_max);
  GramSet out;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (skip && *skip == i) {
      out.grams.emplace_back();
      out.coarse.emplace_back();
      continue;
    }
    auto [full, coarse] = species_gram(kernel, i, exponents[i], tf, settings.coarse_l_max, out.tail);
    out.grams.push_back(std::move(full));
    out.coarse.push_back(std::move(coarse));
  }
  return out;
}

double spin_product(std::span<const std::size_t> spins, std::optional<std::size_t> skip) {
  double p = 1.0;
  for (std::size_t i = 0; i < spins.size(); ++i)
    if (!skip || *skip != i) p *= double(spins[i]);
  return p;
}

}  // namespace

SeparableNormReport separable_regularity_norm(const SeparableKernel& kernel, std::span<const double> exponents,
                                              std::span<const std::size_t> spin_counts,
                                              const ContinuumSettings& settings) {
  const std::size_t n = exponents.size();
  if (spin_counts.size() != n) throw std::invalid_argument("separable norm: one spin count per species required");
  check_separable(kernel, n);
  SeparableNormReport rep;
  if (kernel.terms.empty()) return rep;
  const GramSet gs = gram_set(kernel, exponents, settings, std::nullopt);
  const auto R = static_cast<Eigen::Index>(kernel.terms.size());
  Eigen::VectorXcd c(R);
  for (Eigen::Index r = 0; r < R; ++r) c[r] = kernel.terms[static_cast<std::size_t>(r)].coefficient;
  auto evaluate = [&](const std::vector<Eigen::MatrixXcd>& grams) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Ones(R, R);
    for (const auto& g : grams) M = M.cwiseProduct(g);
    const double v = std::max(0.0, (c.adjoint() * M * c)(0).real()) * spin_product(spin_counts, std::nullopt);
    return std::sqrt(v);
  };
  rep.norm = evaluate(gs.grams);
  rep.coarse_norm = evaluate(gs.coarse);
  rep.tail_fraction = gs.tail;
  const double change = rep.norm > 0.0 ? std::abs(rep.norm - rep.coarse_norm) / rep.norm : 0.0;
  rep.converged = gs.tail <= settings.tail_tolerance && change <= settings.refinement_tolerance;
  return rep;
}

double power_counting_exponent(double nu, double r) { return nu * r - 2.0 * r + 3.0; }

InfraredReport infrared_integrals(const SeparableKernel& kernel, std::size_t target, double r, double cutoff,
                                  std::span<const double> exponents, std::span<const std::size_t> spin_counts,
                                  const InfraredSettings& settings) {
  const std::size_t n = exponents.size();
  if (!(r >= 1.0 && r < 2.0)) throw std::invalid_argument("infrared: r must lie in [1, 2)");
  if (!(cutoff > 0.0)) throw std::invalid_argument("infrared: cutoff must be positive");
  if (target >= n) throw std::out_of_range("infrared: invalid target species");
  if (spin_counts.size() != n) throw std::invalid_argument("infrared: one spin count per species required");
  if (settings.levels < 2 || !(settings.ratio > 1.0)) throw std::invalid_argument("infrared: need >= 2 levels");
  check_separable(kernel, n);

  InfraredReport rep;
  rep.species = target;
  rep.r = r;
  rep.cutoff = cutoff;
  for (std::size_t l = 0; l < settings.levels; ++l)
    rep.radii.push_back(cutoff * std::pow(settings.ratio, -double(l + 1)));

  const auto R = static_cast<Eigen::Index>(kernel.terms.size());
  Eigen::MatrixXcd Z;  // compressed form factor of the slice Gram: M = Z Z^*
  if (R > 0) {
    const GramSet gs = gram_set(kernel, exponents, settings.continuum, target);
    rep.tail_fraction = gs.tail;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Ones(R, R);
    for (std::size_t i = 0; i < n; ++i)
      if (i != target) M = M.cwiseProduct(gs.grams[i]);
    M *= spin_product(spin_counts, target);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()));
    const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < R; ++j)
      if (es.eigenvalues()[j] > 1e-14 * top) keep.push_back(j);
    Z.resize(R, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t q = 0; q < keep.size(); ++q)
      Z.col(static_cast<Eigen::Index>(q)) = es.eigenvectors().col(keep[q]) * std::sqrt(es.eigenvalues()[keep[q]]);
  }

  auto slice = [&](const Vec3& k) {
    Eigen::VectorXcd v(R);
    for (Eigen::Index q = 0; q < R; ++q) {
      const auto& term = kernel.terms[static_cast<std::size_t>(q)];
      const PhaseFactor& pf = term.factors[target];
      const double tk = pf.wavevector[0] * k[0] + pf.wavevector[1] * k[1] + pf.wavevector[2] * k[2];
      v[q] = term.coefficient * kernel.bases[pf.base](k) * std::exp(Complex{0.0, tk});
    }
    return v;
  };
  auto norm2 = [&](const Eigen::VectorXcd& v) { return Z.size() == 0 ? 0.0 : (Z.adjoint() * v).squaredNorm(); };

  const Grid1D polar = gauss_legendre_grid(settings.polar_nodes, -1.0, 1.0);
  const double target_spins = double(spin_counts[target]);
  auto region = [&](double lo, double hi, double& gs1, double& gs2) {
    gs1 = gs2 = 0.0;
    if (R == 0) return;
    const Grid1D radial = gauss_legendre_grid(settings.radial_nodes, std::log(lo), std::log(hi));
    for (std::size_t a = 0; a < radial.size(); ++a) {
      const double rad = std::exp(radial.nodes[a]);
      const double jac = radial.weights[a] * rad * rad * rad;
      const double h = 1e-5 * rad;
      for (std::size_t b = 0; b < polar.size(); ++b) {
        const double ct = polar.nodes[b], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (std::size_t c = 0; c < settings.azimuth_nodes; ++c) {
          const double phi = 2.0 * std::numbers::pi * (double(c) + 0.5) / double(settings.azimuth_nodes);
          const double w = jac * polar.weights[b] * 2.0 * std::numbers::pi / double(settings.azimuth_nodes);
          const Vec3 k{rad * st * std::cos(phi), rad * st * std::sin(phi), rad * ct};
          const double s0 = norm2(slice(k));
          double sg = 0.0;
          for (int ax = 0; ax < 3; ++ax) {
            Vec3 kp = k, km = k;
            kp[ax] += h;
            km[ax] -= h;
            sg += norm2((slice(kp) - slice(km)) / (2.0 * h));
          }
          gs1 += w * std::pow(rad, -2.0 * r) * std::pow(s0, r / 2.0);
          gs2 += w * std::pow(rad, -r) * std::pow(sg, r / 2.0);
        }
      }
    }
    gs1 *= target_spins;
    gs2 *= target_spins;
  };

  std::vector<double> d1, d2;
  double upper = cutoff, acc1 = 0.0, acc2 = 0.0;
  for (double lo : rep.radii) {
    double a = 0.0, b = 0.0;
    region(lo, upper, a, b);
    acc1 += a;
    acc2 += b;
    d1.push_back(a);
    d2.push_back(b);
    rep.gs1_values.push_back(acc1);
    rep.gs2_values.push_back(acc2);
    upper = lo;
  }

  // Shell increments scale like rho^p; p > 0 is integrable at the origin.
  auto fit = [&](const std::vector<double>& d) {
    const std::size_t L = d.size();
    const double prev = d[L - 2], last = d[L - 1];
    if (!(prev > 0.0) || !(last > 0.0)) return std::numeric_limits<double>::infinity();
    return std::log(last / prev) / std::log(1.0 / settings.ratio);
  };
  rep.gs1_exponent = fit(d1);
  rep.gs2_exponent = fit(d2);
  rep.gs1_finite = rep.gs1_exponent > settings.divergence_margin;
  rep.gs2_finite = rep.gs2_exponent > settings.divergence_margin;
  return rep;
}

}  // namespace fqft
