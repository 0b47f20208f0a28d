#include "fermiqft/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace fqft {

namespace {

// Golub-Welsch: nodes and first-component weights of a symmetric Jacobi matrix.
Grid1D golub_welsch(const std::vector<double>& offdiag, double mu0) {
  const auto n = static_cast<Eigen::Index>(offdiag.size() + 1);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) J(k, k + 1) = J(k + 1, k) = offdiag[static_cast<std::size_t>(k)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Grid1D g;
  for (Eigen::Index i = 0; i < n; ++i) {
    g.nodes.push_back(es.eigenvalues()[i]);
    g.weights.push_back(mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
  }
  return g;
}

bool is_uniform(const Grid1D& g) {
  if (g.size() < 3) return false;
  const double dx = g.nodes[1] - g.nodes[0];
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (std::abs(g.nodes[i] - g.nodes[i - 1] - dx) > 1e-10 * std::abs(dx)) return false;
    if (std::abs(g.weights[i] - dx) > 1e-10 * std::abs(dx)) return false;
  }
  return true;
}

Eigen::MatrixXcd forward_matrix(const Grid1D& grid, std::size_t l_max) {
  Eigen::MatrixXd E = hermite_functions(l_max, grid.nodes);
  for (Eigen::Index j = 0; j < E.cols(); ++j) E.col(j) *= grid.weights[static_cast<std::size_t>(j)];
  return E.cast<Complex>();
}

}  // namespace

Grid1D uniform_grid(std::size_t n, double half_width) {
  if (n < 2 || !(half_width > 0)) throw std::invalid_argument("uniform_grid: need n >= 2 and positive width");
  Grid1D g;
  const double dx = 2.0 * half_width / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    g.nodes.push_back(-half_width + dx * static_cast<double>(j));
    g.weights.push_back(dx);
  }
  return g;
}

Grid1D gauss_hermite_rule(std::size_t n) {
  Grid1D g = gauss_hermite_grid(n);
  for (std::size_t i = 0; i < n; ++i) g.weights[i] *= std::exp(-g.nodes[i] * g.nodes[i]);
  return g;
}

// Nodes from Golub-Welsch; weights from the Christoffel function, w_i exp(x_i^2) = 1 / sum_{l<n} psi_l(x_i)^2, which
// stays accurate where the eigenvector components underflow.
Grid1D gauss_hermite_grid(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_hermite: n must be positive");
  std::vector<double> beta;
  for (std::size_t k = 1; k < n; ++k) beta.push_back(std::sqrt(static_cast<double>(k) / 2.0));
  Grid1D g = golub_welsch(beta, std::sqrt(std::numbers::pi));
  const Eigen::MatrixXd psi = hermite_functions(n - 1, g.nodes);
  for (std::size_t i = 0; i < n; ++i) g.weights[i] = 1.0 / psi.col(static_cast<Eigen::Index>(i)).squaredNorm();
  return g;
}

Grid1D gauss_legendre_grid(std::size_t n, double a, double b) {
  if (n == 0 || !(b > a)) throw std::invalid_argument("gauss_legendre: need n > 0 and a < b");
  std::vector<double> beta;
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    beta.push_back(kk / std::sqrt(4.0 * kk * kk - 1.0));
  }
  Grid1D g = golub_welsch(beta, 2.0);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < n; ++i) {
    g.nodes[i] = mid + half * g.nodes[i];
    g.weights[i] *= half;
  }
  return g;
}

Grid1D composite_legendre_grid(std::size_t n, std::span<const double> breakpoints) {
  if (breakpoints.size() < 2) throw std::invalid_argument("composite_legendre: need at least two breakpoints");
  Grid1D g;
  for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
    Grid1D panel = gauss_legendre_grid(n, breakpoints[p], breakpoints[p + 1]);
    g.nodes.insert(g.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    g.weights.insert(g.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return g;
}

Eigen::MatrixXd hermite_functions(std::size_t l_max, std::span<const double> x) {
  const auto L = static_cast<Eigen::Index>(l_max + 1);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd psi(L, n);
  const double norm0 = std::pow(std::numbers::pi, -0.25);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double xj = x[static_cast<std::size_t>(j)];
    psi(0, j) = norm0 * std::exp(-0.5 * xj * xj);
    if (L > 1) psi(1, j) = std::sqrt(2.0) * xj * psi(0, j);
    for (Eigen::Index l = 1; l + 1 < L; ++l) {
      const double ld = static_cast<double>(l);
      psi(l + 1, j) = std::sqrt(2.0 / (ld + 1.0)) * xj * psi(l, j) - std::sqrt(ld / (ld + 1.0)) * psi(l - 1, j);
    }
  }
  return psi;
}

HermiteBasis hermite_basis(std::size_t l_max, const Grid1D& grid, double tolerance) {
  HermiteBasis b;
  b.grid = grid;
  b.l_max = l_max;
  b.values = hermite_functions(l_max, grid.nodes);
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(grid.weights.data(), static_cast<Eigen::Index>(grid.size()));
  Eigen::MatrixXd gram = b.values * w.asDiagonal() * b.values.transpose();
  b.orthonormality_residual =
      (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (b.orthonormality_residual > tolerance)
    throw std::runtime_error("hermite_basis: grid too coarse for l_max=" + std::to_string(l_max) +
                             " (orthonormality residual " + std::to_string(b.orthonormality_residual) + ")");
  if (is_uniform(grid)) {
    Eigen::MatrixXd h = sinc_dvr_oscillator(grid);
    double worst = 0.0;
    for (Eigen::Index l = 0; l < b.values.rows(); ++l) {
      Eigen::VectorXd e = b.values.row(l).transpose();
      worst = std::max(worst, (h * e - (2.0 * static_cast<double>(l) + 1.0) * e).cwiseAbs().maxCoeff());
    }
    b.eigen_residual = worst;
  }
  return b;
}

Eigen::MatrixXd sinc_dvr_oscillator(const Grid1D& uniform) {
  if (!is_uniform(uniform)) throw std::invalid_argument("sinc_dvr_oscillator: grid must be uniform");
  const auto n = static_cast<Eigen::Index>(uniform.size());
  const double dx = uniform.nodes[1] - uniform.nodes[0];
  const double pi2 = std::numbers::pi * std::numbers::pi;
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        const double x = uniform.nodes[static_cast<std::size_t>(i)];
        h(i, j) = pi2 / (3.0 * dx * dx) + x * x;
      } else {
        const double d = static_cast<double>(i - j);
        h(i, j) = 2.0 * (((i - j) % 2) ? -1.0 : 1.0) / (dx * dx * d * d);
      }
    }
  }
  return h;
}

Eigen::MatrixXd oscillator_power(const Grid1D& uniform, double s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sinc_dvr_oscillator(uniform));
  if (es.eigenvalues().minCoeff() <= 0.0) throw std::runtime_error("oscillator_power: nonpositive spectrum");
  Eigen::VectorXd p = es.eigenvalues().array().pow(s);
  return es.eigenvectors() * p.asDiagonal() * es.eigenvectors().transpose();
}

AxisTensor sample_axis_tensor(const std::function<Complex(std::span<const double>)>& f, const Grid1D& grid,
                              std::size_t axes) {
  AxisTensor t{axes, grid.size(), {}};
  std::size_t total = 1;
  for (std::size_t a = 0; a < axes; ++a) total *= grid.size();
  t.values.resize(total);
  std::vector<double> x(axes);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (std::size_t a = axes; a-- > 0;) {
      x[a] = grid.nodes[rest % grid.size()];
      rest /= grid.size();
    }
    t.values[flat] = f(x);
  }
  return t;
}

double quadrature_norm(const AxisTensor& t, const Grid1D& grid) {
  double acc = 0.0;
  for (std::size_t flat = 0; flat < t.values.size(); ++flat) {
    double w = 1.0;
    std::size_t rest = flat;
    for (std::size_t a = 0; a < t.axes; ++a) {
      w *= grid.weights[rest % grid.size()];
      rest /= grid.size();
    }
    acc += w * std::norm(t.values[flat]);
  }
  return std::sqrt(acc);
}

std::vector<Complex> mode_product(const std::vector<Complex>& data, const std::vector<std::size_t>& shape,
                                  std::size_t axis, const Eigen::MatrixXcd& A) {
  using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  std::size_t outer = 1, inner = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= shape[a];
  for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
  const auto n = static_cast<Eigen::Index>(shape[axis]);
  if (A.cols() != n) throw std::invalid_argument("mode_product: matrix width differs from axis extent");
  const auto r = A.rows();
  const auto in = static_cast<Eigen::Index>(inner);
  std::vector<Complex> out(outer * static_cast<std::size_t>(r) * inner);
  for (std::size_t o = 0; o < outer; ++o) {
    Eigen::Map<const RowMat> block(data.data() + o * static_cast<std::size_t>(n) * inner, n, in);
    Eigen::Map<RowMat> dst(out.data() + o * static_cast<std::size_t>(r) * inner, r, in);
    dst.noalias() = A * block;
  }
  return out;
}

RegularityResult apply_regularity_operator(const AxisTensor& samples, const Grid1D& grid, std::size_t l_max,
                                           std::span<const double> exponents, double tail_tolerance) {
  if (exponents.size() != samples.axes) throw std::invalid_argument("regularity: one exponent per axis required");
  if (samples.points != grid.size()) throw std::invalid_argument("regularity: samples do not match grid");
  const std::size_t L = l_max + 1;
  RegularityResult res;
  res.input_norm = quadrature_norm(samples, grid);
  const Eigen::MatrixXcd F = forward_matrix(grid, l_max);
  std::vector<std::size_t> shape(samples.axes, grid.size());
  std::vector<Complex> c = samples.values;
  for (std::size_t a = 0; a < samples.axes; ++a) {
    c = mode_product(c, shape, a, F);
    shape[a] = L;
  }
  double captured = 0.0;
  for (const auto& v : c) captured += std::norm(v);
  res.tail_fraction = res.input_norm > 0 ? std::max(0.0, 1.0 - captured / (res.input_norm * res.input_norm)) : 0.0;
  if (res.tail_fraction > tail_tolerance)
    throw std::runtime_error("regularity: Hermite expansion not converged (tail fraction " +
                             std::to_string(res.tail_fraction) + ")");
  double acc = 0.0;
  for (std::size_t flat = 0; flat < c.size(); ++flat) {
    std::size_t rest = flat;
    double factor = 1.0;
    for (std::size_t a = samples.axes; a-- > 0;) {
      const double l = static_cast<double>(rest % L);
      rest /= L;
      factor *= std::pow(2.0 * l + 1.0, exponents[a]);
    }
    c[flat] *= factor;
    acc += std::norm(c[flat]);
  }
  res.norm = std::sqrt(acc);
  res.coefficients = c;
  Eigen::MatrixXcd back = hermite_functions(l_max, grid.nodes).transpose().cast<Complex>();
  std::vector<Complex> v = c;
  for (std::size_t a = 0; a < samples.axes; ++a) {
    v = mode_product(v, shape, a, back);
    shape[a] = grid.size();
  }
  res.resampled = {samples.axes, grid.size(), std::move(v)};
  return res;
}

AxisTensor apply_spectral_powers(const AxisTensor& samples, const Grid1D& uniform, std::span<const double> exponents) {
  if (exponents.size() != samples.axes) throw std::invalid_argument("spectral powers: one exponent per axis");
  std::vector<std::size_t> shape(samples.axes, uniform.size());
  std::vector<Complex> v = samples.values;
  for (std::size_t a = 0; a < samples.axes; ++a) {
    if (exponents[a] == 0.0) continue;
    v = mode_product(v, shape, a, oscillator_power(uniform, exponents[a]).cast<Complex>());
  }
  return {samples.axes, uniform.size(), std::move(v)};
}

HermiteTransform3D::HermiteTransform3D(Grid1D grid, std::size_t l_max)
    : grid_(std::move(grid)), l_max_(l_max), forward_(forward_matrix(grid_, l_max)) {
  const std::size_t L = l_max_ + 1, N = grid_.size();
  levels_.resize(static_cast<Eigen::Index>(L * L * L));
  for (std::size_t lx = 0; lx < L; ++lx)
    for (std::size_t ly = 0; ly < L; ++ly)
      for (std::size_t lz = 0; lz < L; ++lz)
        levels_[static_cast<Eigen::Index>(lz + L * (ly + L * lx))] =
            double((2 * lx + 1) * (2 * ly + 1) * (2 * lz + 1));
  weights3_.resize(static_cast<Eigen::Index>(N * N * N));
  for (std::size_t ix = 0; ix < N; ++ix)
    for (std::size_t iy = 0; iy < N; ++iy)
      for (std::size_t iz = 0; iz < N; ++iz)
        weights3_[static_cast<Eigen::Index>(iz + N * (iy + N * ix))] =
            grid_.weights[ix] * grid_.weights[iy] * grid_.weights[iz];
}

Eigen::VectorXcd HermiteTransform3D::transform(const Eigen::VectorXcd& samples) const {
  const auto N = static_cast<Eigen::Index>(grid_.size());
  const auto L = static_cast<Eigen::Index>(l_max_ + 1);
  if (samples.size() != N * N * N) throw std::invalid_argument("transform: sample count mismatch");
  Eigen::Map<const Eigen::MatrixXcd> A(samples.data(), N, N * N);
  Eigen::MatrixXcd C1 = forward_ * A;  // (lz, iy + N ix)
  Eigen::MatrixXcd C2(L, L * N);       // (lz, ly + L ix)
  const Eigen::MatrixXcd Ft = forward_.transpose();
  for (Eigen::Index ix = 0; ix < N; ++ix) C2.middleCols(L * ix, L).noalias() = C1.middleCols(N * ix, N) * Ft;
  Eigen::Map<const Eigen::MatrixXcd> C2v(C2.data(), L * L, N);
  Eigen::MatrixXcd C3 = C2v * Ft;  // (lz + L ly, lx)
  return Eigen::Map<const Eigen::VectorXcd>(C3.data(), L * L * L);
}

double HermiteTransform3D::quadrature_norm2(const Eigen::VectorXcd& samples) const {
  return (weights3_.array() * samples.array().abs2()).sum();
}

}  // namespace fqft
