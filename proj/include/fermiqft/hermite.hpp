#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fermiqft/sparse.hpp"

namespace fqft {

// Quadrature grid: sum_j weights[j] f(nodes[j]) approximates the integral of f over the real line.
struct Grid1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

Grid1D uniform_grid(std::size_t n, double half_width);
// Gauss-Hermite nodes; the weights absorb exp(x^2) so plain integrals are approximated.
Grid1D gauss_hermite_grid(std::size_t n);
Grid1D gauss_legendre_grid(std::size_t n, double a, double b);
// Gauss-Legendre with n nodes on each panel between consecutive breakpoints.
Grid1D composite_legendre_grid(std::size_t n, std::span<const double> breakpoints);
// Raw Gauss-Hermite rule for the weight exp(-x^2).
Grid1D gauss_hermite_rule(std::size_t n);

// Rows l = 0..l_max of the normalized Hermite functions psi_l evaluated at x.
Eigen::MatrixXd hermite_functions(std::size_t l_max, std::span<const double> x);

struct HermiteBasis {
  Grid1D grid;
  std::size_t l_max = 0;
  Eigen::MatrixXd values;  // (l_max + 1) x grid size
  double orthonormality_residual = 0.0;
  // max_l ||h e_l - (2l+1) e_l|| with the discretized h; only for uniform grids, otherwise -1
  double eigen_residual = -1.0;
};

HermiteBasis hermite_basis(std::size_t l_max, const Grid1D& grid, double tolerance = 1e-8);

// h = -d^2/dx^2 + x^2 discretized by the sinc basis on a uniform grid.
Eigen::MatrixXd sinc_dvr_oscillator(const Grid1D& uniform);
// h^s through the eigen-decomposition of the discretized h.
Eigen::MatrixXd oscillator_power(const Grid1D& uniform, double s);

// Values of a function of `axes` variables on the tensor grid; axis 0 is the slowest index.
struct AxisTensor {
  std::size_t axes = 0;
  std::size_t points = 0;
  std::vector<Complex> values;
};

AxisTensor sample_axis_tensor(const std::function<Complex(std::span<const double>)>& f, const Grid1D& grid,
                              std::size_t axes);
double quadrature_norm(const AxisTensor& t, const Grid1D& grid);

// Mode product: replaces axis `axis` of extent shape[axis] by A.rows() entries via A.
std::vector<Complex> mode_product(const std::vector<Complex>& data, const std::vector<std::size_t>& shape,
                                  std::size_t axis, const Eigen::MatrixXcd& A);

struct RegularityResult {
  AxisTensor resampled;              // S G on the input grid
  std::vector<Complex> coefficients; // Hermite coefficients of S G, axis 0 slowest
  double norm = 0.0;                 // ||S G||_2
  double input_norm = 0.0;           // quadrature ||G||_2
  double tail_fraction = 0.0;        // share of ||G||^2 not captured by levels <= l_max
};

// Multiplies the Hermite coefficient with levels (l_a) by prod_a (2 l_a + 1)^{s_a}.
RegularityResult apply_regularity_operator(const AxisTensor& samples, const Grid1D& grid, std::size_t l_max,
                                           std::span<const double> exponents, double tail_tolerance = 1e-6);

// Brute-force check path: h^{s_a} from the discretized oscillator applied along each axis (uniform grid).
AxisTensor apply_spectral_powers(const AxisTensor& samples, const Grid1D& uniform, std::span<const double> exponents);

// 3D Hermite coefficients (lx, ly, lz) of functions sampled on grid^3.
class HermiteTransform3D {
 public:
  HermiteTransform3D(Grid1D grid, std::size_t l_max);

  const Grid1D& grid() const { return grid_; }
  std::size_t l_max() const { return l_max_; }
  std::size_t coefficient_count() const { return (l_max_ + 1) * (l_max_ + 1) * (l_max_ + 1); }
  std::size_t sample_count() const { return grid_.size() * grid_.size() * grid_.size(); }
  // Level eigenvalue (2lx+1)(2ly+1)(2lz+1) per coefficient index.
  const Eigen::VectorXd& levels() const { return levels_; }

  // Samples are indexed iz + N (iy + N ix); coefficients lz + L (ly + L lx).
  Eigen::VectorXcd transform(const Eigen::VectorXcd& samples) const;
  double quadrature_norm2(const Eigen::VectorXcd& samples) const;

 private:
  Grid1D grid_;
  std::size_t l_max_;
  Eigen::MatrixXcd forward_;  // (L) x N: psi_l(x_j) w_j
  Eigen::VectorXd levels_;
  Eigen::VectorXd weights3_;
};

}  // namespace fqft
