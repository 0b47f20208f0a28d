#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fqft {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;
using EigenSparse = Eigen::SparseMatrix<std::complex<double>, Eigen::ColMajor>;

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  Complex value{};
};

// Square complex sparse matrix stored as canonical row-major sorted triplets.
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(std::size_t dimension);

  // Sorts, sums duplicates, and drops entries that are exactly zero.
  static SparseOperator from_triplets(std::size_t dimension, std::vector<Triplet> entries);
  static SparseOperator identity(std::size_t dimension);
  static SparseOperator diagonal(std::span<const double> values);
  static SparseOperator diagonal(std::span<const Complex> values);
  static SparseOperator from_dense(const DenseMatrix& m, double drop_below = 0.0);

  std::size_t dimension() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }
  std::span<const Triplet> triplets() const { return entries_; }
  // Entries of row r occupy [row_begin(r), row_begin(r + 1)).
  std::size_t row_begin(std::size_t r) const { return row_ptr_[r]; }

  Complex at(std::size_t row, std::size_t col) const;
  SparseOperator adjoint() const;
  SparseOperator scaled(Complex factor) const;
  bool is_diagonal() const;
  bool is_real() const;
  std::vector<Complex> diagonal_entries() const;
  double max_abs() const;
  double hermiticity_defect() const;

  Vector apply(const Vector& x) const;
  void apply_into(const Vector& x, Vector& y) const;
  DenseMatrix to_dense() const;
  EigenSparse to_eigen() const;

  // Applies f to every diagonal entry; the operator must be diagonal with real entries.
  SparseOperator diagonal_function(const std::function<double(double)>& f) const;

  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(Complex c, const SparseOperator& a) { return a.scaled(c); }
  friend SparseOperator operator*(double c, const SparseOperator& a) { return a.scaled(c); }

 private:
  void rebuild_row_index();

  std::size_t dim_ = 0;
  std::vector<Triplet> entries_;
  std::vector<std::size_t> row_ptr_{0};
};

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);
SparseOperator anticommutator(const SparseOperator& a, const SparseOperator& b);
double max_abs_difference(const SparseOperator& a, const SparseOperator& b);

// Text format: first line "dimension nnz", then one "row col re im" line per entry.
void write_triplets(std::ostream& out, const SparseOperator& op);
SparseOperator read_triplets(std::istream& in);

}  // namespace fqft
