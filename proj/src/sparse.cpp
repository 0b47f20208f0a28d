#include "fermiqft/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fqft {

namespace {

bool row_major_less(const Triplet& a, const Triplet& b) {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

void check_same_dimension(const SparseOperator& a, const SparseOperator& b) {
  if (a.dimension() != b.dimension())
    throw std::invalid_argument("sparse operator dimension mismatch: " +
                                std::to_string(a.dimension()) + " vs " +
                                std::to_string(b.dimension()));
}

// Sorted merge of two canonical triplet lists with b scaled by sign.
SparseOperator merge(const SparseOperator& a, const SparseOperator& b, double sign) {
  check_same_dimension(a, b);
  auto x = a.triplets();
  auto y = b.triplets();
  std::vector<Triplet> out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && row_major_less(x[i], y[j]))) {
      out.push_back(x[i++]);
    } else if (i == x.size() || row_major_less(y[j], x[i])) {
      out.push_back({y[j].row, y[j].col, sign * y[j].value});
      ++j;
    } else {
      Complex v = x[i].value + sign * y[j].value;
      if (v != Complex{}) out.push_back({x[i].row, x[i].col, v});
      ++i;
      ++j;
    }
  }
  return SparseOperator::from_triplets(a.dimension(), std::move(out));
}

}  // namespace

SparseOperator::SparseOperator(std::size_t dimension) : dim_(dimension), row_ptr_(dimension + 1, 0) {}

SparseOperator SparseOperator::from_triplets(std::size_t dimension, std::vector<Triplet> entries) {
  for (const auto& t : entries)
    if (t.row >= dimension || t.col >= dimension)
      throw std::out_of_range("triplet index outside operator dimension");
  if (!std::is_sorted(entries.begin(), entries.end(), row_major_less))
    std::stable_sort(entries.begin(), entries.end(), row_major_less);
  SparseOperator op(dimension);
  op.entries_.reserve(entries.size());
  for (const auto& t : entries) {
    if (!op.entries_.empty() && op.entries_.back().row == t.row && op.entries_.back().col == t.col) {
      op.entries_.back().value += t.value;
    } else {
      op.entries_.push_back(t);
    }
  }
  std::erase_if(op.entries_, [](const Triplet& t) { return t.value == Complex{}; });
  op.rebuild_row_index();
  return op;
}

SparseOperator SparseOperator::identity(std::size_t dimension) {
  std::vector<Triplet> e(dimension);
  for (std::size_t i = 0; i < dimension; ++i) e[i] = {i, i, 1.0};
  return from_triplets(dimension, std::move(e));
}

SparseOperator SparseOperator::diagonal(std::span<const double> values) {
  std::vector<Triplet> e;
  e.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] != 0.0) e.push_back({i, i, values[i]});
  return from_triplets(values.size(), std::move(e));
}

SparseOperator SparseOperator::diagonal(std::span<const Complex> values) {
  std::vector<Triplet> e;
  e.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] != Complex{}) e.push_back({i, i, values[i]});
  return from_triplets(values.size(), std::move(e));
}

SparseOperator SparseOperator::from_dense(const DenseMatrix& m, double drop_below) {
  if (m.rows() != m.cols()) throw std::invalid_argument("from_dense: matrix must be square");
  std::vector<Triplet> e;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (std::abs(m(r, c)) > drop_below)
        e.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), m(r, c)});
  return from_triplets(static_cast<std::size_t>(m.rows()), std::move(e));
}

void SparseOperator::rebuild_row_index() {
  row_ptr_.assign(dim_ + 1, 0);
  for (const auto& t : entries_) ++row_ptr_[t.row + 1];
  for (std::size_t r = 0; r < dim_; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

Complex SparseOperator::at(std::size_t row, std::size_t col) const {
  auto first = entries_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  auto last = entries_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  auto it = std::lower_bound(first, last, col, [](const Triplet& t, std::size_t c) { return t.col < c; });
  return (it != last && it->col == col) ? it->value : Complex{};
}

SparseOperator SparseOperator::adjoint() const {
  std::vector<Triplet> e;
  e.reserve(entries_.size());
  for (const auto& t : entries_) e.push_back({t.col, t.row, std::conj(t.value)});
  return from_triplets(dim_, std::move(e));
}

SparseOperator SparseOperator::scaled(Complex factor) const {
  std::vector<Triplet> e;
  e.reserve(entries_.size());
  for (const auto& t : entries_) e.push_back({t.row, t.col, factor * t.value});
  return from_triplets(dim_, std::move(e));
}

bool SparseOperator::is_diagonal() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Triplet& t) { return t.row == t.col; });
}

bool SparseOperator::is_real() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Triplet& t) { return t.value.imag() == 0.0; });
}

std::vector<Complex> SparseOperator::diagonal_entries() const {
  std::vector<Complex> d(dim_);
  for (const auto& t : entries_)
    if (t.row == t.col) d[t.row] = t.value;
  return d;
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  for (const auto& t : entries_) m = std::max(m, std::abs(t.value));
  return m;
}

double SparseOperator::hermiticity_defect() const { return max_abs_difference(*this, adjoint()); }

Vector SparseOperator::apply(const Vector& x) const {
  Vector y(static_cast<Eigen::Index>(dim_));
  apply_into(x, y);
  return y;
}

void SparseOperator::apply_into(const Vector& x, Vector& y) const {
  if (static_cast<std::size_t>(x.size()) != dim_) throw std::invalid_argument("apply: vector length mismatch");
  y.setZero(static_cast<Eigen::Index>(dim_));
  for (std::size_t r = 0; r < dim_; ++r) {
    Complex acc{};
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      acc += entries_[k].value * x[static_cast<Eigen::Index>(entries_[k].col)];
    y[static_cast<Eigen::Index>(r)] = acc;
  }
}

DenseMatrix SparseOperator::to_dense() const {
  DenseMatrix m = DenseMatrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  for (const auto& t : entries_) m(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) = t.value;
  return m;
}

EigenSparse SparseOperator::to_eigen() const {
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(entries_.size());
  for (const auto& e : entries_)
    t.emplace_back(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col), e.value);
  EigenSparse m(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseOperator SparseOperator::diagonal_function(const std::function<double(double)>& f) const {
  if (!is_diagonal()) throw std::invalid_argument("diagonal_function: operator is not diagonal");
  std::vector<double> d(dim_);
  auto entries = diagonal_entries();
  for (std::size_t i = 0; i < dim_; ++i) {
    if (entries[i].imag() != 0.0) throw std::invalid_argument("diagonal_function: complex diagonal entry");
    d[i] = f(entries[i].real());
  }
  return diagonal(std::span<const double>(d));
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) { return merge(a, b, 1.0); }
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) { return merge(a, b, -1.0); }

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  check_same_dimension(a, b);
  const std::size_t n = a.dimension();
  auto ea = a.triplets();
  auto eb = b.triplets();
  std::vector<Complex> acc(n);
  std::vector<char> used(n, 0);
  std::vector<std::size_t> cols;
  std::vector<Triplet> out;
  for (std::size_t r = 0; r < n; ++r) {
    cols.clear();
    for (std::size_t k = a.row_begin(r); k < a.row_begin(r + 1); ++k) {
      const std::size_t mid = ea[k].col;
      for (std::size_t q = b.row_begin(mid); q < b.row_begin(mid + 1); ++q) {
        const std::size_t c = eb[q].col;
        if (!used[c]) {
          used[c] = 1;
          cols.push_back(c);
        }
        acc[c] += ea[k].value * eb[q].value;
      }
    }
    std::sort(cols.begin(), cols.end());
    for (auto c : cols) {
      if (acc[c] != Complex{}) out.push_back({r, c, acc[c]});
      acc[c] = Complex{};
      used[c] = 0;
    }
  }
  return SparseOperator::from_triplets(n, std::move(out));
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) { return a * b - b * a; }
SparseOperator anticommutator(const SparseOperator& a, const SparseOperator& b) { return a * b + b * a; }

double max_abs_difference(const SparseOperator& a, const SparseOperator& b) { return (a - b).max_abs(); }

void write_triplets(std::ostream& out, const SparseOperator& op) {
  out << op.dimension() << ' ' << op.nnz() << '\n';
  out << std::setprecision(17);
  for (const auto& t : op.triplets())
    out << t.row << ' ' << t.col << ' ' << t.value.real() << ' ' << t.value.imag() << '\n';
}

SparseOperator read_triplets(std::istream& in) {
  std::size_t dim = 0, nnz = 0;
  if (!(in >> dim >> nnz)) throw std::runtime_error("triplet file: missing header");
  std::vector<Triplet> e(nnz);
  for (auto& t : e) {
    double re = 0, im = 0;
    if (!(in >> t.row >> t.col >> re >> im)) throw std::runtime_error("triplet file: truncated entry list");
    t.value = {re, im};
  }
  return SparseOperator::from_triplets(dim, std::move(e));
}

}  // namespace fqft
