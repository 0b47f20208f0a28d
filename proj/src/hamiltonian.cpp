#include "fermiqft/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace fqft {

namespace {

class MonomialWalker {
 public:
  MonomialWalker(const KernelTensor& tensor, const std::vector<LadderFactor>& factors, const ModeTable& table,
                 const FockBasis& basis, bool conjugate, Complex prefactor, std::vector<Triplet>& out)
      : tensor_(tensor),
        factors_(factors),
        table_(table),
        basis_(basis),
        conjugate_(conjugate),
        prefactor_(prefactor),
        local_(tensor.arity(), 0),
        out_(out) {}

  void pin(std::size_t species, std::size_t local_mode) { local_[species] = local_mode; }

  void run_column(std::size_t col) {
    col_ = col;
    walk(static_cast<std::ptrdiff_t>(factors_.size()) - 1, basis_.state(col), 1);
  }

 private:
  void walk(std::ptrdiff_t pos, Occupation s, int sign) {
    if (pos < 0) {
      Complex v = tensor_.values[tensor_.flat_index(local_)];
      if (v == Complex{}) return;
      if (conjugate_) v = std::conj(v);
      if (auto r = basis_.index_of(s)) out_.push_back({*r, col_, prefactor_ * v * double(sign)});
      return;
    }
    const auto& f = factors_[static_cast<std::size_t>(pos)];
    const std::size_t off = table_.offset(f.species);
    const std::size_t count = table_.species_mode_count(f.species);
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t m = off + j;
      const Occupation bit = Occupation{1} << m;
      if (f.create == static_cast<bool>(s & bit)) continue;
      local_[f.species] = j;
      walk(pos - 1, s ^ bit, sign * jordan_wigner_sign(s, m));
    }
  }

  const KernelTensor& tensor_;
  const std::vector<LadderFactor>& factors_;
  const ModeTable& table_;
  const FockBasis& basis_;
  bool conjugate_;
  Complex prefactor_;
  std::vector<std::size_t> local_;
  std::vector<Triplet>& out_;
  std::size_t col_ = 0;
};

void check_consistency(const KernelTensor& tensor, const ModeTable& table, const FockBasis& basis) {
  if (basis.mode_count() != table.mode_count())
    throw std::invalid_argument("interaction: basis and mode table disagree on the mode count");
  if (tensor.arity() != table.species_count())
    throw std::invalid_argument("interaction: kernel tensor arity differs from species count");
  for (std::size_t i = 0; i < tensor.arity(); ++i)
    if (tensor.extents[i] != table.species_mode_count(i))
      throw std::invalid_argument("interaction: kernel tensor extent differs from species mode count");
}

std::vector<LadderFactor> adjoint_factors(const std::vector<LadderFactor>& f) {
  std::vector<LadderFactor> out(f.rbegin(), f.rend());
  for (auto& x : out) x.create = !x.create;
  return out;
}

}  // namespace

std::vector<LadderFactor> signature_factors(const ProcessSignature& sig) {
  std::vector<LadderFactor> f;
  for (std::size_t j = 0; j < sig.n; ++j) f.push_back({sig.order[j], j < sig.p});
  return f;
}

SparseOperator assemble_monomial_sum(const KernelTensor& tensor, const std::vector<LadderFactor>& factors,
                                     const ModeTable& table, const FockBasis& basis, bool conjugate_values,
                                     std::optional<std::pair<std::size_t, std::size_t>> fixed, Complex prefactor) {
  check_consistency(tensor, table, basis);
  std::vector<Triplet> out;
  MonomialWalker walker(tensor, factors, table, basis, conjugate_values, prefactor, out);
  if (fixed) walker.pin(fixed->first, fixed->second);
  for (std::size_t c = 0; c < basis.size(); ++c) walker.run_column(c);
  return SparseOperator::from_triplets(basis.size(), std::move(out));
}

SparseOperator assemble_interaction_term(const KernelTensor& tensor, const ProcessSignature& sig,
                                         const ModeTable& table, const FockBasis& basis) {
  if (!sig.valid() || sig.n != tensor.arity())
    throw std::invalid_argument("interaction term: signature " + sig.label() + " inconsistent with kernel");
  return assemble_monomial_sum(tensor, signature_factors(sig), table, basis);
}

HamiltonianBundle assemble_total(const TermList& terms, double coupling, const FockBasis& basis,
                                 const ModeTable& table) {
  HamiltonianBundle b;
  b.n = table.species_count();
  b.coupling = coupling;
  std::set<ProcessSignature> seen;
  b.interaction = SparseOperator(basis.size());
  for (const auto& [sig, tensor] : terms) {
    if (sig.n != b.n)
      throw std::invalid_argument("assemble_total: signature " + sig.label() + " has n=" + std::to_string(sig.n) +
                                  " but the table has " + std::to_string(b.n) + " species");
    if (!seen.insert(sig).second) throw std::invalid_argument("assemble_total: duplicate signature " + sig.label());
    InteractionTerm term{sig, tensor, assemble_interaction_term(tensor, sig, table, basis)};
    b.interaction = b.interaction + term.op + term.op.adjoint();
    b.terms.push_back(std::move(term));
  }
  b = with_free_part(b, table, basis);
  const double defect = b.total.hermiticity_defect();
  if (defect > 1e-13 * std::max(1.0, b.total.max_abs()))
    throw std::logic_error("assemble_total: assembled Hamiltonian is not hermitian");
  return b;
}

HamiltonianBundle with_free_part(const HamiltonianBundle& bundle, const ModeTable& table, const FockBasis& basis) {
  HamiltonianBundle b = bundle;
  b.free_by_species.clear();
  b.free = SparseOperator(basis.size());
  for (std::size_t i = 0; i < table.species_count(); ++i) {
    b.free_by_species.push_back(free_hamiltonian(table, basis, i));
    b.free = b.free + b.free_by_species.back();
  }
  b.total = b.free + b.interaction.scaled(b.coupling);
  return b;
}

HamiltonianBundle with_coupling(const HamiltonianBundle& bundle, double coupling) {
  HamiltonianBundle b = bundle;
  b.coupling = coupling;
  b.total = b.free + b.interaction.scaled(coupling);
  return b;
}

BoundReport parity_identity_check(const HamiltonianBundle& bundle, const FockBasis& basis,
                                  std::size_t spectral_dim_cap) {
  if (bundle.n % 2 == 0)
    throw std::invalid_argument("parity identity applies to odd n only (got n=" + std::to_string(bundle.n) + ")");
  const SparseOperator P = parity(basis);
  const SparseOperator reflected = bundle.total - bundle.interaction.scaled(2.0 * bundle.coupling);
  BoundReport r;
  r.name = "parity_identity";
  r.parameters = {{"n", bundle.n}, {"g", bundle.coupling}, {"dimension", basis.size()}};
  r.lhs = max_abs_difference(P * bundle.total * P, reflected);
  r.tolerance = 1e-12 * std::max(1.0, bundle.total.max_abs());
  r.rhs = r.tolerance;
  r.relation = "max|P H P - (H - 2g H_I)| <= tol";
  r.ratio = safe_ratio(r.lhs, r.rhs);
  r.pass = r.lhs <= r.tolerance;
  if (basis.size() <= spectral_dim_cap) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> a(bundle.total.to_dense(), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> c(reflected.to_dense(), Eigen::EigenvaluesOnly);
    const double spectral = (a.eigenvalues() - c.eigenvalues()).cwiseAbs().maxCoeff();
    r.details["spectral_deviation"] = spectral;
    const bool spectral_ok = spectral <= 1e-9 * std::max(1.0, a.eigenvalues().cwiseAbs().maxCoeff());
    r.details["spectra_coincide"] = spectral_ok;
    r.pass = r.pass && spectral_ok;
  }
  return r;
}

SparseOperator contraction_operator(const HamiltonianBundle& bundle, const ModeTable& table, const FockBasis& basis,
                                    std::size_t mode) {
  if (mode >= table.mode_count()) throw std::out_of_range("contraction: invalid mode");
  const std::size_t s = table.species_of(mode);
  const std::pair<std::size_t, std::size_t> pin{s, mode - table.offset(s)};
  SparseOperator out(basis.size());
  for (const auto& term : bundle.terms) {
    auto factors = signature_factors(term.signature);
    // b anticommutes past every factor except the creator of its own species.
    if (term.signature.is_created(s)) {
      const std::size_t j = term.signature.position(s);
      auto reduced = factors;
      reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(j));
      out = out + assemble_monomial_sum(term.tensor, reduced, table, basis, false, pin, j % 2 ? -1.0 : 1.0);
    } else {
      auto adj = adjoint_factors(factors);
      const std::size_t j = term.signature.n - 1 - term.signature.position(s);
      adj.erase(adj.begin() + static_cast<std::ptrdiff_t>(j));
      out = out + assemble_monomial_sum(term.tensor, adj, table, basis, true, pin, j % 2 ? -1.0 : 1.0);
    }
  }
  return out;
}

CommutatorDecomposition commutator_with_annihilator(const HamiltonianBundle& bundle, const ModeTable& table,
                                                    const FockBasis& basis, std::size_t mode) {
  CommutatorDecomposition d;
  const SparseOperator b = annihilation(table, basis, mode);
  d.commutator = b * bundle.interaction - bundle.interaction * b;
  d.contraction = contraction_operator(bundle, table, basis, mode);
  SparseOperator predicted = d.contraction;
  if (bundle.n % 2 == 1) predicted = predicted - (bundle.interaction * b).scaled(2.0);
  d.residual = max_abs_difference(d.commutator, predicted);
  return d;
}

}  // namespace fqft
