#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "fermiqft/fock.hpp"
#include "fermiqft/kernel_spec.hpp"
#include "fermiqft/modes.hpp"
#include "fermiqft/processes.hpp"
#include "fermiqft/report.hpp"
#include "fermiqft/sparse.hpp"

namespace fqft {

struct LadderFactor {
  std::size_t species = 0;
  bool create = false;
};

// Operator factors of a signature in product order: b*_{i_1} ... b*_{i_p} b_{i_{p+1}} ... b_{i_n}.
std::vector<LadderFactor> signature_factors(const ProcessSignature& sig);

// Sum over mode tuples of prefactor * g[tuple] * F_1 ... F_k, where the factors are applied right to left.
// A species in `fixed` has its mode pinned (local index) and is expected to be absent from `factors`.
SparseOperator assemble_monomial_sum(const KernelTensor& tensor, const std::vector<LadderFactor>& factors,
                                     const ModeTable& table, const FockBasis& basis, bool conjugate_values = false,
                                     std::optional<std::pair<std::size_t, std::size_t>> fixed = std::nullopt,
                                     Complex prefactor = 1.0);

SparseOperator assemble_interaction_term(const KernelTensor& tensor, const ProcessSignature& sig,
                                         const ModeTable& table, const FockBasis& basis);

struct InteractionTerm {
  ProcessSignature signature;
  KernelTensor tensor;
  SparseOperator op;  // the term without its hermitian conjugate
};

struct HamiltonianBundle {
  std::size_t n = 0;
  double coupling = 0.0;
  std::vector<SparseOperator> free_by_species;
  SparseOperator free;
  SparseOperator interaction;
  SparseOperator total;
  std::vector<InteractionTerm> terms;
};

using TermList = std::vector<std::pair<ProcessSignature, KernelTensor>>;

HamiltonianBundle assemble_total(const TermList& terms, double coupling, const FockBasis& basis,
                                 const ModeTable& table);

// Same interaction, free part rebuilt from another table (e.g. after a mass change).
HamiltonianBundle with_free_part(const HamiltonianBundle& bundle, const ModeTable& table, const FockBasis& basis);
HamiltonianBundle with_coupling(const HamiltonianBundle& bundle, double coupling);

// P H P against H - 2 g H_I for odd n, with P the parity operator.
BoundReport parity_identity_check(const HamiltonianBundle& bundle, const FockBasis& basis,
                                  std::size_t spectral_dim_cap = 1024);

struct CommutatorDecomposition {
  SparseOperator commutator;   // [b(xi), H_I]
  SparseOperator contraction;  // H'_I(xi)
  // max-abs residual of the even/odd decomposition against the direct matrix commutator
  double residual = 0.0;
};

// Structural contraction H'_I(xi) for a mode xi of the given species.
SparseOperator contraction_operator(const HamiltonianBundle& bundle, const ModeTable& table, const FockBasis& basis,
                                    std::size_t mode);

CommutatorDecomposition commutator_with_annihilator(const HamiltonianBundle& bundle, const ModeTable& table,
                                                    const FockBasis& basis, std::size_t mode);

}  // namespace fqft
