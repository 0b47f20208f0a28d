#include "fermiqft/spectra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace fqft {

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "auto" || name == "automatic") return SolverMethod::automatic;
  if (name == "dense") return SolverMethod::dense;
  if (name == "iterative" || name == "lanczos") return SolverMethod::iterative;
  throw std::invalid_argument("unknown solver method '" + name + "'");
}

std::string to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::automatic: return "auto";
    case SolverMethod::dense: return "dense";
    case SolverMethod::iterative: return "iterative";
  }
  return "auto";
}

namespace {

Vector random_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(normal(rng), normal(rng));
  return v;
}

void check_hermitian(const SparseOperator& H) {
  if (H.hermiticity_defect() > 1e-12 * std::max(1.0, H.max_abs()))
    throw std::invalid_argument("eigensolver: input operator is not hermitian");
}

double level_scale(double e) { return std::max(1.0, std::abs(e)); }

}  // namespace

EigenPairs dense_eigenpairs(const SparseOperator& H) {
  EigenPairs out;
  out.method = "dense";
  if (H.is_real()) {
    Eigen::MatrixXd m = H.to_dense().real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(H.to_dense());
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  }
  return out;
}

EigenPairs krylov_lowest(const MatVec& apply, std::size_t dim, std::size_t count, const SolverSettings& settings) {
  if (count == 0 || count > dim) throw std::invalid_argument("krylov: requested eigenpair count out of range");
  std::mt19937_64 rng(settings.seed);
  const std::size_t kmax = std::min(dim, std::max(settings.krylov_dim, 3 * count + 10));
  const std::size_t keep = std::min(kmax / 2, count + std::max<std::size_t>(count, 5));
  const auto D = static_cast<Eigen::Index>(dim);
  DenseMatrix V(D, static_cast<Eigen::Index>(kmax));
  DenseMatrix AV(D, static_cast<Eigen::Index>(kmax));
  Eigen::Index k = 0;
  Vector tmp(D);

  auto add = [&](Vector w) {
    const double ref = w.norm();
    if (!(ref > 0.0)) return false;
    for (int pass = 0; pass < 2; ++pass)
      if (k > 0) w -= V.leftCols(k) * (V.leftCols(k).adjoint() * w);
    const double nrm = w.norm();
    if (nrm < 1e-10 * ref) return false;
    V.col(k) = w / nrm;
    apply(V.col(k), tmp);
    AV.col(k) = tmp;
    ++k;
    return true;
  };

  for (std::size_t b = 0; b < std::min(dim, count + 1); ++b) add(random_vector(dim, rng));
  Eigen::Index expand = 0;

  EigenPairs out;
  out.method = "iterative";
  for (std::size_t restart = 0; restart <= settings.max_restarts; ++restart) {
    while (static_cast<std::size_t>(k) < kmax) {
      bool ok = false;
      while (expand < k && !ok) ok = add(AV.col(expand++));
      for (int attempt = 0; attempt < 4 && !ok; ++attempt) ok = add(random_vector(dim, rng));
      if (!ok) break;
    }
    DenseMatrix P = V.leftCols(k).adjoint() * AV.leftCols(k);
    P = (0.5 * (P + P.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(P);
    const auto& theta = es.eigenvalues();
    const DenseMatrix& S = es.eigenvectors();
    const auto c = static_cast<Eigen::Index>(count);
    DenseMatrix Y = V.leftCols(k) * S.leftCols(c);
    DenseMatrix R = AV.leftCols(k) * S.leftCols(c) - Y * theta.head(c).asDiagonal();
    bool converged = static_cast<std::size_t>(k) == dim;
    if (!converged) {
      converged = true;
      for (Eigen::Index i = 0; i < c; ++i)
        if (R.col(i).norm() > settings.tolerance * level_scale(theta[i])) converged = false;
    }
    out.iterations = restart + 1;
    if (converged) {
      out.values = theta.head(c);
      out.vectors = Y;
      return out;
    }
    const auto m = std::min<Eigen::Index>(static_cast<Eigen::Index>(keep), k);
    DenseMatrix Vk = V.leftCols(k) * S.leftCols(m);
    DenseMatrix AVk = AV.leftCols(k) * S.leftCols(m);
    V.leftCols(m) = Vk;
    AV.leftCols(m) = AVk;
    k = m;
    expand = k;
    for (Eigen::Index i = 0; i < c; ++i)
      if (R.col(i).norm() > settings.tolerance * level_scale(theta[i])) add(R.col(i));
  }
  throw std::runtime_error("krylov: no convergence within " + std::to_string(settings.max_restarts) + " restarts");
}

EigenPairs lowest_eigenpairs(const SparseOperator& H, std::size_t count, const SolverSettings& settings) {
  check_hermitian(H);
  const std::size_t dim = H.dimension();
  if (count == 0 || count > dim) throw std::invalid_argument("eigensolver: count exceeds dimension");
  SolverMethod method = settings.method;
  if (method == SolverMethod::automatic)
    method = dim <= settings.dense_cap ? SolverMethod::dense : SolverMethod::iterative;
  if (method == SolverMethod::dense) {
    if (dim > settings.dense_cap)
      throw std::invalid_argument("eigensolver: dimension " + std::to_string(dim) + " exceeds dense cap " +
                                  std::to_string(settings.dense_cap));
    EigenPairs all = dense_eigenpairs(H);
    const auto c = static_cast<Eigen::Index>(count);
    all.values = all.values.head(c).eval();
    all.vectors = all.vectors.leftCols(c).eval();
    return all;
  }
  // Small problems are exhausted by the Krylov space itself.
  return krylov_lowest([&H](const Vector& x, Vector& y) { H.apply_into(x, y); }, dim, count, settings);
}

double spectral_norm(const DenseMatrix& A) {
  if (A.size() == 0) return 0.0;
  const DenseMatrix gram = A.rows() < A.cols() ? DenseMatrix(A * A.adjoint()) : DenseMatrix(A.adjoint() * A);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double spectral_norm(const SparseOperator& A, const SolverSettings& settings) {
  if (A.nnz() == 0) return 0.0;
  if (A.dimension() <= 512) return spectral_norm(A.to_dense());
  const SparseOperator Ad = A.adjoint();
  Vector mid(static_cast<Eigen::Index>(A.dimension()));
  auto pairs = krylov_lowest(
      [&](const Vector& x, Vector& y) {
        A.apply_into(x, mid);
        Ad.apply_into(mid, y);
        y = -y;
      },
      A.dimension(), 1, settings);
  return std::sqrt(std::max(0.0, -pairs.values[0]));
}

GroundStateResult ground_state(const SparseOperator& H, const SolverSettings& settings) {
  const std::size_t dim = H.dimension();
  if (dim == 0) throw std::invalid_argument("ground_state: empty operator");
  std::size_t count = std::min<std::size_t>(dim, 4);
  EigenPairs pairs;
  std::size_t degeneracy = 1;
  for (;;) {
    pairs = lowest_eigenpairs(H, count, settings);
    const double e0 = pairs.values[0];
    degeneracy = 0;
    for (Eigen::Index i = 0; i < pairs.values.size(); ++i)
      if (pairs.values[i] - e0 <= settings.degeneracy_tolerance * level_scale(e0)) ++degeneracy;
    if (degeneracy < count || count == dim) break;
    count = std::min(dim, 2 * count);
  }
  GroundStateResult r;
  r.energy = pairs.values[0];
  r.degeneracy = degeneracy;
  r.method = pairs.method;
  const DenseMatrix U = pairs.vectors.leftCols(static_cast<Eigen::Index>(degeneracy));
  // Representative: projection of the first basis vector with a non-negligible overlap.
  Eigen::Index pick = 0;
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    if (U.row(i).norm() > 1e-6) {
      pick = i;
      break;
    }
  }
  Vector phi = U * U.row(pick).adjoint();
  phi.normalize();
  const Complex anchor = phi[pick];
  phi *= std::conj(anchor) / std::abs(anchor);
  r.state = phi;
  Vector hphi = H.apply(phi);
  r.energy = phi.dot(hphi).real();
  r.residual = (hphi - r.energy * phi).norm();
  const double scale = std::max(1.0, H.max_abs());
  if (r.residual > std::max(settings.tolerance, 1e-11) * scale * 10.0)
    throw std::runtime_error("ground_state: residual " + std::to_string(r.residual) + " above tolerance");
  return r;
}

SpectrumReport low_spectrum(const SparseOperator& H, std::size_t count, const ModeTable& table,
                            const SolverSettings& settings) {
  if (count > H.dimension()) throw std::invalid_argument("low_spectrum: count exceeds dimension");
  auto pairs = lowest_eigenpairs(H, count, settings);
  SpectrumReport rep;
  rep.method = pairs.method;
  rep.eigenvalues.assign(pairs.values.data(), pairs.values.data() + pairs.values.size());
  rep.gap = std::numeric_limits<double>::quiet_NaN();
  const double e0 = rep.eigenvalues.front();
  for (double e : rep.eigenvalues) {
    if (e - e0 > settings.degeneracy_tolerance * level_scale(e0)) {
      rep.gap = e - e0;
      break;
    }
  }
  rep.single_particle_threshold = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < table.mode_count(); ++m)
    rep.single_particle_threshold = std::min(rep.single_particle_threshold, table.energy(m));
  return rep;
}

Vector mode_wavefunction(const Vector& phi, const ModeTable& table, const FockBasis& basis, std::size_t mode) {
  const Occupation bit = Occupation{1} << mode;
  Vector out = Vector::Zero(phi.size());
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const Occupation s = basis.state(c);
    if (!(s & bit)) continue;
    if (auto r = basis.index_of(s ^ bit))
      out[static_cast<Eigen::Index>(*r)] += double(jordan_wigner_sign(s, mode)) * phi[static_cast<Eigen::Index>(c)];
  }
  return out / std::sqrt(table.mode(mode).weight);
}

ObservableReport observables(const GroundStateResult& result, const ModeTable& table, const FockBasis& basis,
                             bool with_gradients) {
  ObservableReport rep;
  const Vector& phi = result.state;
  if (static_cast<std::size_t>(phi.size()) != basis.size())
    throw std::invalid_argument("observables: state length differs from basis size");
  rep.species_numbers.assign(table.species_count(), 0.0);
  std::vector<double> occupation(table.mode_count(), 0.0);
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const double prob = std::norm(phi[static_cast<Eigen::Index>(c)]);
    if (prob == 0.0) continue;
    Occupation s = basis.state(c);
    while (s) {
      const auto m = static_cast<std::size_t>(std::countr_zero(s));
      occupation[m] += prob;
      s &= s - 1;
    }
  }
  for (std::size_t m = 0; m < table.mode_count(); ++m) {
    rep.species_numbers[table.species_of(m)] += occupation[m];
    rep.mode_amplitudes.push_back(std::sqrt(occupation[m] / table.mode(m).weight));
  }
  for (double n : rep.species_numbers) rep.total_number += n;
  if (!with_gradients) return rep;
  bool any_chain = false;
  for (std::size_t i = 0; i < table.species_count(); ++i) {
    const auto& chains = table.chains(i);
    any_chain = any_chain || !chains.empty();
    for (std::size_t ch = 0; ch < chains.size(); ++ch) {
      const auto& chain = chains[ch];
      for (std::size_t a = 0; a < table.spin_count(i); ++a) {
        for (std::size_t j = 0; j + 1 < chain.points.size(); ++j) {
          const std::size_t m0 = table.global_index(i, chain.points[j], a);
          const std::size_t m1 = table.global_index(i, chain.points[j + 1], a);
          Vector diff = mode_wavefunction(phi, table, basis, m1) - mode_wavefunction(phi, table, basis, m0);
          ChainGradient g{i, ch, a, j, {}, diff.norm() / chain.spacing};
          for (int x = 0; x < 3; ++x) g.midpoint[x] = 0.5 * (table.mode(m0).momentum[x] + table.mode(m1).momentum[x]);
          rep.gradients.push_back(g);
        }
      }
    }
  }
  if (!any_chain) throw std::invalid_argument("observables: gradients requested but no chains declared");
  return rep;
}

Model rebuild_with_mass(const Model& model, std::size_t species, double mass) {
  Model m{model.table.with_mass(species, mass), model.basis, {}};
  m.bundle = with_free_part(model.bundle, m.table, m.basis);
  return m;
}

MassCurve mass_sweep(const Model& model, std::size_t species, std::span<const double> masses,
                     const SolverSettings& settings, double slack) {
  if (masses.empty()) throw std::invalid_argument("mass_sweep: empty mass grid");
  for (std::size_t j = 0; j < masses.size(); ++j) {
    if (!(masses[j] > 0.0)) throw std::invalid_argument("mass_sweep: masses must be positive");
    if (j > 0 && !(masses[j] < masses[j - 1]))
      throw std::invalid_argument("mass_sweep: masses must be strictly decreasing");
  }
  MassCurve curve;
  curve.species = species;
  curve.masses.assign(masses.begin(), masses.end());
  const Model zero = rebuild_with_mass(model, species, 0.0);
  curve.zero_mass_state = ground_state(zero.bundle.total, settings);
  curve.zero_mass_energy = curve.zero_mass_state.energy;
  for (double m : masses) {
    const Model at = rebuild_with_mass(model, species, m);
    GroundStateResult gs = ground_state(at.bundle.total, settings);
    curve.energies.push_back(gs.energy);
    curve.cross_energies.push_back(gs.state.dot(zero.bundle.total.apply(gs.state)).real());
    curve.total_numbers.push_back(observables(gs, at.table, at.basis).total_number);
    curve.degeneracies.push_back(gs.degeneracy);
    curve.states.push_back(std::move(gs));
  }
  for (std::size_t j = 0; j + 1 < curve.states.size(); ++j)
    curve.overlaps.push_back(std::abs(curve.states[j].state.dot(curve.states[j + 1].state)));
  for (std::size_t j = 0; j < masses.size(); ++j) {
    if (j > 0)
      curve.max_monotonicity_violation =
          std::max(curve.max_monotonicity_violation, curve.energies[j] - curve.energies[j - 1]);
    curve.max_sandwich_violation = std::max(
        {curve.max_sandwich_violation, curve.zero_mass_energy - curve.cross_energies[j],
         curve.cross_energies[j] - curve.energies[j]});
  }
  curve.monotone = curve.max_monotonicity_violation <= slack;
  curve.sandwich = curve.max_sandwich_violation <= slack;
  return curve;
}

}  // namespace fqft
