#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "netkernel/affine.hpp"
#include "netkernel/cycles.hpp"

namespace netkernel {

/// Non-tree arcs split into cyclic arcs U_C (solved through D x_C = beta)
/// and free arcs U_N (the solution parameters).
struct ArcPartition {
  Support support;
  std::vector<ArcRef> cyclic;    // t-order
  std::vector<ArcRef> free_arcs; // canonical order
};

/// The small dense system D x_C = beta with D stacked as (side rows;
/// coupling rows) and beta affine in the free-arc variables.
template <class S>
struct SmallSystem {
  int side_rows = 0;     // q
  int coupling_rows = 0; // |U0|
  DenseMat<S> D;
  DenseMat<S> D_inv; // (nu_{l,s})
  std::vector<AffineForm<S>> beta;

  int size() const { return side_rows + coupling_rows; }
};

template <class S>
struct Decomposition {
  ArcPartition partition;
  SmallSystem<S> system;
};

/// Determinant of a cycle with respect to one side-constraint row:
/// signed sum of the row's coefficients around the cycle.
template <class S>
S cycle_determinant(const FundamentalCycle& cycle, const SideConstraint<S>& row) {
  S sum(0);
  for (const auto& [arc, sign] : cycle.members) {
    auto it = row.coeffs.find(arc);
    if (it == row.coeffs.end()) continue;
    sum += sign > 0 ? it->second : -it->second;
  }
  return sum;
}

/// Sign of the coupled arc within the cycle, or zero when the cycle's
/// commodity is not coupled (or the arc is off-cycle).
template <class S>
S coupling_delta(const FundamentalCycle& cycle, const CouplingConstraint<S>& row) {
  if (!std::binary_search(row.commodities.begin(), row.commodities.end(), cycle.k)) return S(0);
  return S(cycle.sign_of(ArcRef{cycle.k, row.from, row.to}));
}

/// Constant parts of the reduced additional equations, obtained by moving
/// the tree partial solutions to the right-hand side.
template <class S>
struct RhsConstants {
  std::vector<S> side;     // A^p
  std::vector<S> coupling; // A_ij
};

template <class S>
RhsConstants<S> rhs_constants(const Instance<S>& inst, const Support& sup,
                              const std::vector<PartialSolution<S>>& partials) {
  RhsConstants<S> out;
  for (const auto& row : inst.side) {
    S a = row.rhs;
    for (const auto& [arc, lam] : row.coeffs) {
      auto idx = inst.net(arc.k).arc_index(arc.from, arc.to);
      if (sup.contains(arc.k, *idx)) a -= lam * partials[arc.k - 1].values[*idx];
    }
    out.side.push_back(a);
  }
  for (const auto& row : inst.coupling) {
    S a = row.rhs;
    for (CommodityId k : row.commodities) {
      auto idx = inst.net(k).arc_index(row.from, row.to);
      if (sup.contains(k, *idx)) a -= partials[k - 1].values[*idx];
    }
    out.coupling.push_back(a);
  }
  return out;
}

/// Column of the reduced additional part for one non-tree arc's cycle:
/// the q cycle determinants stacked over the |U0| coupling deltas.
template <class S>
DenseVec<S> additional_column(const Instance<S>& inst, const FundamentalCycle& cycle) {
  DenseVec<S> col(inst.side.size() + inst.coupling.size());
  int r = 0;
  for (const auto& row : inst.side) col(r++) = cycle_determinant(cycle, row);
  for (const auto& row : inst.coupling) col(r++) = coupling_delta(cycle, row);
  return col;
}

/// Gauss-Jordan inversion with partial pivoting. Returns nullopt when a
/// pivot falls at (rational) or below (float) the singularity threshold.
template <class S>
std::optional<DenseMat<S>> gauss_jordan_inverse(DenseMat<S> a) {
  using std::abs;
  const int n = int(a.rows());
  S tol(0);
  if constexpr (!scalar_traits<S>::exact) {
    for (int j = 0; j < n; ++j) tol = std::max<S>(tol, a.col(j).template lpNorm<Eigen::Infinity>());
    tol *= 1e-12;
  }

  DenseMat<S> inv = DenseMat<S>::Identity(n, n);
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r)
      if (abs(a(r, c)) > abs(a(pivot, c))) pivot = r;
    if (!(abs(a(pivot, c)) > tol)) return std::nullopt;
    if (pivot != c) {
      a.row(pivot).swap(a.row(c));
      inv.row(pivot).swap(inv.row(c));
    }
    S d = a(c, c);
    a.row(c) /= d;
    inv.row(c) /= d;
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      S f = a(r, c);
      if (f == S(0)) continue;
      a.row(r) -= f * a.row(c);
      inv.row(r) -= f * inv.row(c);
    }
  }
  return inv;
}

namespace detail {

template <class S>
std::vector<ArcRef> non_tree_arcs(const Instance<S>& inst, const Support& sup) {
  std::vector<ArcRef> out;
  for (const auto& net : inst.commodities)
    for (int idx = 0; idx < int(net.arcs.size()); ++idx)
      if (!sup.contains(net.id, idx)) out.push_back(net.ref(idx));
  return out;
}

template <class S>
SmallSystem<S> build_small_system(const Instance<S>& inst, const CycleSet& cycles,
                                  const std::vector<ArcRef>& cyclic) {
  SmallSystem<S> sys;
  sys.side_rows = int(inst.side.size());
  sys.coupling_rows = int(inst.coupling.size());
  sys.D.resize(sys.size(), sys.size());
  for (int t = 0; t < int(cyclic.size()); ++t)
    sys.D.col(t) = additional_column(inst, cycles.of(cyclic[t]));
  return sys;
}

} // namespace detail

/// Partitions the non-tree arcs so that the cyclic columns form a
/// nonsingular D: one rank-revealing elimination pass over all candidate
/// columns in canonical order, partial pivoting inside each column. The
/// first q+|U0| pivot columns become U_C; everything else is free.
template <class S>
Decomposition<S> select_cyclic(const Instance<S>& inst, const Support& sup,
                               const CycleSet& cycles) {
  using std::abs;
  const int m = int(inst.side.size() + inst.coupling.size());
  auto candidates = detail::non_tree_arcs(inst, sup);
  if (m > int(candidates.size()))
    throw RankError("additional part has " + std::to_string(m) + " rows but only " +
                    std::to_string(candidates.size()) + " non-tree arcs");

  DenseMat<S> work(m, candidates.size());
  for (int j = 0; j < int(candidates.size()); ++j)
    work.col(j) = additional_column(inst, cycles.of(candidates[j]));

  S tol(0);
  if constexpr (!scalar_traits<S>::exact) {
    for (int j = 0; j < int(work.cols()); ++j)
      tol = std::max<S>(tol, work.col(j).template lpNorm<Eigen::Infinity>());
    tol *= 1e-12;
  }

  ArcPartition part;
  part.support = sup;
  std::vector<bool> row_used(m, false);
  for (int j = 0; j < int(candidates.size()); ++j) {
    int pivot = -1;
    if (int(part.cyclic.size()) < m) {
      for (int r = 0; r < m; ++r)
        if (!row_used[r] && (pivot < 0 || abs(work(r, j)) > abs(work(pivot, j)))) pivot = r;
      if (pivot >= 0 && !(abs(work(pivot, j)) > tol)) pivot = -1;
    }
    if (pivot < 0) {
      part.free_arcs.push_back(candidates[j]);
      continue;
    }
    part.cyclic.push_back(candidates[j]);
    row_used[pivot] = true;
    for (int r = 0; r < m; ++r) {
      if (row_used[r] || work(r, j) == S(0)) continue;
      work.row(r) -= (work(r, j) / work(pivot, j)) * work.row(pivot);
    }
  }

  if (int(part.cyclic.size()) < m)
    throw RankError("additional part is rank deficient over the homogeneous solution space: rank " +
                    std::to_string(part.cyclic.size()) + " of " + std::to_string(m));

  Decomposition<S> dec;
  dec.system = detail::build_small_system(inst, cycles, part.cyclic);
  auto inv = gauss_jordan_inverse<S>(dec.system.D);
  if (!inv) throw RankError("selected cyclic columns produced a singular D");
  dec.system.D_inv = std::move(*inv);
  dec.partition = std::move(part);
  return dec;
}

/// Same decomposition but with the cyclic arcs pinned by the caller
/// (t-order = given order). A singular D is an error here, not a retry.
template <class S>
Decomposition<S> pinned_cyclic(const Instance<S>& inst, const Support& sup, const CycleSet& cycles,
                               const std::vector<ArcRef>& pinned) {
  const int m = int(inst.side.size() + inst.coupling.size());
  if (int(pinned.size()) != m)
    throw ParseError(0, "cyclic file lists " + std::to_string(pinned.size()) + " arcs, expected " +
                            std::to_string(m));
  for (const auto& arc : pinned) {
    if (arc.k < 1 || arc.k > inst.commodity_count())
      throw ParseError(0, "unknown commodity in cyclic arc " + to_string(arc));
    auto idx = inst.net(arc.k).arc_index(arc.from, arc.to);
    if (!idx) throw ParseError(0, "unknown cyclic arc " + to_string(arc));
    if (sup.contains(arc.k, *idx))
      throw ParseError(0, "cyclic arc " + to_string(arc) + " is a tree arc");
  }
  if (std::set<ArcRef>(pinned.begin(), pinned.end()).size() != pinned.size())
    throw ParseError(0, "cyclic file repeats an arc");

  Decomposition<S> dec;
  dec.partition.support = sup;
  dec.partition.cyclic = pinned;
  for (const auto& arc : detail::non_tree_arcs(inst, sup))
    if (std::find(pinned.begin(), pinned.end(), arc) == pinned.end())
      dec.partition.free_arcs.push_back(arc);

  dec.system = detail::build_small_system<S>(inst, cycles, pinned);
  auto inv = gauss_jordan_inverse<S>(dec.system.D);
  if (!inv)
    throw SingularError("pinned cyclic arcs produce a singular D; re-select the cyclic set");
  dec.system.D_inv = std::move(*inv);
  return dec;
}

/// Right-hand side of D x_C = beta: the A constants minus the free-arc
/// contributions, one affine form per row.
template <class S>
std::vector<AffineForm<S>> assemble_beta(const Instance<S>& inst, const ArcPartition& part,
                                         const CycleSet& cycles, const RhsConstants<S>& constants) {
  std::vector<AffineForm<S>> beta;
  for (size_t p = 0; p < inst.side.size(); ++p) {
    AffineForm<S> b(constants.side[p]);
    for (const auto& f : part.free_arcs)
      b.add_term(f, -cycle_determinant(cycles.of(f), inst.side[p]));
    beta.push_back(std::move(b));
  }
  for (size_t x = 0; x < inst.coupling.size(); ++x) {
    AffineForm<S> b(constants.coupling[x]);
    for (const auto& f : part.free_arcs)
      b.add_term(f, -coupling_delta(cycles.of(f), inst.coupling[x]));
    beta.push_back(std::move(b));
  }
  return beta;
}

/// x_C = D^{-1} beta, applied row by row over affine forms.
template <class S>
std::vector<AffineForm<S>> solve_cyclic(const SmallSystem<S>& sys) {
  std::vector<AffineForm<S>> x;
  for (int t = 0; t < sys.size(); ++t) {
    AffineForm<S> form;
    for (int s = 0; s < sys.size(); ++s) form += sys.beta[s] * sys.D_inv(t, s);
    x.push_back(std::move(form));
  }
  return x;
}

} // namespace netkernel
