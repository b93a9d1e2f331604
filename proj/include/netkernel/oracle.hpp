#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "netkernel/assemble.hpp"
#include "netkernel/rng.hpp"

namespace netkernel {

/// Explicit matrix of the whole system, block rows (M; Q; T), for
/// brute-force verification on desk-scale instances.
template <class S>
struct DenseSystem {
  DenseMat<S> matrix;
  DenseVec<S> rhs;
  std::vector<ArcRef> columns; // canonical order
  int network_rows = 0;        // rows of the M block

  int column_of(const ArcRef& arc) const {
    auto it = std::find(columns.begin(), columns.end(), arc);
    return int(it - columns.begin());
  }
};

inline constexpr int kDenseColumnCap = 2000;

template <class S>
DenseSystem<S> assemble_dense(const Instance<S>& inst) {
  if (inst.total_arcs() > kDenseColumnCap)
    throw std::length_error("dense oracle refuses instances above " +
                            std::to_string(kDenseColumnCap) + " columns");

  DenseSystem<S> sys;
  sys.columns = inst.columns();
  const int cols = int(sys.columns.size());
  const int rows = inst.total_nodes() + int(inst.side.size()) + int(inst.coupling.size());
  sys.network_rows = inst.total_nodes();
  sys.matrix = DenseMat<S>::Constant(rows, cols, S(0));
  sys.rhs = DenseVec<S>::Constant(rows, S(0));

  std::map<ArcRef, int> col_of;
  for (int j = 0; j < cols; ++j) col_of[sys.columns[j]] = j;

  int r = 0;
  for (const auto& net : inst.commodities) {
    std::map<NodeId, int> row_of;
    for (NodeId i : net.nodes) {
      row_of[i] = r;
      sys.rhs(r) = net.balance(i);
      ++r;
    }
    for (const auto& a : net.arcs) {
      int j = col_of.at(ArcRef{net.id, a.from, a.to});
      sys.matrix(row_of.at(a.from), j) = S(1);
      sys.matrix(row_of.at(a.to), j) = S(-1);
    }
  }
  for (const auto& row : inst.side) {
    for (const auto& [arc, lam] : row.coeffs) sys.matrix(r, col_of.at(arc)) = lam;
    sys.rhs(r) = row.rhs;
    ++r;
  }
  for (const auto& row : inst.coupling) {
    for (CommodityId k : row.commodities)
      sys.matrix(r, col_of.at(ArcRef{k, row.from, row.to})) = S(1);
    sys.rhs(r) = row.rhs;
    ++r;
  }
  return sys;
}

/// Rank by fraction-free (Bareiss) elimination for exact scalars, or by
/// threshold-pivoted ordinary elimination for floats. Deliberately a
/// separate code path from the decomposer's Gauss-Jordan.
template <class S>
int bareiss_rank(DenseMat<S> m) {
  using std::abs;
  const int rows = int(m.rows()), cols = int(m.cols());

  S tol(0);
  if constexpr (!scalar_traits<S>::exact) {
    for (int j = 0; j < cols; ++j) tol = std::max<S>(tol, m.col(j).template lpNorm<Eigen::Infinity>());
    tol *= 1e-12;
  }

  int rank = 0;
  S prev(1);
  for (int c = 0; c < cols && rank < rows; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (pivot < 0 || abs(m(r, c)) > abs(m(pivot, c))) pivot = r;
    if (pivot < 0 || !(abs(m(pivot, c)) > tol)) continue;
    if (pivot != rank) m.row(pivot).swap(m.row(rank));
    for (int r = rank + 1; r < rows; ++r) {
      for (int j = c + 1; j < cols; ++j) {
        if constexpr (scalar_traits<S>::exact)
          m(r, j) = (m(r, j) * m(rank, c) - m(r, c) * m(rank, j)) / prev;
        else
          m(r, j) -= (m(r, c) / m(rank, c)) * m(rank, j);
      }
      m(r, c) = S(0);
    }
    prev = m(rank, c);
    ++rank;
  }
  return rank;
}

enum class RankPart { network, full };

template <class S>
int dense_rank(const DenseSystem<S>& sys, RankPart part) {
  if (part == RankPart::network)
    return bareiss_rank<S>(sys.matrix.topRows(sys.network_rows));
  return bareiss_rank<S>(sys.matrix);
}

template <class S>
int nullspace_dimension(const DenseSystem<S>& sys) {
  return int(sys.matrix.cols()) - dense_rank(sys, RankPart::full);
}

struct OracleReport {
  bool pass = true;
  int trials_run = 0;
  std::vector<std::string> failures;

  void fail(std::string what) {
    pass = false;
    failures.push_back(std::move(what));
  }
};

/// Random exact assignment for the free variables: small numerators and
/// denominators keep 64-bit rationals comfortably in range.
template <class S>
std::map<ArcRef, S> random_assignment(const std::vector<ArcRef>& free_arcs, Rng& rng) {
  std::map<ArcRef, S> a;
  for (const auto& f : free_arcs) {
    long long num = rng.uniform(-20, 20);
    long long den = rng.uniform(1, 6);
    if constexpr (scalar_traits<S>::exact)
      a[f] = S(Rational(num, den));
    else
      a[f] = S(double(num) / double(den));
  }
  return a;
}

/// Brute-force validation of a parametric solution: substitutes `trials`
/// random assignments into A x = b on the dense matrix, checks the
/// nullspace dimension against the free count, and checks that the
/// characteristic vectors of a support lie in the kernel of M.
template <class S>
OracleReport oracle_check(const Instance<S>& inst, const ParametricSolution<S>& sol, int trials,
                          std::uint64_t seed = 20240901, const Support* sup = nullptr,
                          double eps = 1e-9) {
  using std::abs;
  OracleReport rep;
  auto sys = assemble_dense(inst);

  int dim = nullspace_dimension(sys);
  if (dim != int(sol.free_arcs.size()))
    rep.fail("nullspace dimension " + std::to_string(dim) + " != free count " +
             std::to_string(sol.free_arcs.size()));

  Support built;
  if (!sup) {
    built = build_support(inst);
    sup = &built;
  }
  for (const auto& net : inst.commodities) {
    for (const auto& v : basis(inst, net.id, *sup)) {
      DenseVec<S> x = DenseVec<S>::Constant(sys.columns.size(), S(0));
      for (const auto& [arc, comp] : v.components) x(sys.column_of(arc)) = S(comp);
      DenseVec<S> prod = sys.matrix.topRows(sys.network_rows) * x;
      for (int r = 0; r < prod.size(); ++r)
        if (!scalar_traits<S>::is_zero(prod(r), eps)) {
          rep.fail("characteristic vector of " + to_string(v.entailing) +
                   " is outside the kernel of M (row " + std::to_string(r) + ")");
          break;
        }
    }
  }

  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    auto assignment = random_assignment<S>(sol.free_arcs, rng);
    auto flow = evaluate(sol, assignment);
    DenseVec<S> x(sys.columns.size());
    for (int j = 0; j < int(sys.columns.size()); ++j) x(j) = flow.at(sys.columns[j]);
    DenseVec<S> res = sys.matrix * x - sys.rhs;
    for (int r = 0; r < res.size(); ++r) {
      if (scalar_traits<S>::is_zero(res(r), eps)) continue;
      rep.fail("trial " + std::to_string(t) + ": equation " + std::to_string(r) +
               " has residual " + scalar_traits<S>::str(res(r)));
      break;
    }
    ++rep.trials_run;
  }
  return rep;
}

} // namespace netkernel
