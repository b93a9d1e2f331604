#pragma once

#include <map>
#include <string>
#include <vector>

#include "netkernel/support.hpp"

namespace netkernel {

/// The unique cycle created by adding a non-tree arc to its spanning tree.
/// Members are listed in detour order starting with the entailing arc; the
/// sign is +1 for arcs pointing along the detour direction, -1 against it.
struct FundamentalCycle {
  CommodityId k = 0;
  ArcRef entailing;
  std::vector<std::pair<ArcRef, int>> members; // begins with (entailing, +1)

  int sign_of(const ArcRef& arc) const {
    for (const auto& [a, s] : members)
      if (a == arc) return s;
    return 0;
  }
};

/// Sparse +-1/0 kernel vector of one commodity's incidence block, supported
/// on the fundamental cycle of its entailing arc.
struct CharacteristicVector {
  ArcRef entailing;
  std::map<ArcRef, int> components; // zeros omitted

  int at(const ArcRef& arc) const {
    auto it = components.find(arc);
    return it == components.end() ? 0 : it->second;
  }
};

namespace detail {

template <class S>
struct RootedTree {
  std::map<NodeId, NodeId> parent;
  std::map<NodeId, int> parent_arc; // arc index joining node to its parent
  std::map<NodeId, int> depth;

  RootedTree(const CommodityNetwork<S>& net, const std::vector<int>& tree) {
    auto adj = undirected_adjacency(net, tree);
    NodeId root = net.nodes.front();
    depth[root] = 0;
    std::vector<NodeId> todo{root};
    while (!todo.empty()) {
      NodeId i = todo.back();
      todo.pop_back();
      for (auto [j, arc_idx] : adj[i]) {
        if (depth.count(j)) continue;
        parent[j] = i;
        parent_arc[j] = arc_idx;
        depth[j] = depth[i] + 1;
        todo.push_back(j);
      }
    }
  }
};

} // namespace detail

/// Cycle of tree + entailing, signs relative to the entailing arc's direction.
template <class S>
FundamentalCycle fundamental_cycle(const CommodityNetwork<S>& net, const std::vector<int>& tree,
                                   const ArcRef& entailing) {
  auto idx = net.arc_index(entailing.from, entailing.to);
  if (!idx) throw std::invalid_argument("entailing arc " + to_string(entailing) + " not declared");
  if (std::binary_search(tree.begin(), tree.end(), *idx))
    throw std::invalid_argument("entailing arc " + to_string(entailing) + " is a tree arc");

  detail::RootedTree<S> rt(net, tree);
  NodeId tau = entailing.from, rho = entailing.to;

  // Tree path rho -> tau split at the lowest common ancestor. up: nodes
  // climbing from rho; down: nodes climbing from tau (reversed later).
  std::vector<NodeId> up{rho}, down{tau};
  NodeId a = rho, b = tau;
  while (rt.depth.at(a) > rt.depth.at(b)) up.push_back(a = rt.parent.at(a));
  while (rt.depth.at(b) > rt.depth.at(a)) down.push_back(b = rt.parent.at(b));
  while (a != b) {
    up.push_back(a = rt.parent.at(a));
    down.push_back(b = rt.parent.at(b));
  }

  FundamentalCycle cyc;
  cyc.k = net.id;
  cyc.entailing = entailing;
  cyc.members.push_back({entailing, +1});
  // climb rho -> lca: detour runs child to parent
  for (size_t s = 0; s + 1 < up.size(); ++s) {
    const Arc& arc = net.arcs[rt.parent_arc.at(up[s])];
    cyc.members.push_back({ArcRef{net.id, arc.from, arc.to}, arc.from == up[s] ? +1 : -1});
  }
  // descend lca -> tau: detour runs parent to child
  for (size_t s = down.size() - 1; s-- > 0;) {
    const Arc& arc = net.arcs[rt.parent_arc.at(down[s])];
    cyc.members.push_back({ArcRef{net.id, arc.from, arc.to}, arc.to == down[s] ? +1 : -1});
  }
  return cyc;
}

inline CharacteristicVector characteristic_vector(const FundamentalCycle& cycle) {
  CharacteristicVector v;
  v.entailing = cycle.entailing;
  for (const auto& [arc, sign] : cycle.members) v.components[arc] = sign;
  return v;
}

/// Evaluates the homogeneous balance equations at every node of the
/// commodity; characteristic vectors must vanish there (component math is
/// integral, so the check is exact in both modes). Components referencing
/// arcs outside the commodity fail outright.
template <class S>
bool verify_homogeneous(const CommodityNetwork<S>& net, const CharacteristicVector& v) {
  std::map<NodeId, long long> node_sum;
  for (const auto& [arc, comp] : v.components) {
    if (arc.k != net.id || !net.arc_index(arc.from, arc.to)) return false;
    node_sum[arc.from] += comp;
    node_sum[arc.to] -= comp;
  }
  for (const auto& [node, sum] : node_sum) {
    (void)node;
    if (sum != 0) return false;
  }
  return true;
}

/// Flow values over one commodity's arcs; zero on every non-tree arc.
template <class S>
struct PartialSolution {
  CommodityId k = 0;
  std::vector<S> values; // aligned with the commodity arc list

  template <class Inst>
  S at(const Inst& inst, const ArcRef& arc) const {
    return values[*inst.net(k).arc_index(arc.from, arc.to)];
  }
};

/// Unique solution of the balance equations with all non-tree variables set
/// to zero, by iterative leaf elimination: a leaf node's single remaining
/// tree arc is forced by its balance equation.
template <class S>
PartialSolution<S> tree_partial_solution(const CommodityNetwork<S>& net,
                                         const std::vector<int>& tree, double eps = 1e-9) {
  PartialSolution<S> sol;
  sol.k = net.id;
  sol.values.assign(net.arcs.size(), S(0));

  auto adj = detail::undirected_adjacency(net, tree);
  std::map<NodeId, S> residual;
  std::map<NodeId, int> degree;
  for (NodeId i : net.nodes) {
    residual[i] = net.balance(i);
    degree[i] = int(adj[i].size());
  }

  std::vector<bool> fixed(net.arcs.size(), false);
  std::vector<NodeId> leaves;
  for (NodeId i : net.nodes)
    if (degree[i] == 1) leaves.push_back(i);

  size_t eliminated = 0;
  while (!leaves.empty()) {
    NodeId i = leaves.back();
    leaves.pop_back();
    if (degree[i] != 1) continue; // stale entry
    int arc_idx = -1;
    for (auto [j, idx] : adj[i]) {
      (void)j;
      if (!fixed[idx]) {
        arc_idx = idx;
        break;
      }
    }
    const Arc& arc = net.arcs[arc_idx];
    S x = arc.from == i ? residual[i] : -residual[i];
    sol.values[arc_idx] = x;
    fixed[arc_idx] = true;
    ++eliminated;

    residual[arc.from] -= x;
    residual[arc.to] += x;
    NodeId other = arc.from == i ? arc.to : arc.from;
    degree[i] = 0;
    if (--degree[other] == 1) leaves.push_back(other);
  }

  if (eliminated != tree.size())
    throw std::logic_error("leaf elimination did not consume the whole tree");
  for (const auto& [i, r] : residual)
    if (!scalar_traits<S>::is_zero(r, eps))
      throw BalanceError("balances of commodity " + std::to_string(net.id) +
                         " are inconsistent (residual " + scalar_traits<S>::str(r) + " at node " +
                         std::to_string(i) + ")");
  return sol;
}

/// Basis of the homogeneous solution space for one commodity: one
/// characteristic vector per non-tree arc, in declaration order.
template <class S>
std::vector<CharacteristicVector> basis(const Instance<S>& inst, CommodityId k,
                                        const Support& sup) {
  const auto& net = inst.net(k);
  const auto& tree = sup.of(k);
  std::vector<CharacteristicVector> out;
  for (int idx = 0; idx < int(net.arcs.size()); ++idx) {
    if (std::binary_search(tree.begin(), tree.end(), idx)) continue;
    out.push_back(characteristic_vector(fundamental_cycle(net, tree, net.ref(idx))));
  }
  return out;
}

/// Fundamental cycles for every non-tree arc of every commodity, in
/// canonical order (commodity ascending, then declaration order).
struct CycleSet {
  std::vector<FundamentalCycle> cycles;
  std::map<ArcRef, int> index;

  const FundamentalCycle& of(const ArcRef& arc) const { return cycles[index.at(arc)]; }
};

template <class S>
CycleSet build_cycles(const Instance<S>& inst, const Support& sup) {
  CycleSet set;
  for (const auto& net : inst.commodities) {
    const auto& tree = sup.of(net.id);
    for (int idx = 0; idx < int(net.arcs.size()); ++idx) {
      if (std::binary_search(tree.begin(), tree.end(), idx)) continue;
      ArcRef arc = net.ref(idx);
      set.index[arc] = int(set.cycles.size());
      set.cycles.push_back(fundamental_cycle(net, tree, arc));
    }
  }
  return set;
}

} // namespace netkernel
