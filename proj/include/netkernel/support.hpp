#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "netkernel/instance.hpp"

namespace netkernel {

/// One spanning tree per commodity; arcs stored as indices into the
/// commodity arc list, kept in declaration order.
struct Support {
  std::vector<std::vector<int>> tree; // index k-1

  const std::vector<int>& of(CommodityId k) const { return tree[k - 1]; }

  bool contains(CommodityId k, int arc_idx) const {
    const auto& t = tree[k - 1];
    return std::binary_search(t.begin(), t.end(), arc_idx);
  }

  template <class S>
  std::vector<ArcRef> arcs(const Instance<S>& inst, CommodityId k) const {
    std::vector<ArcRef> out;
    for (int idx : tree[k - 1]) out.push_back(inst.net(k).ref(idx));
    return out;
  }
};

struct SupportCheck {
  bool ok = true;
  std::string diagnostics;
};

namespace detail {

// node -> (neighbor, arc index) in arc declaration order
template <class S>
std::map<NodeId, std::vector<std::pair<NodeId, int>>> undirected_adjacency(
    const CommodityNetwork<S>& net, const std::vector<int>& arc_subset) {
  std::map<NodeId, std::vector<std::pair<NodeId, int>>> adj;
  for (int idx : arc_subset) {
    const Arc& a = net.arcs[idx];
    adj[a.from].push_back({a.to, idx});
    adj[a.to].push_back({a.from, idx});
  }
  return adj;
}

template <class S>
std::vector<int> all_arc_indices(const CommodityNetwork<S>& net) {
  std::vector<int> idx(net.arcs.size());
  for (int i = 0; i < int(idx.size()); ++i) idx[i] = i;
  return idx;
}

} // namespace detail

/// Deterministic spanning tree per commodity: depth-first traversal from the
/// smallest node id, visiting neighbors in arc declaration order.
template <class S>
Support build_support(const Instance<S>& inst) {
  Support sup;
  for (const auto& net : inst.commodities) {
    auto adj = detail::undirected_adjacency(net, detail::all_arc_indices(net));
    std::set<NodeId> visited;
    std::vector<int> tree;

    // iterative DFS keeping per-node neighbor cursor
    std::vector<std::pair<NodeId, size_t>> stack{{net.nodes.front(), 0}};
    visited.insert(net.nodes.front());
    while (!stack.empty()) {
      auto& [node, cursor] = stack.back();
      const auto& nbrs = adj[node];
      if (cursor == nbrs.size()) {
        stack.pop_back();
        continue;
      }
      auto [next, arc_idx] = nbrs[cursor++];
      if (visited.insert(next).second) {
        tree.push_back(arc_idx);
        stack.push_back({next, 0});
      }
    }

    if (visited.size() != net.nodes.size())
      throw ParseError(0, "commodity " + std::to_string(net.id) + " network is not connected");
    std::sort(tree.begin(), tree.end());
    sup.tree.push_back(std::move(tree));
  }
  return sup;
}

/// True iff every per-commodity arc set is a spanning tree of its network:
/// |I^k|-1 arcs, acyclic, spanning.
template <class S>
SupportCheck verify_support(const Instance<S>& inst, const Support& sup) {
  if (int(sup.tree.size()) != inst.commodity_count())
    return {false, "support covers " + std::to_string(sup.tree.size()) + " commodities, expected " +
                       std::to_string(inst.commodity_count())};
  for (const auto& net : inst.commodities) {
    const auto& tree = sup.tree[net.id - 1];
    std::string where = "commodity " + std::to_string(net.id);
    for (int idx : tree)
      if (idx < 0 || idx >= int(net.arcs.size()))
        return {false, where + ": unknown arc reference"};
    if (std::set<int>(tree.begin(), tree.end()).size() != tree.size())
      return {false, where + ": repeated arc"};
    if (tree.size() != net.nodes.size() - 1)
      return {false, where + ": " + std::to_string(tree.size()) + " arcs, a spanning tree needs " +
                         std::to_string(net.nodes.size() - 1)};
    // connected with |I|-1 edges implies acyclic spanning
    auto adj = detail::undirected_adjacency(net, tree);
    std::set<NodeId> seen{net.nodes.front()};
    std::vector<NodeId> todo{net.nodes.front()};
    while (!todo.empty()) {
      NodeId i = todo.back();
      todo.pop_back();
      for (auto [j, idx] : adj[i]) {
        (void)idx;
        if (seen.insert(j).second) todo.push_back(j);
      }
    }
    if (seen.size() != net.nodes.size())
      return {false, where + ": arc set does not span (contains a cycle or misses nodes)"};
  }
  return {};
}

/// Support file: one line per commodity, `tree <k>: <i>:<j> <i>:<j> ...`.
template <class S>
Support load_support(const Instance<S>& inst, std::string_view text) {
  std::map<CommodityId, std::vector<int>> trees;
  std::istringstream stream{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    std::string line = detail::strip_line(raw);
    if (line.empty()) continue;
    auto toks = detail::split_ws(line);
    if (toks[0] != "tree" || toks.size() < 2 || toks[1].empty() || toks[1].back() != ':')
      throw ParseError(lineno, "usage: tree <k>: <i>:<j> ...");
    CommodityId k =
        detail::parse_id(toks[1].substr(0, toks[1].size() - 1), lineno, "commodity id");
    if (k > inst.commodity_count())
      throw ParseError(lineno, "unknown commodity " + std::to_string(k));
    if (trees.count(k))
      throw ParseError(lineno, "commodity " + std::to_string(k) + " listed twice");
    std::vector<int> tree;
    for (size_t t = 2; t < toks.size(); ++t) {
      auto colon = toks[t].find(':');
      if (colon == std::string::npos)
        throw ParseError(lineno, "expected <i>:<j>, got '" + toks[t] + "'");
      NodeId i = detail::parse_id(toks[t].substr(0, colon), lineno, "node id");
      NodeId j = detail::parse_id(toks[t].substr(colon + 1), lineno, "node id");
      auto idx = inst.net(k).arc_index(i, j);
      if (!idx)
        throw ParseError(lineno, "unknown arc reference " + to_string(ArcRef{k, i, j}));
      tree.push_back(*idx);
    }
    std::sort(tree.begin(), tree.end());
    trees[k] = std::move(tree);
  }

  Support sup;
  for (int k = 1; k <= inst.commodity_count(); ++k) {
    auto it = trees.find(k);
    if (it == trees.end())
      throw ParseError(0, "support file lists no tree for commodity " + std::to_string(k));
    sup.tree.push_back(std::move(it->second));
  }
  auto check = verify_support(inst, sup);
  if (!check.ok) throw ParseError(0, "support verification failed: " + check.diagnostics);
  return sup;
}

template <class S>
std::string serialize_support(const Instance<S>& inst, const Support& sup) {
  std::ostringstream os;
  for (int k = 1; k <= inst.commodity_count(); ++k) {
    os << "tree " << k << ":";
    for (int idx : sup.of(k)) {
      const Arc& a = inst.net(k).arcs[idx];
      os << ' ' << a.from << ':' << a.to;
    }
    os << "\n";
  }
  return os.str();
}

} // namespace netkernel
