#pragma once

#include <set>

#include "netkernel/instance.hpp"
#include "netkernel/rng.hpp"

namespace netkernel {

/// Parameters for random instance generation. Every generated instance is
/// consistent and solvable by construction: balances are the divergence of
/// a sampled flow, and the additional right-hand sides are that flow pushed
/// through the side and coupling rows.
struct GenConfig {
  int commodities = 3;
  int nodes = 6;
  int extra_arcs = 3; // non-tree arcs per commodity
  int side_rows = 2;  // q
  int coupled = 1;    // |U0|
  std::uint64_t seed = 1;
};

inline Instance<Rational> generate_instance(const GenConfig& cfg) {
  if (cfg.commodities < 1 || cfg.nodes < 2 || cfg.extra_arcs < 0 || cfg.side_rows < 0 ||
      cfg.coupled < 0)
    throw std::invalid_argument("infeasible parameter combination: counts must be positive");
  if (cfg.coupled > 0 && cfg.commodities < 2)
    throw std::invalid_argument("infeasible parameter combination: coupling needs >= 2 commodities");
  if (cfg.nodes - 1 + cfg.extra_arcs > cfg.nodes * (cfg.nodes - 1))
    throw std::invalid_argument("infeasible parameter combination: more arcs than ordered pairs");
  if (cfg.commodities * cfg.extra_arcs < cfg.side_rows + cfg.coupled)
    throw std::invalid_argument(
        "infeasible parameter combination: need at least q+|U0| non-tree arcs");

  Rng rng(cfg.seed);
  Instance<Rational> inst;

  // spanning tree per commodity, then coupled arcs, then random extras
  for (int k = 1; k <= cfg.commodities; ++k) {
    CommodityNetwork<Rational> net;
    net.id = k;
    for (int i = 1; i <= cfg.nodes; ++i) net.nodes.push_back(i);
    std::set<Arc> present;
    for (int v = 2; v <= cfg.nodes; ++v) {
      int u = int(rng.uniform(1, v - 1));
      Arc a = rng.uniform(0, 1) ? Arc{u, v} : Arc{v, u};
      net.arcs.push_back(a);
      present.insert(a);
    }
    inst.commodities.push_back(std::move(net));
  }

  auto has_arc = [&](int k, int i, int j) {
    const auto& arcs = inst.commodities[k - 1].arcs;
    return std::find(arcs.begin(), arcs.end(), Arc{i, j}) != arcs.end();
  };
  auto add_arc = [&](int k, int i, int j) { inst.commodities[k - 1].arcs.push_back({i, j}); };

  // coupled pairs: force the arc into every commodity of K0
  std::set<std::pair<int, int>> coupled_pairs;
  std::vector<std::pair<std::pair<int, int>, std::vector<int>>> couplings;
  std::vector<int> extra_used(cfg.commodities + 1, 0);
  for (int c = 0; c < cfg.coupled; ++c) {
    int i = 0, j = 0;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000)
        throw std::invalid_argument("infeasible parameter combination: no coupled pair available");
      i = int(rng.uniform(1, cfg.nodes));
      j = int(rng.uniform(1, cfg.nodes));
      if (i != j && !coupled_pairs.count({i, j})) break;
    }
    coupled_pairs.insert({i, j});
    int size = int(rng.uniform(2, cfg.commodities));
    std::vector<int> ks;
    for (int k = 1; k <= cfg.commodities; ++k) ks.push_back(k);
    for (int s = 0; s < size; ++s) std::swap(ks[s], ks[rng.uniform(s, cfg.commodities - 1)]);
    ks.resize(size);
    std::sort(ks.begin(), ks.end());
    for (int k : ks)
      if (!has_arc(k, i, j)) {
        add_arc(k, i, j);
        ++extra_used[k];
      }
    couplings.push_back({{i, j}, ks});
  }

  for (int k = 1; k <= cfg.commodities; ++k) {
    for (int e = extra_used[k]; e < cfg.extra_arcs; ++e) {
      for (int attempt = 0;; ++attempt) {
        if (attempt > 1000)
          throw std::invalid_argument("infeasible parameter combination: commodity " +
                                      std::to_string(k) + " cannot host more arcs");
        int i = int(rng.uniform(1, cfg.nodes));
        int j = int(rng.uniform(1, cfg.nodes));
        if (i != j && !has_arc(k, i, j)) {
          add_arc(k, i, j);
          break;
        }
      }
    }
    inst.commodities[k - 1].index_arcs();
  }

  // sample a flow; balances are its divergence, so consistency holds
  std::map<ArcRef, Rational> flow;
  for (auto& net : inst.commodities) {
    std::map<NodeId, Rational> div;
    for (const auto& a : net.arcs) {
      Rational f(rng.uniform(-9, 9));
      flow[{net.id, a.from, a.to}] = f;
      div[a.from] += f;
      div[a.to] -= f;
    }
    for (const auto& [i, d] : div)
      if (!d.is_zero()) net.balances[i] = d;
  }

  for (int p = 0; p < cfg.side_rows; ++p) {
    SideConstraint<Rational> row;
    for (const auto& net : inst.commodities)
      for (const auto& a : net.arcs) {
        Rational lam(rng.uniform(-9, 9));
        if (!lam.is_zero()) row.coeffs[{net.id, a.from, a.to}] = lam;
      }
    for (const auto& [arc, lam] : row.coeffs) row.rhs += lam * flow.at(arc);
    inst.side.push_back(std::move(row));
  }

  for (const auto& [pair, ks] : couplings) {
    CouplingConstraint<Rational> row;
    row.from = pair.first;
    row.to = pair.second;
    row.commodities = ks;
    for (int k : ks) row.rhs += flow.at({k, pair.first, pair.second});
    inst.coupling.push_back(std::move(row));
  }

  validate_instance(inst);
  return inst;
}

} // namespace netkernel
