#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "netkernel/errors.hpp"
#include "netkernel/scalar.hpp"

namespace netkernel {

using NodeId = int;      // node labels, >= 1
using CommodityId = int; // dense 1..|K|

/// One arc of one commodity: (i,j)^k.
struct ArcRef {
  CommodityId k;
  NodeId from;
  NodeId to;

  friend auto operator<=>(const ArcRef&, const ArcRef&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const ArcRef& a) {
  return os << a.k << ':' << a.from << ':' << a.to;
}

inline std::string to_string(const ArcRef& a) {
  std::ostringstream os;
  os << a;
  return os.str();
}

/// Arc within a fixed commodity.
struct Arc {
  NodeId from;
  NodeId to;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Connected network S^k = (I^k, U^k) with node balances a_i^k.
template <class S>
struct CommodityNetwork {
  CommodityId id = 0;
  std::vector<NodeId> nodes;        // I^k, ascending
  std::vector<Arc> arcs;            // U^k, declaration order = column order
  std::map<NodeId, S> balances;     // omitted nodes mean 0

  std::optional<int> arc_index(NodeId from, NodeId to) const {
    auto it = arc_pos_.find({from, to});
    if (it == arc_pos_.end()) return std::nullopt;
    return it->second;
  }

  bool has_node(NodeId i) const {
    return std::binary_search(nodes.begin(), nodes.end(), i);
  }

  S balance(NodeId i) const {
    auto it = balances.find(i);
    return it == balances.end() ? S(0) : it->second;
  }

  ArcRef ref(int arc_idx) const {
    return ArcRef{id, arcs[arc_idx].from, arcs[arc_idx].to};
  }

  // called once the arc list is final
  void index_arcs() {
    arc_pos_.clear();
    for (int i = 0; i < int(arcs.size()); ++i)
      arc_pos_[{arcs[i].from, arcs[i].to}] = i;
  }

private:
  std::map<std::pair<NodeId, NodeId>, int> arc_pos_;
};

/// One row of the side-constraint block: sum of lambda * x = alpha.
template <class S>
struct SideConstraint {
  std::map<ArcRef, S> coeffs; // lambda_ij^{kp}, zero entries omitted
  S rhs = S(0);               // alpha_p
};

/// One coupling row: sum over K0(i,j) of x_ij^k = z_ij.
template <class S>
struct CouplingConstraint {
  NodeId from = 0;
  NodeId to = 0;
  std::vector<CommodityId> commodities; // K0(i,j), ascending, size > 1
  S rhs = S(0);                         // z_ij
};

/// A full problem instance: per-commodity networks plus the additional part.
template <class S>
struct Instance {
  std::vector<CommodityNetwork<S>> commodities; // index k-1
  std::vector<SideConstraint<S>> side;          // q rows
  std::vector<CouplingConstraint<S>> coupling;  // |U0| rows

  const CommodityNetwork<S>& net(CommodityId k) const { return commodities[k - 1]; }
  int commodity_count() const { return int(commodities.size()); }

  int total_nodes() const {
    int n = 0;
    for (const auto& c : commodities) n += int(c.nodes.size());
    return n;
  }

  int total_arcs() const {
    int n = 0;
    for (const auto& c : commodities) n += int(c.arcs.size());
    return n;
  }

  /// All arcs in canonical order: commodity ascending, then declaration order.
  std::vector<ArcRef> columns() const {
    std::vector<ArcRef> cols;
    cols.reserve(total_arcs());
    for (const auto& c : commodities)
      for (const auto& a : c.arcs) cols.push_back({c.id, a.from, a.to});
    return cols;
  }

  /// K(i): commodities whose node set contains i.
  std::vector<CommodityId> commodities_at_node(NodeId i) const {
    std::vector<CommodityId> ks;
    for (const auto& c : commodities)
      if (c.has_node(i)) ks.push_back(c.id);
    return ks;
  }

  /// K(i,j): commodities declaring the arc (i,j).
  std::vector<CommodityId> commodities_on_arc(NodeId i, NodeId j) const {
    std::vector<CommodityId> ks;
    for (const auto& c : commodities)
      if (c.arc_index(i, j)) ks.push_back(c.id);
    return ks;
  }
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline int parse_id(const std::string& tok, int line, const char* what) {
  try {
    size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size() || v < 1) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("bad ") + what + " '" + tok + "'");
  }
}

// "k:i:j" -> ArcRef
inline ArcRef parse_arc_key(const std::string& tok, int line) {
  auto c1 = tok.find(':');
  auto c2 = tok.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ParseError(line, "expected k:i:j, got '" + tok + "'");
  return ArcRef{parse_id(tok.substr(0, c1), line, "commodity"),
                parse_id(tok.substr(c1 + 1, c2 - c1 - 1), line, "node"),
                parse_id(tok.substr(c2 + 1), line, "node")};
}

template <class S>
S parse_scalar(const std::string& tok, int line) {
  try {
    return scalar_traits<S>::parse(tok);
  } catch (const std::exception& e) {
    throw ParseError(line, e.what());
  }
}

// strip comments, returns trimmed payload
inline std::string strip_line(const std::string& raw) {
  std::string s = raw;
  if (auto h = s.find('#'); h != std::string::npos) s.erase(h);
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class S>
bool connected(const CommodityNetwork<S>& net) {
  if (net.nodes.empty()) return false;
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& a : net.arcs) {
    adj[a.from].push_back(a.to);
    adj[a.to].push_back(a.from);
  }
  std::set<NodeId> seen{net.nodes.front()};
  std::queue<NodeId> q;
  q.push(net.nodes.front());
  while (!q.empty()) {
    NodeId i = q.front();
    q.pop();
    for (NodeId j : adj[i])
      if (seen.insert(j).second) q.push(j);
  }
  return seen.size() == net.nodes.size();
}

} // namespace detail

/// Checks every Instance invariant; throws ParseError on the first violation.
/// `line_of` maps a commodity id to the line it was declared on (0 if unknown).
template <class S>
void validate_instance(const Instance<S>& inst) {
  if (inst.commodities.empty()) throw ParseError(0, "instance declares no commodities");
  for (int k = 1; k <= inst.commodity_count(); ++k) {
    const auto& net = inst.net(k);
    if (net.id != k) throw ParseError(0, "commodity ids are not dense 1..K");
    if (net.nodes.empty()) throw ParseError(0, "commodity " + std::to_string(k) + " has no nodes");
    for (const auto& a : net.arcs) {
      if (a.from == a.to)
        throw ParseError(0, "loop arc " + to_string(ArcRef{k, a.from, a.to}));
      if (!net.has_node(a.from) || !net.has_node(a.to))
        throw ParseError(0, "arc " + to_string(ArcRef{k, a.from, a.to}) +
                                " uses a node not declared in commodity " + std::to_string(k));
    }
    std::set<Arc> uniq(net.arcs.begin(), net.arcs.end());
    if (uniq.size() != net.arcs.size())
      throw ParseError(0, "duplicate arc in commodity " + std::to_string(k));
    for (const auto& [i, b] : net.balances)
      if (!net.has_node(i))
        throw ParseError(0, "balance for unknown node " + std::to_string(i) +
                                " in commodity " + std::to_string(k));
    if (!detail::connected(net))
      throw ParseError(0, "commodity " + std::to_string(k) + " network is not connected");
  }
  for (size_t p = 0; p < inst.side.size(); ++p) {
    for (const auto& [arc, coef] : inst.side[p].coeffs) {
      (void)coef;
      if (arc.k < 1 || arc.k > inst.commodity_count() ||
          !inst.net(arc.k).arc_index(arc.from, arc.to))
        throw ParseError(0, "side row " + std::to_string(p + 1) +
                                " references unknown arc " + to_string(arc));
    }
  }
  std::set<std::pair<NodeId, NodeId>> coupled;
  for (const auto& c : inst.coupling) {
    if (!coupled.insert({c.from, c.to}).second)
      throw ParseError(0, "duplicate coupling for arc " + std::to_string(c.from) + ":" +
                              std::to_string(c.to));
    if (c.commodities.size() <= 1)
      throw ParseError(0, "coupling for arc " + std::to_string(c.from) + ":" +
                              std::to_string(c.to) + " needs more than one commodity");
    for (CommodityId k : c.commodities)
      if (k < 1 || k > inst.commodity_count() || !inst.net(k).arc_index(c.from, c.to))
        throw ParseError(0, "coupling references unknown arc " +
                                to_string(ArcRef{k, c.from, c.to}));
  }
  // Underdetermined in the rank sense: the expected full rank may not
  // exceed the column count (the M block always loses one rank per
  // commodity, so the raw row count overstates the system size).
  int expected_full = inst.total_nodes() - inst.commodity_count() + int(inst.side.size()) +
                      int(inst.coupling.size());
  if (expected_full > inst.total_arcs())
    throw ParseError(0, "system is not underdetermined: expected rank " +
                            std::to_string(expected_full) + " exceeds " +
                            std::to_string(inst.total_arcs()) + " columns");
}

/// Parses the line-oriented instance format.
///
///   commodity <k>
///   node <i> [balance <a>]
///   arc <i> <j>
///   side rhs <alpha> { <k>:<i>:<j>=<lambda> ... }
///   couple <i> <j> rhs <z> commodities <k1>,<k2>,...
///
/// Blank lines and '#' comments are ignored.
template <class S>
Instance<S> parse_instance(std::string_view text) {
  Instance<S> inst;
  CommodityNetwork<S>* cur = nullptr;
  std::set<CommodityId> seen_k;

  std::istringstream stream{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    std::string line = detail::strip_line(raw);
    if (line.empty()) continue;
    auto toks = detail::split_ws(line);
    const std::string& head = toks[0];

    if (head == "commodity") {
      if (toks.size() != 2) throw ParseError(lineno, "usage: commodity <k>");
      CommodityId k = detail::parse_id(toks[1], lineno, "commodity id");
      if (!seen_k.insert(k).second)
        throw ParseError(lineno, "commodity " + std::to_string(k) + " declared twice");
      inst.commodities.emplace_back();
      cur = &inst.commodities.back();
      cur->id = k;
    } else if (head == "node") {
      if (!cur) throw ParseError(lineno, "node line before any commodity");
      if (toks.size() != 2 && !(toks.size() == 4 && toks[2] == "balance"))
        throw ParseError(lineno, "usage: node <i> [balance <a>]");
      NodeId i = detail::parse_id(toks[1], lineno, "node id");
      if (std::find(cur->nodes.begin(), cur->nodes.end(), i) != cur->nodes.end())
        throw ParseError(lineno, "node " + std::to_string(i) + " declared twice");
      cur->nodes.push_back(i);
      if (toks.size() == 4) {
        S b = detail::parse_scalar<S>(toks[3], lineno);
        if (!scalar_traits<S>::is_zero(b, 0.0)) cur->balances[i] = b;
      }
    } else if (head == "arc") {
      if (!cur) throw ParseError(lineno, "arc line before any commodity");
      if (toks.size() != 3) throw ParseError(lineno, "usage: arc <i> <j>");
      cur->arcs.push_back(Arc{detail::parse_id(toks[1], lineno, "node id"),
                              detail::parse_id(toks[2], lineno, "node id")});
    } else if (head == "side") {
      if (toks.size() < 4 || toks[1] != "rhs" || toks[3] != "{" || toks.back() != "}")
        throw ParseError(lineno, "usage: side rhs <alpha> { k:i:j=v ... }");
      SideConstraint<S> row;
      row.rhs = detail::parse_scalar<S>(toks[2], lineno);
      for (size_t t = 4; t + 1 < toks.size(); ++t) {
        auto eq = toks[t].find('=');
        if (eq == std::string::npos)
          throw ParseError(lineno, "expected k:i:j=v, got '" + toks[t] + "'");
        ArcRef arc = detail::parse_arc_key(toks[t].substr(0, eq), lineno);
        S v = detail::parse_scalar<S>(toks[t].substr(eq + 1), lineno);
        if (row.coeffs.count(arc))
          throw ParseError(lineno, "duplicate coefficient for arc " + to_string(arc));
        if (!scalar_traits<S>::is_zero(v, 0.0)) row.coeffs[arc] = v;
      }
      inst.side.push_back(std::move(row));
    } else if (head == "couple") {
      if (toks.size() != 7 || toks[3] != "rhs" || toks[5] != "commodities")
        throw ParseError(lineno, "usage: couple <i> <j> rhs <z> commodities <k1>,<k2>,...");
      CouplingConstraint<S> row;
      row.from = detail::parse_id(toks[1], lineno, "node id");
      row.to = detail::parse_id(toks[2], lineno, "node id");
      row.rhs = detail::parse_scalar<S>(toks[4], lineno);
      std::istringstream ks(toks[6]);
      std::string part;
      while (std::getline(ks, part, ','))
        row.commodities.push_back(detail::parse_id(part, lineno, "commodity id"));
      std::sort(row.commodities.begin(), row.commodities.end());
      if (std::adjacent_find(row.commodities.begin(), row.commodities.end()) !=
          row.commodities.end())
        throw ParseError(lineno, "duplicate commodity in coupling list");
      inst.coupling.push_back(std::move(row));
    } else {
      throw ParseError(lineno, "unknown directive '" + head + "'");
    }
  }

  // dense 1..K check, then reorder blocks by id
  for (int k = 1; k <= int(inst.commodities.size()); ++k)
    if (!seen_k.count(k))
      throw ParseError(0, "commodity ids are not dense 1..K (missing " + std::to_string(k) + ")");
  std::sort(inst.commodities.begin(), inst.commodities.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  for (auto& c : inst.commodities) {
    std::sort(c.nodes.begin(), c.nodes.end());
    c.index_arcs();
  }

  validate_instance(inst);
  return inst;
}

/// Inverse of parse_instance; declaration order is preserved so that
/// parse(serialize(inst)) == inst.
template <class S>
std::string serialize_instance(const Instance<S>& inst) {
  std::ostringstream os;
  for (const auto& c : inst.commodities) {
    os << "commodity " << c.id << "\n";
    for (NodeId i : c.nodes) {
      os << "node " << i;
      S b = c.balance(i);
      if (!scalar_traits<S>::is_zero(b, 0.0)) os << " balance " << scalar_traits<S>::str(b);
      os << "\n";
    }
    for (const auto& a : c.arcs) os << "arc " << a.from << " " << a.to << "\n";
  }
  for (const auto& row : inst.side) {
    os << "side rhs " << scalar_traits<S>::str(row.rhs) << " {";
    for (const auto& [arc, v] : row.coeffs)
      os << ' ' << arc << '=' << scalar_traits<S>::str(v);
    os << " }\n";
  }
  for (const auto& row : inst.coupling) {
    os << "couple " << row.from << " " << row.to << " rhs " << scalar_traits<S>::str(row.rhs)
       << " commodities ";
    for (size_t i = 0; i < row.commodities.size(); ++i)
      os << (i ? "," : "") << row.commodities[i];
    os << "\n";
  }
  return os.str();
}

/// Kronecker-Capelli consistency of one commodity's balance equations.
template <class S>
struct ConsistencyEntry {
  CommodityId k;
  S balance_sum;
  bool consistent;
};

template <class S>
std::vector<ConsistencyEntry<S>> check_consistency(const Instance<S>& inst, double eps = 1e-9) {
  std::vector<ConsistencyEntry<S>> out;
  for (const auto& c : inst.commodities) {
    S sum(0);
    for (const auto& [i, b] : c.balances) {
      (void)i;
      sum += b;
    }
    out.push_back({c.id, sum, scalar_traits<S>::is_zero(sum, eps)});
  }
  return out;
}

struct RankPair {
  int network; // sum |I^k| - |K|
  int full;    // network + q + |U0|
};

template <class S>
RankPair expected_rank(const Instance<S>& inst) {
  int network = inst.total_nodes() - inst.commodity_count();
  return {network, network + int(inst.side.size()) + int(inst.coupling.size())};
}

} // namespace netkernel
