#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "netkernel/decompose.hpp"

namespace netkernel {

/// Complete parametric general solution: one affine form per arc, free arcs
/// appearing as identity monomials.
template <class S>
struct ParametricSolution {
  std::vector<ArcRef> order;             // all arcs, canonical order
  std::map<ArcRef, AffineForm<S>> forms; // covers every arc
  std::vector<ArcRef> free_arcs;         // U_N order

  const AffineForm<S>& form(const ArcRef& arc) const { return forms.at(arc); }
};

/// Folds partial solutions, cyclic forms, and free monomials into the final
/// per-arc forms: tree arcs collect the signed free and cyclic contributions
/// of their commodity's cycles plus the partial solution.
template <class S>
ParametricSolution<S> assemble(const Instance<S>& inst, const ArcPartition& part,
                               const CycleSet& cycles,
                               const std::vector<PartialSolution<S>>& partials,
                               const std::vector<AffineForm<S>>& cyclic_forms) {
  ParametricSolution<S> sol;
  sol.order = inst.columns();
  sol.free_arcs = part.free_arcs;

  for (int t = 0; t < int(part.cyclic.size()); ++t) sol.forms[part.cyclic[t]] = cyclic_forms[t];
  for (const auto& f : part.free_arcs) sol.forms[f] = AffineForm<S>::monomial(f);

  for (const auto& net : inst.commodities) {
    for (int idx : part.support.of(net.id)) {
      ArcRef arc = net.ref(idx);
      AffineForm<S> form(partials[net.id - 1].values[idx]);
      for (const auto& f : part.free_arcs) {
        if (f.k != net.id) continue;
        int sign = cycles.of(f).sign_of(arc);
        if (sign != 0) form.add_term(f, S(sign));
      }
      for (int t = 0; t < int(part.cyclic.size()); ++t) {
        const auto& c = part.cyclic[t];
        if (c.k != net.id) continue;
        int sign = cycles.of(c).sign_of(arc);
        if (sign > 0)
          form += cyclic_forms[t];
        else if (sign < 0)
          form -= cyclic_forms[t];
      }
      sol.forms[arc] = std::move(form);
    }
  }
  return sol;
}

/// Numeric flow from a parametric solution at one free-variable assignment;
/// missing free arcs default to zero.
template <class S>
std::map<ArcRef, S> evaluate(const ParametricSolution<S>& sol,
                             const std::map<ArcRef, S>& assignment) {
  for (const auto& [arc, v] : assignment) {
    (void)v;
    if (std::find(sol.free_arcs.begin(), sol.free_arcs.end(), arc) == sol.free_arcs.end())
      throw std::invalid_argument("assignment for non-free arc " + to_string(arc));
  }
  std::map<ArcRef, S> flow;
  for (const auto& arc : sol.order) flow[arc] = sol.forms.at(arc).evaluate(assignment);
  return flow;
}

/// Residual of every equation of the system under a numeric flow.
template <class S>
struct ResidualReport {
  struct Entry {
    std::string equation;
    S value;
  };
  std::vector<Entry> entries;
  S max_abs{};

  bool all_zero(double eps) const {
    for (const auto& e : entries)
      if (!scalar_traits<S>::is_zero(e.value, eps)) return false;
    return true;
  }
};

template <class S>
ResidualReport<S> residual(const Instance<S>& inst, const std::map<ArcRef, S>& flow) {
  using std::abs;
  ResidualReport<S> rep;
  auto push = [&rep](std::string eq, S v) {
    if (abs(v) > rep.max_abs) rep.max_abs = abs(v);
    rep.entries.push_back({std::move(eq), std::move(v)});
  };

  for (const auto& net : inst.commodities) {
    std::map<NodeId, S> sums;
    for (NodeId i : net.nodes) sums[i] = -net.balance(i);
    for (const auto& a : net.arcs) {
      const S& x = flow.at(ArcRef{net.id, a.from, a.to});
      sums[a.from] += x;
      sums[a.to] -= x;
    }
    for (NodeId i : net.nodes)
      push("balance " + std::to_string(net.id) + ":" + std::to_string(i), sums[i]);
  }
  for (size_t p = 0; p < inst.side.size(); ++p) {
    S sum = -inst.side[p].rhs;
    for (const auto& [arc, lam] : inst.side[p].coeffs) sum += lam * flow.at(arc);
    push("side " + std::to_string(p + 1), sum);
  }
  for (size_t x = 0; x < inst.coupling.size(); ++x) {
    const auto& row = inst.coupling[x];
    S sum = -row.rhs;
    for (CommodityId k : row.commodities) sum += flow.at(ArcRef{k, row.from, row.to});
    push("couple " + std::to_string(row.from) + ":" + std::to_string(row.to), sum);
  }
  return rep;
}

// --- solution file format ------------------------------------------------
//
//   x <k>:<i>:<j> = <const> [ + <coef>*x<k'>:<i'>:<j'> ]...
//   free <k>:<i>:<j>           (footer, one per free arc; absent when numeric)

template <class S>
std::string format_form(const AffineForm<S>& form, const std::vector<ArcRef>& free_order) {
  std::ostringstream os;
  os << scalar_traits<S>::str(form.constant());
  for (const auto& f : free_order) {
    S c = form.coefficient(f);
    if (c == S(0)) continue;
    os << " + " << scalar_traits<S>::str(c) << "*x" << f;
  }
  return os.str();
}

template <class S>
std::string serialize_solution(const ParametricSolution<S>& sol) {
  std::ostringstream os;
  for (const auto& arc : sol.order)
    os << "x " << arc << " = " << format_form(sol.forms.at(arc), sol.free_arcs) << "\n";
  for (const auto& f : sol.free_arcs) os << "free " << f << "\n";
  return os.str();
}

template <class S>
std::string serialize_flow(const std::vector<ArcRef>& order, const std::map<ArcRef, S>& flow) {
  std::ostringstream os;
  for (const auto& arc : order)
    os << "x " << arc << " = " << scalar_traits<S>::str(flow.at(arc)) << "\n";
  return os.str();
}

/// A solution file read back: parametric (forms plus free footer) or a
/// fully numeric flow.
template <class S>
struct LoadedSolution {
  bool parametric = false;
  ParametricSolution<S> solution;   // filled when parametric
  std::map<ArcRef, S> flow;         // filled when numeric
};

template <class S>
LoadedSolution<S> parse_solution(const Instance<S>& inst, std::string_view text) {
  LoadedSolution<S> out;
  std::map<ArcRef, AffineForm<S>> forms;
  std::vector<ArcRef> free_arcs;
  bool any_terms = false;

  std::istringstream stream{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    std::string line = detail::strip_line(raw);
    if (line.empty()) continue;
    auto toks = detail::split_ws(line);
    if (toks[0] == "eval") break; // appended numeric blocks are not part of the solution
    if (toks[0] == "free") {
      if (toks.size() != 2) throw ParseError(lineno, "usage: free <k>:<i>:<j>");
      free_arcs.push_back(detail::parse_arc_key(toks[1], lineno));
      continue;
    }
    if (toks[0] != "x" || toks.size() < 4 || toks[2] != "=")
      throw ParseError(lineno, "expected 'x <k>:<i>:<j> = ...'");
    ArcRef arc = detail::parse_arc_key(toks[1], lineno);
    AffineForm<S> form(detail::parse_scalar<S>(toks[3], lineno));
    for (size_t t = 4; t < toks.size(); t += 2) {
      if (toks[t] != "+" || t + 1 >= toks.size())
        throw ParseError(lineno, "malformed term list");
      auto star = toks[t + 1].find("*x");
      if (star == std::string::npos)
        throw ParseError(lineno, "expected <coef>*x<k>:<i>:<j>, got '" + toks[t + 1] + "'");
      S coef = detail::parse_scalar<S>(toks[t + 1].substr(0, star), lineno);
      ArcRef var = detail::parse_arc_key(toks[t + 1].substr(star + 2), lineno);
      form.add_term(var, coef);
      any_terms = true;
    }
    if (forms.count(arc)) throw ParseError(lineno, "duplicate line for arc " + to_string(arc));
    forms[arc] = std::move(form);
  }

  // every declared arc must be covered, and nothing else
  for (const auto& arc : inst.columns())
    if (!forms.count(arc)) throw ParseError(0, "solution misses arc " + to_string(arc));
  if (forms.size() != size_t(inst.total_arcs()))
    throw ParseError(0, "solution references arcs not declared by the instance");

  out.parametric = !free_arcs.empty() || any_terms;
  if (!out.parametric) {
    for (const auto& [arc, form] : forms) out.flow[arc] = form.constant();
    return out;
  }

  std::set<ArcRef> free_set(free_arcs.begin(), free_arcs.end());
  if (free_set.size() != free_arcs.size()) throw ParseError(0, "free footer repeats an arc");
  for (const auto& [arc, form] : forms) {
    for (const auto& [var, coef] : form.terms()) {
      (void)coef;
      if (!free_set.count(var))
        throw ParseError(0, "form for " + to_string(arc) + " uses non-free variable " +
                                to_string(var));
    }
  }
  for (const auto& f : free_arcs)
    if (!(forms.at(f) == AffineForm<S>::monomial(f)))
      throw ParseError(0, "free arc " + to_string(f) + " is not an identity monomial");

  out.solution.order = inst.columns();
  out.solution.forms = std::move(forms);
  out.solution.free_arcs = std::move(free_arcs);
  return out;
}

} // namespace netkernel
