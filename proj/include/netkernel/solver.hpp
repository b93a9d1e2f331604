#pragma once

#include <optional>

#include "netkernel/assemble.hpp"

namespace netkernel {

/// Cyclic-arc pin file: one `cyclic <k>:<i>:<j>` line per arc, in t-order.
template <class S>
std::vector<ArcRef> parse_cyclic_file(const Instance<S>& inst, std::string_view text) {
  (void)inst;
  std::vector<ArcRef> out;
  std::istringstream stream{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    std::string line = detail::strip_line(raw);
    if (line.empty()) continue;
    auto toks = detail::split_ws(line);
    if (toks[0] != "cyclic" || toks.size() != 2)
      throw ParseError(lineno, "usage: cyclic <k>:<i>:<j>");
    out.push_back(detail::parse_arc_key(toks[1], lineno));
  }
  return out;
}

struct SolveOptions {
  std::optional<std::string> support_text; // pins the spanning trees
  std::optional<std::string> cyclic_text;  // pins U_C
  double eps = 1e-9;
};

/// Everything the pipeline produces, kept for dumps and verification.
template <class S>
struct SolveResult {
  Support support;
  CycleSet cycles;
  std::vector<PartialSolution<S>> partials;
  RhsConstants<S> constants;
  Decomposition<S> decomp;
  ParametricSolution<S> solution;
};

/// Full direct method: support, cycles, partial solutions, decomposition,
/// small-system solve, assembly. Throws BalanceError / RankError /
/// SingularError / ParseError as the corresponding stage fails.
template <class S>
SolveResult<S> solve_system(const Instance<S>& inst, const SolveOptions& opt = {}) {
  for (const auto& entry : check_consistency(inst, opt.eps))
    if (!entry.consistent)
      throw BalanceError("balances of commodity " + std::to_string(entry.k) +
                         " sum to " + scalar_traits<S>::str(entry.balance_sum) + ", expected 0");

  SolveResult<S> res;
  res.support = opt.support_text ? load_support(inst, *opt.support_text) : build_support(inst);
  res.cycles = build_cycles(inst, res.support);
  for (const auto& net : inst.commodities)
    res.partials.push_back(tree_partial_solution(net, res.support.of(net.id), opt.eps));
  res.constants = rhs_constants(inst, res.support, res.partials);

  if (opt.cyclic_text)
    res.decomp = pinned_cyclic(inst, res.support, res.cycles,
                               parse_cyclic_file(inst, *opt.cyclic_text));
  else
    res.decomp = select_cyclic(inst, res.support, res.cycles);

  res.decomp.system.beta = assemble_beta(inst, res.decomp.partition, res.cycles, res.constants);
  auto cyclic_forms = solve_cyclic(res.decomp.system);
  res.solution = assemble(inst, res.decomp.partition, res.cycles, res.partials, cyclic_forms);
  return res;
}

} // namespace netkernel
