#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "netkernel/generator.hpp"
#include "netkernel/oracle.hpp"
#include "netkernel/solver.hpp"

namespace netkernel::cli {

// exit codes shared by all subcommands, fixed for scriptability
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     // verification failed / internal error
inline constexpr int kExitParse = 2;       // unreadable file, syntax, invariant violation
inline constexpr int kExitInconsistent = 3;
inline constexpr int kExitRankDeficient = 4;
inline constexpr int kExitSingular = 5;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError(0, "cannot write file '" + path + "'");
  f << text;
}

template <class S>
std::map<ArcRef, S> parse_assignment(const std::vector<std::string>& tokens) {
  std::map<ArcRef, S> a;
  for (const auto& tok : tokens) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw ParseError(0, "expected k:i:j=v, got '" + tok + "'");
    ArcRef arc = netkernel::detail::parse_arc_key(tok.substr(0, eq), 0);
    a[arc] = netkernel::detail::parse_scalar<S>(tok.substr(eq + 1), 0);
  }
  return a;
}

// fixed-width table cell
inline std::string cell(const std::string& s, size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

template <class S>
void dump_cycles(const SolveResult<S>& res, std::ostream& out) {
  out << "# cycles\n";
  for (const auto& cyc : res.cycles.cycles) {
    out << "# cycle " << cyc.entailing << ":";
    for (const auto& [arc, sign] : cyc.members) out << ' ' << (sign > 0 ? '+' : '-') << arc;
    out << "\n";
  }
}

template <class S>
void dump_tables(const Instance<S>& inst, const SolveResult<S>& res, std::ostream& out) {
  const size_t w = 8;
  for (const auto& net : inst.commodities) {
    out << "# characteristic vectors, commodity " << net.id << "\n# arc       ";
    for (const auto& a : net.arcs) out << cell(to_string(ArcRef{net.id, a.from, a.to}), w);
    out << "\n";
    for (const auto& v : basis(inst, net.id, res.support)) {
      out << "# delta(" << v.entailing.from << ":" << v.entailing.to << ")";
      for (const auto& a : net.arcs)
        out << cell(std::to_string(v.at(ArcRef{net.id, a.from, a.to})), w);
      out << "\n";
    }
  }

  std::vector<ArcRef> entailing;
  for (const auto& cyc : res.cycles.cycles) entailing.push_back(cyc.entailing);
  auto header = [&] {
    out << "# entailing ";
    for (const auto& e : entailing) out << cell(to_string(e), w);
    out << "\n";
  };
  out << "# cycle determinants\n";
  header();
  for (size_t p = 0; p < inst.side.size(); ++p) {
    out << "# R_" << p + 1 << "       ";
    for (const auto& e : entailing)
      out << cell(scalar_traits<S>::str(cycle_determinant(res.cycles.of(e), inst.side[p])), w);
    out << "\n";
  }
  out << "# coupling deltas\n";
  header();
  for (const auto& row : inst.coupling) {
    out << "# delta_" << row.from << ":" << row.to << "  ";
    for (const auto& e : entailing)
      out << cell(scalar_traits<S>::str(coupling_delta(res.cycles.of(e), row)), w);
    out << "\n";
  }
}

template <class S>
void dump_small_system(const SolveResult<S>& res, std::ostream& out) {
  const auto& sys = res.decomp.system;
  out << "# cyclic arcs (t-order):";
  for (const auto& a : res.decomp.partition.cyclic) out << ' ' << a;
  out << "\n# D\n";
  for (int r = 0; r < sys.size(); ++r) {
    out << "#";
    for (int c = 0; c < sys.size(); ++c) out << ' ' << scalar_traits<S>::str(sys.D(r, c));
    out << "\n";
  }
  out << "# beta\n";
  for (int r = 0; r < sys.size(); ++r)
    out << "# beta_" << r + 1 << " = "
        << format_form(sys.beta[r], res.decomp.partition.free_arcs) << "\n";
  out << "# D_inv\n";
  for (int r = 0; r < sys.size(); ++r) {
    out << "#";
    for (int c = 0; c < sys.size(); ++c) out << ' ' << scalar_traits<S>::str(sys.D_inv(r, c));
    out << "\n";
  }
}

template <class S>
int run_solve(const std::string& inst_path, const SolveOptions& opt,
              const std::vector<std::vector<std::string>>& eval_groups, bool dump_cyc,
              bool dump_d, bool dump_tab, const std::string& out_path, std::ostream& out) {
  auto inst = parse_instance<S>(read_file(inst_path));
  auto res = solve_system(inst, opt);

  if (dump_cyc) dump_cycles(res, out);
  if (dump_tab) dump_tables(inst, res, out);
  if (dump_d) dump_small_system(res, out);

  std::ostringstream text;
  text << serialize_solution(res.solution);
  for (const auto& group : eval_groups) {
    auto assignment = parse_assignment<S>(group);
    auto flow = evaluate(res.solution, assignment);
    text << "eval";
    for (const auto& [arc, v] : assignment) text << ' ' << arc << '=' << scalar_traits<S>::str(v);
    text << "\n" << serialize_flow(res.solution.order, flow);
  }
  write_output(out_path, text.str(), out);
  return kExitOk;
}

template <class S>
int run_verify(const std::string& inst_path, const std::string& sol_path, double eps,
               std::ostream& out) {
  auto inst = parse_instance<S>(read_file(inst_path));
  auto loaded = parse_solution<S>(inst, read_file(sol_path));

  if (loaded.parametric) {
    auto rep = oracle_check(inst, loaded.solution, 20, 20240901, nullptr, eps);
    for (const auto& f : rep.failures) out << "FAIL " << f << "\n";
    out << (rep.pass ? "PASS" : "FAIL") << " parametric solution, " << rep.trials_run
        << " trials\n";
    return rep.pass ? kExitOk : kExitFailure;
  }

  auto rep = residual(inst, loaded.flow);
  bool ok = rep.all_zero(eps);
  if (!ok)
    for (const auto& e : rep.entries)
      if (!scalar_traits<S>::is_zero(e.value, eps))
        out << "FAIL " << e.equation << " residual " << scalar_traits<S>::str(e.value) << "\n";
  out << (ok ? "PASS" : "FAIL") << " numeric solution, max residual "
      << scalar_traits<S>::str(rep.max_abs) << "\n";
  return ok ? kExitOk : kExitFailure;
}

} // namespace detail

/// Entry point shared by the binary and the tests. Args exclude the program
/// name. Returns the process exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"direct solver for multicommodity-network linear systems"};
  app.require_subcommand(1);

  std::string inst_path, sol_path, out_path, mode = "rational";
  std::string support_path, cyclic_path;
  std::vector<std::vector<std::string>> eval_groups;
  bool dump_cyc = false, dump_d = false, dump_tab = false;
  double eps = 1e-9;

  auto* solve = app.add_subcommand("solve", "compute the parametric general solution");
  solve->add_option("instance", inst_path, "instance file")->required();
  solve->add_option("--mode", mode, "rational | float")
      ->check(CLI::IsMember({"rational", "float"}));
  solve->add_option("--support", support_path, "pin spanning trees from file");
  solve->add_option("--cyclic", cyclic_path, "pin cyclic arcs from file");
  solve->add_option("--eval", eval_groups, "free-variable assignment k:i:j=v ...");
  solve->add_flag("--dump-cycles", dump_cyc, "print fundamental cycles");
  solve->add_flag("--dump-D", dump_d, "print D, beta, D_inv");
  solve->add_flag("--dump-tables", dump_tab, "print characteristic vectors and cycle tables");
  solve->add_option("-o,--output", out_path, "write the solution here instead of stdout");
  solve->add_option("--eps", eps, "float-mode comparison tolerance");

  auto* verify = app.add_subcommand("verify", "check a solution file against an instance");
  verify->add_option("instance", inst_path, "instance file")->required();
  verify->add_option("solution", sol_path, "solution file")->required();
  verify->add_option("--mode", mode, "rational | float")
      ->check(CLI::IsMember({"rational", "float"}));
  verify->add_option("--eps", eps, "float-mode comparison tolerance");

  GenConfig cfg;
  auto* gen = app.add_subcommand("gen", "generate a random consistent instance");
  gen->add_option("--commodities", cfg.commodities)->check(CLI::PositiveNumber);
  gen->add_option("--nodes", cfg.nodes)->check(CLI::PositiveNumber);
  gen->add_option("--extra-arcs", cfg.extra_arcs)->check(CLI::NonNegativeNumber);
  gen->add_option("--side", cfg.side_rows)->check(CLI::NonNegativeNumber);
  gen->add_option("--coupled", cfg.coupled)->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", cfg.seed);
  gen->add_option("-o,--output", out_path, "write the instance here instead of stdout");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) { // --help
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }

  try {
    if (solve->parsed()) {
      SolveOptions opt;
      opt.eps = eps;
      if (!support_path.empty()) opt.support_text = detail::read_file(support_path);
      if (!cyclic_path.empty()) opt.cyclic_text = detail::read_file(cyclic_path);
      if (mode == "rational")
        return detail::run_solve<Rational>(inst_path, opt, eval_groups, dump_cyc, dump_d,
                                           dump_tab, out_path, out);
      return detail::run_solve<double>(inst_path, opt, eval_groups, dump_cyc, dump_d, dump_tab,
                                       out_path, out);
    }
    if (verify->parsed()) {
      if (mode == "rational") return detail::run_verify<Rational>(inst_path, sol_path, eps, out);
      return detail::run_verify<double>(inst_path, sol_path, eps, out);
    }
    // gen
    auto inst = generate_instance(cfg);
    detail::write_output(out_path, serialize_instance(inst), out);
    return kExitOk;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const BalanceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const RankError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRankDeficient;
  } catch (const SingularError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSingular;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

} // namespace netkernel::cli
