#pragma once

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "netkernel/solver.hpp"

namespace nktest {

using netkernel::Rational;

inline Rational R(long long n, long long d = 1) { return Rational(n, d); }

inline std::string fixture_text(const std::string& name) {
  std::ifstream in(std::string(NETKERNEL_FIXTURE_DIR) + "/" + name, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing fixture " << name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <class S>
netkernel::Instance<S> demo_instance() {
  return netkernel::parse_instance<S>(fixture_text("demo.net"));
}

template <class S>
netkernel::SolveResult<S> demo_solved() {
  netkernel::SolveOptions opt;
  opt.support_text = fixture_text("demo.support");
  opt.cyclic_text = fixture_text("demo.cyclic");
  return netkernel::solve_system(demo_instance<S>(), opt);
}

inline netkernel::ArcRef arc(int k, int i, int j) { return {k, i, j}; }

} // namespace nktest
