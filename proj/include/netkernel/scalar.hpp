#pragma once

#include <Eigen/Core>

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "netkernel/rational.hpp"

namespace netkernel {

/// Per-scalar behavior for the two solver modes: exact rationals and
/// 64-bit floats with a comparison tolerance.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static Rational parse(std::string_view text) { return Rational::parse(text); }
  static std::string str(const Rational& v) { return v.str(); }
  static bool is_zero(const Rational& v, double /*eps*/) { return v.is_zero(); }
  static double to_double(const Rational& v) { return v.to_double(); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;

  static double parse(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      double p = parse(text.substr(0, slash));
      double q = parse(text.substr(slash + 1));
      if (q == 0.0) throw std::domain_error("rational division by zero");
      return p / q;
    }
    std::string_view body = text;
    if (!body.empty() && body.front() == '+') body.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || ptr != body.data() + body.size())
      throw std::invalid_argument("invalid number literal: '" + std::string(text) + "'");
    return v;
  }

  static std::string str(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  }

  static bool is_zero(double v, double eps) { return std::fabs(v) <= eps; }
  static double to_double(double v) { return v; }
};

using Eigen::Dynamic;

template <class S>
using DenseMat = Eigen::Matrix<S, Dynamic, Dynamic>;
template <class S>
using DenseVec = Eigen::Matrix<S, Dynamic, 1>;

} // namespace netkernel

namespace Eigen {

template <>
struct NumTraits<netkernel::Rational> : GenericNumTraits<netkernel::Rational> {
  typedef netkernel::Rational Real;
  typedef netkernel::Rational NonInteger;
  typedef netkernel::Rational Nested;
  typedef long long Literal;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 20,
    MulCost = 20,
  };

  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline Real highest() { return Real(INT64_MAX); }
  static inline Real lowest() { return Real(INT64_MIN); }
  static inline int digits10() { return 18; }
};

} // namespace Eigen
