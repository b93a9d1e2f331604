#include "netkernel/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <numeric>
#include <tuple>
#include <ostream>
#include <stdexcept>

namespace netkernel {

namespace {

using i128 = __int128;

long long narrow(i128 v) {
  if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
    throw std::overflow_error("rational arithmetic overflow");
  return static_cast<long long>(v);
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Reduce n/d to lowest terms with d > 0, narrowing to 64 bits.
std::pair<long long, long long> reduce(i128 n, i128 d) {
  if (d == 0) throw std::domain_error("rational division by zero");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  if (n == 0) return {0, 1};
  i128 g = gcd128(n, d);
  return {narrow(n / g), narrow(d / g)};
}

[[noreturn]] void bad_literal(std::string_view text) {
  throw std::invalid_argument("invalid number literal: '" + std::string(text) + "'");
}

long long parse_int(std::string_view s) {
  if (s.empty()) bad_literal(s);
  errno = 0;
  char* end = nullptr;
  std::string buf(s);
  long long v = std::strtoll(buf.c_str(), &end, 10);
  if (errno == ERANGE) throw std::overflow_error("integer literal out of range");
  if (end != buf.c_str() + buf.size()) bad_literal(s);
  return v;
}

i128 pow10_128(int e) {
  i128 v = 1;
  while (e-- > 0) {
    v *= 10;
    if (v > i128(INT64_MAX) * INT64_MAX) throw std::overflow_error("decimal exponent out of range");
  }
  return v;
}

} // namespace

Rational::Rational(long long n, long long d) {
  std::tie(num_, den_) = reduce(n, d);
}

Rational Rational::parse(std::string_view text) {
  if (text.empty()) bad_literal(text);

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    long long p = parse_int(text.substr(0, slash));
    long long q = parse_int(text.substr(slash + 1));
    return Rational(p, q);
  }

  // Decimal: [sign] digits [. digits] [e|E [sign] digits]
  std::string_view mant = text;
  int exp10 = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    exp10 = static_cast<int>(parse_int(text.substr(e + 1)));
    mant = text.substr(0, e);
  }

  std::string digits;
  int frac_digits = 0;
  bool seen_dot = false, seen_digit = false;
  size_t pos = 0;
  if (pos < mant.size() && (mant[pos] == '+' || mant[pos] == '-')) {
    if (mant[pos] == '-') digits.push_back('-');
    ++pos;
  }
  for (; pos < mant.size(); ++pos) {
    char c = mant[pos];
    if (c == '.') {
      if (seen_dot) bad_literal(text);
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else {
      bad_literal(text);
    }
  }
  if (!seen_digit) bad_literal(text);

  long long n = parse_int(digits);
  int e = exp10 - frac_digits;
  Rational r;
  if (e >= 0)
    std::tie(r.num_, r.den_) = reduce(i128(n) * pow10_128(e), 1);
  else
    std::tie(r.num_, r.den_) = reduce(i128(n), pow10_128(-e));
  return r;
}

std::string Rational::str() const {
  std::string s = std::to_string(num_);
  if (den_ != 1) {
    s += '/';
    s += std::to_string(den_);
  }
  return s;
}

Rational& Rational::operator+=(const Rational& r) {
  std::tie(num_, den_) = reduce(i128(num_) * r.den_ + i128(r.num_) * den_, i128(den_) * r.den_);
  return *this;
}

Rational& Rational::operator-=(const Rational& r) {
  std::tie(num_, den_) = reduce(i128(num_) * r.den_ - i128(r.num_) * den_, i128(den_) * r.den_);
  return *this;
}

Rational& Rational::operator*=(const Rational& r) {
  std::tie(num_, den_) = reduce(i128(num_) * r.num_, i128(den_) * r.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& r) {
  std::tie(num_, den_) = reduce(i128(num_) * r.den_, i128(den_) * r.num_);
  return *this;
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = narrow(-i128(num_));
  r.den_ = den_;
  return r;
}

bool operator<(const Rational& a, const Rational& b) {
  return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

} // namespace netkernel
