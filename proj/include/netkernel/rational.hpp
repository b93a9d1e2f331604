#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace netkernel {

/// Exact rational scalar on 64-bit numerator / denominator.
///
/// Every value is kept normalized (gcd-reduced, denominator positive).
/// Operations that would leave the 64-bit range throw std::overflow_error
/// instead of silently wrapping; intermediates go through 128-bit math.
class Rational {
public:
  Rational() = default;
  Rational(long long n) : num_(n) {}
  Rational(long long n, long long d);

  /// Accepts "p/q", integers, and decimal literals ("-1.25", "3e2").
  /// Decimals are converted exactly, never rounded.
  static Rational parse(std::string_view text);

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ > 0 ? 1 : num_ < 0 ? -1 : 0; }

  double to_double() const { return double(num_) / double(den_); }
  std::string str() const;

  Rational& operator+=(const Rational& r);
  Rational& operator-=(const Rational& r);
  Rational& operator*=(const Rational& r);
  Rational& operator/=(const Rational& r);

  Rational operator-() const;

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

private:
  long long num_ = 0;
  long long den_ = 1;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

std::ostream& operator<<(std::ostream& os, const Rational& r);

} // namespace netkernel
