#pragma once

#include <map>

#include "netkernel/instance.hpp"

namespace netkernel {

/// Linear polynomial over free-arc variables: constant + sum coef * x_arc.
/// The currency of parametric solutions; exact-zero coefficients are pruned.
template <class S>
class AffineForm {
public:
  AffineForm() = default;
  explicit AffineForm(S constant) : constant_(std::move(constant)) {}

  static AffineForm monomial(const ArcRef& arc) {
    AffineForm f;
    f.terms_[arc] = S(1);
    return f;
  }

  const S& constant() const { return constant_; }
  const std::map<ArcRef, S>& terms() const { return terms_; }

  S coefficient(const ArcRef& arc) const {
    auto it = terms_.find(arc);
    return it == terms_.end() ? S(0) : it->second;
  }

  bool is_constant() const { return terms_.empty(); }

  void add_term(const ArcRef& arc, const S& coef) {
    auto [it, inserted] = terms_.try_emplace(arc, coef);
    if (!inserted) it->second += coef;
    if (it->second == S(0)) terms_.erase(it);
  }

  AffineForm& operator+=(const AffineForm& o) {
    constant_ += o.constant_;
    for (const auto& [arc, c] : o.terms_) add_term(arc, c);
    return *this;
  }

  AffineForm& operator-=(const AffineForm& o) {
    constant_ -= o.constant_;
    for (const auto& [arc, c] : o.terms_) add_term(arc, -c);
    return *this;
  }

  AffineForm& operator*=(const S& s) {
    if (s == S(0)) {
      constant_ = S(0);
      terms_.clear();
      return *this;
    }
    constant_ *= s;
    for (auto& [arc, c] : terms_) {
      (void)arc;
      c *= s;
    }
    return *this;
  }

  friend AffineForm operator+(AffineForm a, const AffineForm& b) { return a += b; }
  friend AffineForm operator-(AffineForm a, const AffineForm& b) { return a -= b; }
  friend AffineForm operator*(AffineForm a, const S& s) { return a *= s; }
  friend AffineForm operator*(const S& s, AffineForm a) { return a *= s; }

  friend bool operator==(const AffineForm&, const AffineForm&) = default;

  /// Substitutes the assignment (missing arcs read as zero).
  S evaluate(const std::map<ArcRef, S>& assignment) const {
    S v = constant_;
    for (const auto& [arc, coef] : terms_) {
      auto it = assignment.find(arc);
      if (it != assignment.end()) v += coef * it->second;
    }
    return v;
  }

private:
  S constant_{};
  std::map<ArcRef, S> terms_;
};

} // namespace netkernel
