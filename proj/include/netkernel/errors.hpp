#pragma once

#include <stdexcept>
#include <string>

namespace netkernel {

/// Instance or support file could not be read: syntax or invariant violation.
class ParseError : public std::runtime_error {
public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// Some commodity balance vector does not sum to zero.
class BalanceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The additional part does not reach full rank over the homogeneous
/// solution space; no cyclic-arc selection can produce a nonsingular D.
class RankError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A pinned cyclic-arc selection produced a singular D.
class SingularError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace netkernel
