#pragma once

#include <stdexcept>
#include <string>

namespace kspec {

// Input violates an operation's precondition (CLI exit status 2).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The deformed metric (1 - Δφ) g fails to be positive at some node.
// For the ray t·φ the admissible interval (t_lo, t_hi) is carried along.
class NotPositiveError : public PreconditionError {
 public:
  NotPositiveError(const std::string& what, double t_lo, double t_hi)
      : PreconditionError(what), t_lo_(t_lo), t_hi_(t_hi) {}
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }

 private:
  double t_lo_;
  double t_hi_;
};

// A numerical result cannot be trusted at the current resolution (exit 3).
class TrustError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kspec
