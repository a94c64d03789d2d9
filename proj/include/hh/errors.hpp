#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hh {

// Expression language errors. All carry the byte offset into the source text.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifier : public SyntaxError {
 public:
  UnknownIdentifier(const std::string& name, std::size_t offset)
      : SyntaxError("unknown identifier '" + name + "'", offset) {}
};

class ArityError : public SyntaxError {
 public:
  ArityError(const std::string& name, int expected, int got, std::size_t offset)
      : SyntaxError("function '" + name + "' expects " + std::to_string(expected) +
                        " argument(s), got " + std::to_string(got),
                    offset) {}
};

// Evaluation hit log(x<=0), division by zero, or a non-finite result.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hypothesis (H1) check failed on the sampled profile.
class H1Violation : public std::runtime_error {
 public:
  enum class Kind { NegativeValue, Constant };
  H1Violation(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class NonFiniteIntegrand : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root finding.
class NoRoot : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BracketFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class RootToleranceNotMet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BracketExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear algebra.
class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Time integration.
class NonFiniteState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnstableStep : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class CflViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Steady-state solver.
class NewtonDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NoSignChange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hh
