#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "hh/errors.hpp"

namespace hh::expr {

// AST for the habitat heterogeneity profile m(x): a single-variable
// arithmetic expression over {+,-,*,/,^}, unary minus and a fixed
// function set. Trees are immutable after construction and safe to
// evaluate concurrently.

enum class Op {
  Const, Var, Neg,
  Add, Sub, Mul, Div, Pow,
  Exp, Log, Sin, Cos, Tanh, Abs,
  Min, Max,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op;
  double value = 0.0;  // Const only
  NodePtr a, b;
};

struct Limits {
  int max_depth = 64;
  int max_nodes = 4096;
};

class Ast {
 public:
  Ast() = default;
  explicit Ast(NodePtr root) : root_(std::move(root)) {}

  double eval(double x) const;
  std::string pretty() const;
  int node_count() const;
  int depth() const;
  const NodePtr& root() const { return root_; }

 private:
  NodePtr root_;
};

Ast parse(std::string_view source, const Limits& limits = {});

inline double eval(const Ast& ast, double x) { return ast.eval(x); }

struct ProfileOptions {
  double h1_tolerance = 1e-9;   // non-constancy threshold on sampled variation
  bool allow_constant = false;  // test-mode escape hatch for closed-form oracles
};

struct EnvProfile {
  std::string source;
  Ast ast;
  double min_sample = 0.0;
  double max_sample = 0.0;
  double variation = 0.0;  // max_sample - min_sample

  double operator()(double x) const { return ast.eval(x); }
};

// Samples the profile at n Chebyshev-distributed points in (0,1) and checks
// hypothesis (H1): m >= 0 and m non-constant. Sampling is a heuristic check;
// it cannot prove positivity.
EnvProfile validate_profile(const Ast& ast, int n_samples = 256,
                            const ProfileOptions& opts = {});

// parse + validate, keeping the original source text in the profile.
EnvProfile load_profile(std::string_view source, int n_samples = 256,
                        const ProfileOptions& opts = {});

}  // namespace hh::expr
