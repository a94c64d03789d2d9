#include "hh/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

namespace hh::expr {

namespace {

struct Parser {
  std::string_view src;
  std::size_t pos = 0;
  const Limits& limits;
  int nodes_made = 0;

  explicit Parser(std::string_view s, const Limits& lim) : src(s), limits(lim) {}

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!accept(c)) throw SyntaxError(std::string("expected ") + what, pos);
  }

  NodePtr make(Op op, double v, NodePtr a, NodePtr b) {
    if (++nodes_made > limits.max_nodes)
      throw SyntaxError("expression exceeds node limit", pos);
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = v;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr parse_expr(int depth) {
    check_depth(depth);
    NodePtr lhs = parse_term(depth + 1);
    for (;;) {
      if (accept('+'))
        lhs = make(Op::Add, 0, lhs, parse_term(depth + 1));
      else if (accept('-'))
        lhs = make(Op::Sub, 0, lhs, parse_term(depth + 1));
      else
        return lhs;
    }
  }

  NodePtr parse_term(int depth) {
    check_depth(depth);
    NodePtr lhs = parse_unary(depth + 1);
    for (;;) {
      if (accept('*'))
        lhs = make(Op::Mul, 0, lhs, parse_unary(depth + 1));
      else if (accept('/'))
        lhs = make(Op::Div, 0, lhs, parse_unary(depth + 1));
      else
        return lhs;
    }
  }

  // unary minus binds looser than '^': -x^2 is -(x^2)
  NodePtr parse_unary(int depth) {
    check_depth(depth);
    if (accept('-')) return make(Op::Neg, 0, parse_unary(depth + 1), nullptr);
    return parse_power(depth + 1);
  }

  // right-associative: 2^3^2 = 2^(3^2); exponent may carry a sign
  NodePtr parse_power(int depth) {
    check_depth(depth);
    NodePtr base = parse_atom(depth + 1);
    if (accept('^')) return make(Op::Pow, 0, base, parse_unary(depth + 1));
    return base;
  }

  NodePtr parse_atom(int depth) {
    check_depth(depth);
    skip_ws();
    if (pos >= src.size()) throw SyntaxError("unexpected end of input", pos);
    char c = src[pos];

    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr(depth + 1);
      expect(')', "')'");
      return inner;
    }

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0;
      const char* first = src.data() + pos;
      const char* last = src.data() + src.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc()) throw SyntaxError("malformed number", pos);
      pos += static_cast<std::size_t>(ptr - first);
      return make(Op::Const, v, nullptr, nullptr);
    }

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
        ++pos;
      std::string name(src.substr(start, pos - start));

      if (name == "x") return make(Op::Var, 0, nullptr, nullptr);

      Op op;
      int arity;
      if (name == "exp") op = Op::Exp, arity = 1;
      else if (name == "log") op = Op::Log, arity = 1;
      else if (name == "sin") op = Op::Sin, arity = 1;
      else if (name == "cos") op = Op::Cos, arity = 1;
      else if (name == "tanh") op = Op::Tanh, arity = 1;
      else if (name == "abs") op = Op::Abs, arity = 1;
      else if (name == "min") op = Op::Min, arity = 2;
      else if (name == "max") op = Op::Max, arity = 2;
      else throw UnknownIdentifier(name, start);

      expect('(', "'(' after function name");
      std::vector<NodePtr> args;
      args.push_back(parse_expr(depth + 1));
      while (accept(',')) args.push_back(parse_expr(depth + 1));
      expect(')', "')'");
      if (static_cast<int>(args.size()) != arity)
        throw ArityError(name, arity, static_cast<int>(args.size()), start);
      return make(op, 0, args[0], arity == 2 ? args[1] : nullptr);
    }

    throw SyntaxError(std::string("unexpected character '") + c + "'", pos);
  }

  void check_depth(int depth) {
    if (depth > limits.max_depth) throw SyntaxError("expression exceeds depth limit", pos);
  }
};

double eval_node(const Node& n, double x) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x;
    case Op::Neg: return -eval_node(*n.a, x);
    case Op::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Op::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Op::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Op::Div: {
      double a = eval_node(*n.a, x), b = eval_node(*n.b, x);
      if (b == 0.0) throw DomainError("division by zero");
      return a / b;
    }
    case Op::Pow: {
      double a = eval_node(*n.a, x), b = eval_node(*n.b, x);
      double r = std::pow(a, b);
      if (!std::isfinite(r)) throw DomainError("non-finite power result");
      return r;
    }
    case Op::Exp: {
      double r = std::exp(eval_node(*n.a, x));
      if (!std::isfinite(r)) throw DomainError("exp overflow");
      return r;
    }
    case Op::Log: {
      double a = eval_node(*n.a, x);
      if (a <= 0.0) throw DomainError("log of nonpositive argument");
      return std::log(a);
    }
    case Op::Sin: return std::sin(eval_node(*n.a, x));
    case Op::Cos: return std::cos(eval_node(*n.a, x));
    case Op::Tanh: return std::tanh(eval_node(*n.a, x));
    case Op::Abs: return std::fabs(eval_node(*n.a, x));
    case Op::Min: return std::fmin(eval_node(*n.a, x), eval_node(*n.b, x));
    case Op::Max: return std::fmax(eval_node(*n.a, x), eval_node(*n.b, x));
  }
  throw DomainError("corrupt AST node");
}

std::string fmt_const(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_node(const Node& n, std::string& out) {
  auto binary = [&](const char* sym) {
    out += '(';
    print_node(*n.a, out);
    out += sym;
    print_node(*n.b, out);
    out += ')';
  };
  auto fn = [&](const char* name) {
    out += name;
    out += '(';
    print_node(*n.a, out);
    if (n.b) {
      out += ", ";
      print_node(*n.b, out);
    }
    out += ')';
  };
  switch (n.op) {
    case Op::Const: out += fmt_const(n.value); break;
    case Op::Var: out += 'x'; break;
    case Op::Neg:
      out += "(-";
      print_node(*n.a, out);
      out += ')';
      break;
    case Op::Add: binary(" + "); break;
    case Op::Sub: binary(" - "); break;
    case Op::Mul: binary("*"); break;
    case Op::Div: binary("/"); break;
    case Op::Pow: binary("^"); break;
    case Op::Exp: fn("exp"); break;
    case Op::Log: fn("log"); break;
    case Op::Sin: fn("sin"); break;
    case Op::Cos: fn("cos"); break;
    case Op::Tanh: fn("tanh"); break;
    case Op::Abs: fn("abs"); break;
    case Op::Min: fn("min"); break;
    case Op::Max: fn("max"); break;
  }
}

int count_nodes(const Node& n) {
  int c = 1;
  if (n.a) c += count_nodes(*n.a);
  if (n.b) c += count_nodes(*n.b);
  return c;
}

int node_depth(const Node& n) {
  int d = 0;
  if (n.a) d = node_depth(*n.a);
  if (n.b) d = std::max(d, node_depth(*n.b));
  return d + 1;
}

}  // namespace

double Ast::eval(double x) const {
  if (!root_) throw DomainError("empty expression");
  double r = eval_node(*root_, x);
  if (!std::isfinite(r)) throw DomainError("non-finite result");
  return r;
}

std::string Ast::pretty() const {
  if (!root_) return "";
  std::string out;
  print_node(*root_, out);
  return out;
}

int Ast::node_count() const { return root_ ? count_nodes(*root_) : 0; }
int Ast::depth() const { return root_ ? node_depth(*root_) : 0; }

Ast parse(std::string_view source, const Limits& limits) {
  Parser p(source, limits);
  if (p.eof()) throw SyntaxError("empty expression", 0);
  NodePtr root = p.parse_expr(0);
  if (!p.eof()) throw SyntaxError("trailing input", p.pos);
  return Ast(std::move(root));
}

EnvProfile validate_profile(const Ast& ast, int n_samples, const ProfileOptions& opts) {
  if (n_samples < 64) throw std::invalid_argument("validate_profile: n_samples must be >= 64");

  EnvProfile prof;
  prof.ast = ast;
  prof.source = ast.pretty();

  double lo = 0.0, hi = 0.0;
  constexpr double kPi = 3.14159265358979323846;
  for (int j = 0; j < n_samples; ++j) {
    // Chebyshev-Gauss points mapped to (0,1)
    double x = 0.5 - 0.5 * std::cos(kPi * (2 * j + 1) / (2.0 * n_samples));
    double v = ast.eval(x);
    if (j == 0) {
      lo = hi = v;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  prof.min_sample = lo;
  prof.max_sample = hi;
  prof.variation = hi - lo;

  if (lo < 0.0)
    throw H1Violation(H1Violation::Kind::NegativeValue,
                      "profile takes negative values (H1 requires m >= 0)");
  if (prof.variation <= opts.h1_tolerance && !opts.allow_constant)
    throw H1Violation(H1Violation::Kind::Constant,
                      "profile is constant within tolerance (H1 requires non-constant m)");
  return prof;
}

EnvProfile load_profile(std::string_view source, int n_samples, const ProfileOptions& opts) {
  EnvProfile prof = validate_profile(parse(source), n_samples, opts);
  prof.source = std::string(source);
  return prof;
}

}  // namespace hh::expr
