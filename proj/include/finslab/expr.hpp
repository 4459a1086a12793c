#ifndef FINSLAB_EXPR_HPP
#define FINSLAB_EXPR_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "finslab/common.hpp"
#include "finslab/dual.hpp"

namespace finslab {

// Arithmetic expressions over named variables (x1..xn, t), evaluable with any
// scalar type that supports the dual-number function set. Used for metric
// coefficients, measure densities, PDE coefficients and initial data, so that
// their exact derivatives are available through forward-mode evaluation.
namespace exprdetail {

enum class Op {
  Const,
  Var,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,   // general a^b via exp(b*log(a)), or fast path for constant exponent
  Exp,
  Log,
  Sin,
  Cos,
  Tan,
  Tanh,
  Sqrt,
  Abs
};

struct Node {
  Op op = Op::Const;
  double c = 0.0;  // Const value, or constant exponent for Pow when b==null
  int var = -1;
  std::shared_ptr<const Node> a, b;
};

using NodePtr = std::shared_ptr<const Node>;

template <class T>
T eval(const Node& n, std::span<const T> vars) {
  switch (n.op) {
    case Op::Const:
      return T(n.c);
    case Op::Var:
      return vars[static_cast<size_t>(n.var)];
    case Op::Neg:
      return -eval(*n.a, vars);
    case Op::Add:
      return eval(*n.a, vars) + eval(*n.b, vars);
    case Op::Sub:
      return eval(*n.a, vars) - eval(*n.b, vars);
    case Op::Mul:
      return eval(*n.a, vars) * eval(*n.b, vars);
    case Op::Div:
      return eval(*n.a, vars) / eval(*n.b, vars);
    case Op::Pow: {
      T base = eval(*n.a, vars);
      if (!n.b) return pow(base, n.c);
      return exp(eval(*n.b, vars) * log(base));
    }
    case Op::Exp:
      return exp(eval(*n.a, vars));
    case Op::Log:
      return log(eval(*n.a, vars));
    case Op::Sin:
      return sin(eval(*n.a, vars));
    case Op::Cos:
      return cos(eval(*n.a, vars));
    case Op::Tan:
      return tan(eval(*n.a, vars));
    case Op::Tanh:
      return tanh(eval(*n.a, vars));
    case Op::Sqrt:
      return sqrt(eval(*n.a, vars));
    case Op::Abs:
      return abs(eval(*n.a, vars));
  }
  return T(0.0);
}

NodePtr parse(const std::string& src, const std::vector<std::string>& varnames);
bool depends_on_any(const Node& n);

}  // namespace exprdetail

class Expression {
 public:
  Expression() = default;

  // varnames gives the allowed identifiers in order; evaluation expects the
  // same order. Throws ParseError with a character position on bad input.
  static Expression parse(const std::string& src, const std::vector<std::string>& varnames) {
    Expression e;
    e.src_ = src;
    e.nvars_ = static_cast<int>(varnames.size());
    e.root_ = exprdetail::parse(src, varnames);
    return e;
  }

  // Convenience: variables x1..xn plus optionally t as the last slot.
  static Expression parse_xt(const std::string& src, int dim, bool with_t) {
    std::vector<std::string> names;
    for (int i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
    if (with_t) names.push_back("t");
    return parse(src, names);
  }

  template <class T>
  T operator()(std::span<const T> vars) const {
    if (!root_) throw Error("Expression: evaluating an empty expression");
    return exprdetail::eval(*root_, vars);
  }
  template <class T>
  T operator()(const std::vector<T>& vars) const {
    return (*this)(std::span<const T>(vars.data(), vars.size()));
  }
  template <class T, size_t K>
  T operator()(const std::array<T, K>& vars) const {
    return (*this)(std::span<const T>(vars.data(), vars.size()));
  }

  bool empty() const { return !root_; }
  bool is_constant() const { return root_ && !exprdetail::depends_on_any(*root_); }
  int nvars() const { return nvars_; }
  const std::string& source() const { return src_; }

 private:
  std::string src_;
  exprdetail::NodePtr root_;
  int nvars_ = 0;
};

}  // namespace finslab

#endif
