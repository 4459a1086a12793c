#include "finslab/expr.hpp"

#include <cctype>
#include <cstdlib>

namespace finslab {
namespace exprdetail {

namespace {

struct Parser {
  const std::string& s;
  const std::vector<std::string>& vars;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression error at position " + std::to_string(pos) + ": " + msg +
                     " in \"" + s + "\"");
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr expr() {
    NodePtr left = term();
    for (;;) {
      if (eat('+')) {
        left = make(Op::Add, left, term());
      } else if (eat('-')) {
        left = make(Op::Sub, left, term());
      } else {
        return left;
      }
    }
  }

  NodePtr term() {
    NodePtr left = factor();
    for (;;) {
      if (eat('*')) {
        left = make(Op::Mul, left, factor());
      } else if (eat('/')) {
        left = make(Op::Div, left, factor());
      } else {
        return left;
      }
    }
  }

  NodePtr factor() {
    if (eat('-')) return make(Op::Neg, factor());
    if (eat('+')) return factor();
    NodePtr base = primary();
    if (eat('^')) {
      NodePtr e = factor();  // right-associative
      if (e->op == Op::Const) {
        auto n = std::make_shared<Node>();
        n->op = Op::Pow;
        n->a = base;
        n->c = e->c;
        return n;
      }
      if (e->op == Op::Neg && e->a->op == Op::Const) {
        auto n = std::make_shared<Node>();
        n->op = Op::Pow;
        n->a = base;
        n->c = -e->a->c;
        return n;
      }
      return make(Op::Pow, base, e);
    }
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '(') {
      ++pos;
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    const double val = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos += static_cast<size_t>(end - begin);
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->c = val;
    return n;
  }

  NodePtr identifier() {
    const size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    const std::string name = s.substr(start, pos - start);
    if (peek() == '(') {
      Op op;
      if (name == "exp") op = Op::Exp;
      else if (name == "log") op = Op::Log;
      else if (name == "sin") op = Op::Sin;
      else if (name == "cos") op = Op::Cos;
      else if (name == "tan") op = Op::Tan;
      else if (name == "tanh") op = Op::Tanh;
      else if (name == "sqrt") op = Op::Sqrt;
      else if (name == "abs") op = Op::Abs;
      else fail("unknown function '" + name + "'");
      ++pos;  // '('
      NodePtr arg = expr();
      if (!eat(')')) fail("expected ')' after function argument");
      return make(op, arg);
    }
    if (name == "pi") {
      auto n = std::make_shared<Node>();
      n->op = Op::Const;
      n->c = 3.14159265358979323846;
      return n;
    }
    if (name == "e") {
      auto n = std::make_shared<Node>();
      n->op = Op::Const;
      n->c = 2.71828182845904523536;
      return n;
    }
    for (size_t i = 0; i < vars.size(); ++i) {
      if (vars[i] == name) {
        auto n = std::make_shared<Node>();
        n->op = Op::Var;
        n->var = static_cast<int>(i);
        return n;
      }
    }
    fail("unknown identifier '" + name + "'");
  }
};

}  // namespace

NodePtr parse(const std::string& src, const std::vector<std::string>& varnames) {
  Parser p{src, varnames};
  NodePtr root = p.expr();
  p.skip_ws();
  if (p.pos != src.size()) p.fail("trailing characters");
  return root;
}

bool depends_on_any(const Node& n) {
  if (n.op == Op::Var) return true;
  if (n.a && depends_on_any(*n.a)) return true;
  if (n.b && depends_on_any(*n.b)) return true;
  return false;
}

}  // namespace exprdetail
}  // namespace finslab
