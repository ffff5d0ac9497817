#include "obstacle/expression.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace obstacle
{

struct Expression::Node
{
  enum class Op
  {
    Number,
    X,
    Y,
    R,
    Phi,
    Dist,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Less,
    LessEq,
    Greater,
    GreaterEq,
    Equal,
    NotEqual,
    Call1,
    Call2,
    IfElse
  };

  Op op = Op::Number;
  double number = 0.0;
  double (*f1)(double) = nullptr;
  double (*f2)(double, double) = nullptr;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace
{

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

double polar_phi(const Vec2& p)
{
  double phi = std::atan2(p.y, p.x);
  if (phi < 0.0)
    phi += 2.0 * std::numbers::pi;
  return phi;
}

double evaluate(const Expression::Node& n, const Vec2& p, const Domain* domain)
{
  auto arg = [&](int i) { return evaluate(*n.args[i], p, domain); };
  switch (n.op)
  {
  case Op::Number:
    return n.number;
  case Op::X:
    return p.x;
  case Op::Y:
    return p.y;
  case Op::R:
    return norm(p);
  case Op::Phi:
    return polar_phi(p);
  case Op::Dist:
    return domain->boundary_distance(p);
  case Op::Neg:
    return -arg(0);
  case Op::Add:
    return arg(0) + arg(1);
  case Op::Sub:
    return arg(0) - arg(1);
  case Op::Mul:
    return arg(0) * arg(1);
  case Op::Div:
    return arg(0) / arg(1);
  case Op::Pow:
    return std::pow(arg(0), arg(1));
  case Op::Less:
    return arg(0) < arg(1) ? 1.0 : 0.0;
  case Op::LessEq:
    return arg(0) <= arg(1) ? 1.0 : 0.0;
  case Op::Greater:
    return arg(0) > arg(1) ? 1.0 : 0.0;
  case Op::GreaterEq:
    return arg(0) >= arg(1) ? 1.0 : 0.0;
  case Op::Equal:
    return arg(0) == arg(1) ? 1.0 : 0.0;
  case Op::NotEqual:
    return arg(0) != arg(1) ? 1.0 : 0.0;
  case Op::Call1:
    return n.f1(arg(0));
  case Op::Call2:
    return n.f2(arg(0), arg(1));
  case Op::IfElse:
    return arg(0) != 0.0 ? arg(1) : arg(2);
  }
  return 0.0;
}

double fn_sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }
double fn_min(double a, double b) { return std::min(a, b); }
double fn_max(double a, double b) { return std::max(a, b); }

struct Unary
{
  const char* name;
  double (*f)(double);
};
struct Binary
{
  const char* name;
  double (*f)(double, double);
};

const Unary unary_functions[] = {
    {"sin", [](double v) { return std::sin(v); }},
    {"cos", [](double v) { return std::cos(v); }},
    {"tan", [](double v) { return std::tan(v); }},
    {"atan", [](double v) { return std::atan(v); }},
    {"exp", [](double v) { return std::exp(v); }},
    {"ln", [](double v) { return std::log(v); }},
    {"log", [](double v) { return std::log(v); }},
    {"sqrt", [](double v) { return std::sqrt(v); }},
    {"abs", [](double v) { return std::abs(v); }},
    {"floor", [](double v) { return std::floor(v); }},
    {"sign", fn_sign},
};

const Binary binary_functions[] = {
    {"min", fn_min},
    {"max", fn_max},
    {"pow", [](double a, double b) { return std::pow(a, b); }},
    {"atan2", [](double a, double b) { return std::atan2(a, b); }},
};

class Parser
{
public:
  Parser(const std::string& text, bool have_domain) : s_(text), have_domain_(have_domain) {}

  NodePtr parse()
  {
    NodePtr n = comparison();
    skip();
    if (pos_ != s_.size())
      throw ExpressionError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
    return n;
  }

  bool uses_dist = false;
  bool constant = true;

private:
  static NodePtr make(Op op, std::vector<NodePtr> args = {})
  {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->args = std::move(args);
    return n;
  }

  void skip()
  {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool accept(const char* token)
  {
    skip();
    const std::size_t len = std::char_traits<char>::length(token);
    if (s_.compare(pos_, len, token) == 0)
    {
      pos_ += len;
      return true;
    }
    return false;
  }

  void expect(char c)
  {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c)
      throw ExpressionError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  NodePtr comparison()
  {
    NodePtr lhs = additive();
    const std::pair<const char*, Op> ops[] = {{"<=", Op::LessEq},   {">=", Op::GreaterEq},
                                              {"==", Op::Equal},    {"!=", Op::NotEqual},
                                              {"<", Op::Less},      {">", Op::Greater}};
    for (const auto& [tok, op] : ops)
      if (accept(tok))
        return make(op, {lhs, additive()});
    return lhs;
  }

  NodePtr additive()
  {
    NodePtr lhs = multiplicative();
    for (;;)
    {
      if (accept("+"))
        lhs = make(Op::Add, {lhs, multiplicative()});
      else if (accept("-"))
        lhs = make(Op::Sub, {lhs, multiplicative()});
      else
        return lhs;
    }
  }

  NodePtr multiplicative()
  {
    NodePtr lhs = unary();
    for (;;)
    {
      if (accept("*"))
        lhs = make(Op::Mul, {lhs, unary()});
      else if (accept("/"))
        lhs = make(Op::Div, {lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary()
  {
    if (accept("-"))
      return make(Op::Neg, {unary()});
    if (accept("+"))
      return unary();
    return power();
  }

  // -a^b parses as -(a^b); the exponent may carry its own sign.
  NodePtr power()
  {
    NodePtr base = primary();
    if (accept("^"))
      return make(Op::Pow, {base, unary()});
    return base;
  }

  NodePtr primary()
  {
    skip();
    if (pos_ >= s_.size())
      throw ExpressionError("unexpected end of expression", pos_);
    const char c = s_[pos_];
    if (c == '(')
    {
      ++pos_;
      NodePtr n = comparison();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return identifier();
    throw ExpressionError(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr number()
  {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin)
      throw ExpressionError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Expression::Node>();
    n->number = v;
    return n;
  }

  std::vector<NodePtr> arguments(const std::string& name, std::size_t count)
  {
    expect('(');
    std::vector<NodePtr> args;
    skip();
    if (count == 0)
    {
      expect(')');
      return args;
    }
    for (std::size_t i = 0; i < count; ++i)
    {
      if (i > 0)
        expect(',');
      args.push_back(comparison());
    }
    skip();
    if (pos_ < s_.size() && s_[pos_] == ',')
      throw ExpressionError(name + " takes " + std::to_string(count) + " argument(s)", pos_);
    expect(')');
    return args;
  }

  NodePtr identifier()
  {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);

    if (name == "x" || name == "y" || name == "r" || name == "phi")
    {
      constant = false;
      return make(name == "x" ? Op::X : name == "y" ? Op::Y : name == "r" ? Op::R : Op::Phi);
    }
    if (name == "pi" || name == "e")
    {
      auto n = std::make_shared<Expression::Node>();
      n->number = name == "pi" ? std::numbers::pi : std::numbers::e;
      return n;
    }
    if (name == "dist")
    {
      if (!have_domain_)
        throw ExpressionError("dist() needs a domain", start);
      arguments(name, 0);
      uses_dist = true;
      constant = false;
      return make(Op::Dist);
    }
    if (name == "ifelse")
      return make(Op::IfElse, arguments(name, 3));
    for (const auto& u : unary_functions)
      if (name == u.name)
      {
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::Call1;
        n->f1 = u.f;
        n->args = arguments(name, 1);
        return n;
      }
    for (const auto& b : binary_functions)
      if (name == b.name)
      {
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::Call2;
        n->f2 = b.f;
        n->args = arguments(name, 2);
        return n;
      }
    throw ExpressionError("unknown identifier '" + name + "'", start);
  }

  const std::string& s_;
  bool have_domain_;
  std::size_t pos_ = 0;
};

} // namespace

//-----------------------------------------------------------------------------
Expression Expression::parse(const std::string& text, const std::optional<Domain>& domain)
{
  Parser parser(text, domain.has_value());
  Expression e;
  e.root_ = parser.parse();
  e.text_ = text;
  e.domain_ = domain;
  e.uses_dist_ = parser.uses_dist;
  e.constant_ = parser.constant;
  return e;
}
//-----------------------------------------------------------------------------
double Expression::operator()(const Vec2& p) const
{
  if (!root_)
    throw std::logic_error("Expression: evaluating an empty expression");
  return evaluate(*root_, p, domain_ ? &*domain_ : nullptr);
}
//-----------------------------------------------------------------------------
ScalarField Expression::field() const
{
  Expression copy = *this;
  return [copy](const Vec2& p) { return copy(p); };
}

} // namespace obstacle
