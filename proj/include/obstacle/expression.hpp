#pragma once

#include "obstacle/geometry.hpp"
#include "obstacle/mesh.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace obstacle
{

class ExpressionError : public std::runtime_error
{
public:
  ExpressionError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position)
  {
  }
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/// Scalar expression in x and y.
///
/// Variables: x, y, r (|x|), phi (polar angle in [0, 2 pi)).
/// Constants: pi, e.
/// Operators: + - * / ^ (right associative), unary -, < <= > >= == !=
/// (yielding 0 or 1).
/// Functions: sin cos tan atan exp ln log sqrt abs sign floor min max pow
/// atan2 ifelse(c, a, b) dist() (distance to the domain boundary, only when
/// a domain is attached).
class Expression
{
public:
  struct Node;

  Expression() = default;
  static Expression parse(const std::string& text,
                          const std::optional<Domain>& domain = std::nullopt);

  double operator()(const Vec2& p) const;
  ScalarField field() const;
  const std::string& text() const { return text_; }
  bool uses_dist() const { return uses_dist_; }
  /// True when the expression does not reference x, y, r, phi or dist.
  bool is_constant() const { return constant_; }

private:
  std::string text_;
  std::shared_ptr<const Node> root_;
  std::optional<Domain> domain_;
  bool uses_dist_ = false;
  bool constant_ = true;
};

} // namespace obstacle
