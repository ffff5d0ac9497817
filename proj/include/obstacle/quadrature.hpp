#pragma once

#include "obstacle/geometry.hpp"

#include <array>
#include <vector>

namespace obstacle
{

/// Quadrature on the unit interval [0, 1]; weights sum to one.
struct LineRule
{
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Quadrature on the reference triangle in barycentric coordinates; weights
/// sum to one, so integrals over T are |T| * sum_i w_i f(x_i).
struct TriangleRule
{
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// n-point Gauss-Legendre rule mapped to [0, 1], exact to degree 2n - 1.
LineRule gauss_line(int n);

/// 7-point degree-5 rule (Dunavant).
TriangleRule dunavant5();

/// Collapsed (Duffy) tensor product of Gauss-Legendre rules with n points per
/// direction; exact for polynomials of degree 2n - 2.
TriangleRule conical_product(int n);

/// Applies `levels` uniform red subdivisions to the reference triangle and
/// places `base` on every sub-triangle.
TriangleRule composite(const TriangleRule& base, int levels);

/// Default rule for data integration.
inline TriangleRule default_rule() { return dunavant5(); }

/// Degree-10 rule used for error norms against non-polynomial data.
inline TriangleRule high_order_rule() { return conical_product(6); }

/// Map barycentric coordinates to a physical point.
inline Vec2 map_point(const std::array<Vec2, 3>& v,
                      const std::array<double, 3>& b)
{
  return b[0] * v[0] + b[1] * v[1] + b[2] * v[2];
}

/// Integral of f over the triangle with the given vertices.
template <class F>
double integrate_triangle(const std::array<Vec2, 3>& v, const TriangleRule& rule,
                          F&& f)
{
  const double area = 0.5 * std::abs(cross(v[1] - v[0], v[2] - v[0]));
  double s = 0.0;
  for (std::size_t q = 0; q < rule.weights.size(); ++q)
    s += rule.weights[q] * f(map_point(v, rule.points[q]));
  return area * s;
}

/// Integral of f along the segment [a, b].
template <class F>
double integrate_segment(const Vec2& a, const Vec2& b, const LineRule& rule,
                         F&& f)
{
  double s = 0.0;
  for (std::size_t q = 0; q < rule.weights.size(); ++q)
  {
    const double t = rule.points[q];
    s += rule.weights[q] * f((1.0 - t) * a + t * b);
  }
  return norm(b - a) * s;
}

} // namespace obstacle
