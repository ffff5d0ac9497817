#pragma once

#include "obstacle/assembly.hpp"
#include "obstacle/mesh.hpp"
#include "obstacle/spaces.hpp"

#include <cmath>
#include <random>
#include <set>

namespace testing
{

using namespace obstacle;

inline Mesh unit_square(int n = 1, const BoundaryRule& rule = {})
{
  return build_structured(Domain::rectangle(0.0, 1.0, 0.0, 1.0), n, rule);
}

/// Unit square with both diagonals: 4 elements, no bipartite dual graph
/// after one refinement.
inline Mesh criss_cross(int n = 1)
{
  return build_structured(Domain::rectangle(0.0, 1.0, 0.0, 1.0), n, {},
                          DiagonalPattern::CrissCross);
}

/// Interior vertices are moved randomly by up to `amount` times the
/// smallest side length; boundary labels are kept.
inline Mesh jiggle(const Mesh& m, double amount, std::mt19937& rng)
{
  std::uniform_real_distribution<double> d(-amount, amount);
  std::vector<Vec2> v = m.vertices();
  const double h = m.h_min();
  for (int i = 0; i < m.num_vertices(); ++i)
  {
    bool boundary = false;
    for (const auto& s : m.sides())
      if (s.is_boundary() && (s.vertices[0] == i || s.vertices[1] == i))
        boundary = true;
    if (!boundary)
      v[i] = v[i] + Vec2{d(rng) * h, d(rng) * h};
  }
  std::vector<std::array<int, 3>> tris;
  for (const auto& e : m.elements())
    tris.push_back(e.vertices);
  EdgeLabelMap labels;
  for (const auto& s : m.sides())
    if (s.is_boundary())
      labels[edge_key(s.vertices[0], s.vertices[1])] = s.label;
  return Mesh(v, tris, labels);
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937& rng, double lo = -1.0,
                                         double hi = 1.0)
{
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v)
    x = d(rng);
  return v;
}

/// Random CR function, zero on Dirichlet sides.
inline CrFunction random_cr(const Mesh& m, std::mt19937& rng)
{
  CrFunction v(m, random_vector(m.num_sides(), rng));
  for (int s = 0; s < m.num_sides(); ++s)
    if (m.side(s).label == BoundaryLabel::Dirichlet)
      v.values[s] = 0.0;
  return v;
}

/// Random RT0 function, zero flux on Neumann sides.
inline Rt0Function random_rt(const Mesh& m, std::mt19937& rng)
{
  Rt0Function y(m);
  y.flux = random_vector(m.num_sides(), rng);
  for (int s = 0; s < m.num_sides(); ++s)
    if (m.side(s).label == BoundaryLabel::Neumann)
      y.flux[s] = 0.0;
  return y;
}

inline Vec2 random_point_in(const Mesh& m, int t, std::mt19937& rng)
{
  std::uniform_real_distribution<double> d(0.05, 1.0);
  double a = d(rng), b = d(rng), c = d(rng);
  const double s = a + b + c;
  const auto v = m.coords(t);
  return (a / s) * v[0] + (b / s) * v[1] + (c / s) * v[2];
}

} // namespace testing
