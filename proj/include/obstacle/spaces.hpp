#pragma once

#include "obstacle/mesh.hpp"
#include "obstacle/quadrature.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace obstacle
{

/// Crouzeix-Raviart function: one value per side (at the side midpoint).
/// The mesh must outlive the function.
struct CrFunction
{
  const Mesh* mesh = nullptr;
  std::vector<double> values;

  CrFunction() = default;
  explicit CrFunction(const Mesh& m, double value = 0.0)
      : mesh(&m), values(m.num_sides(), value)
  {
  }
  CrFunction(const Mesh& m, std::vector<double> v) : mesh(&m), values(std::move(v)) {}

  /// Value of the affine restriction to T at x (x is not checked).
  double value(int t, const Vec2& x) const;
  /// Barycenter value, i.e. the mean of the three side values.
  double mean(int t) const;
  Vec2 gradient(int t) const;
};

/// Piecewise constant function.
struct P0Function
{
  const Mesh* mesh = nullptr;
  std::vector<double> values;

  P0Function() = default;
  explicit P0Function(const Mesh& m, double value = 0.0)
      : mesh(&m), values(m.num_elements(), value)
  {
  }
  P0Function(const Mesh& m, std::vector<double> v) : mesh(&m), values(std::move(v)) {}
};

/// Element-wise gradient field.
struct PiecewiseGradient
{
  const Mesh* mesh = nullptr;
  std::vector<Vec2> values;
};

/// Lowest order Raviart-Thomas field; flux[s] is the normal component along
/// n_S (constant on S).
struct Rt0Function
{
  const Mesh* mesh = nullptr;
  std::vector<double> flux;

  Rt0Function() = default;
  explicit Rt0Function(const Mesh& m) : mesh(&m), flux(m.num_sides(), 0.0) {}

  Vec2 value(int t, const Vec2& x) const;
  double divergence(int t) const;
  /// Element average, equal to the value at the barycenter.
  Vec2 mean(int t) const { return value(t, mesh->element(t).barycenter); }
  /// Component along n_S of T's restriction at x, S being local side i.
  double normal_trace(int t, int local, const Vec2& x) const;
};

/// Continuous piecewise affine function stored at the vertices.
struct NodalP1
{
  const Mesh* mesh = nullptr;
  std::vector<double> values;

  double value(int t, const Vec2& x) const;
  Vec2 gradient(int t) const;
  /// Exact CR representation (midpoint values).
  CrFunction to_cr() const;
};

/// Conforming, element-wise piecewise smooth function. `pieces` optionally
/// splits an element into sub-triangles on which the function is smooth.
struct ConformingField
{
  const Mesh* mesh = nullptr;
  std::function<double(int, const Vec2&)> value;
  std::function<Vec2(int, const Vec2&)> gradient;
  std::function<std::vector<std::array<Vec2, 3>>(int)> pieces;

  std::vector<std::array<Vec2, 3>> split(int t) const
  {
    return pieces ? pieces(t) : std::vector<std::array<Vec2, 3>>{mesh->coords(t)};
  }
};

/// Integral over T of g(x, v(x), grad v(x)), honouring the pieces of v.
template <class G>
double integrate_field(const ConformingField& v, int t, const TriangleRule& rule, G&& g)
{
  double s = 0.0;
  for (const auto& piece : v.split(t))
    s += integrate_triangle(piece, rule, [&](const Vec2& x) {
      return g(x, v.value(t, x), v.gradient(t, x));
    });
  return s;
}

/// CR basis evaluation: sum_S v_S phi_S(x) for x in T; throws when x is
/// outside T.
double eval_cr(const CrFunction& v, int t, const Vec2& x);

PiecewiseGradient gradient_h(const CrFunction& v);

P0Function project_p0(const Mesh& mesh, const ScalarField& f,
                      const TriangleRule& rule = default_rule());
P0Function project_p0(const CrFunction& v);
P0Function project_p0(const P0Function& v);

/// Side averages of v.
CrFunction interp_cr(const Mesh& mesh, const ScalarField& v,
                     const LineRule& rule = gauss_line(2));

/// Side averages of the normal component of y.
Rt0Function interp_rt(const Mesh& mesh, const VectorField& y,
                      const LineRule& rule = gauss_line(2));

/// Node averaging. Vertices on Dirichlet sides take `dirichlet(z)`, or zero
/// when no boundary function is given.
NodalP1 interp_av(const CrFunction& v, const ScalarField& dirichlet = {});

/// Jump v|T+ - v|T- along S at the two side endpoints. Boundary sides
/// return the trace of the single neighbour.
std::pair<double, double> jump(const CrFunction& v, int s);
/// Jump of the normal component y.n_S at the two endpoints.
std::pair<double, double> jump_normal(const Rt0Function& y, int s);
/// Jump of the normal component of a piecewise constant vector field.
double jump_normal(const PiecewiseGradient& g, int s);

/// Element values of the CR basis function phi_S on T at x, with phi_S
/// associated with local side i: 1 - 2 lambda_i.
inline double cr_basis(const std::array<double, 3>& lambda, int i)
{
  return 1.0 - 2.0 * lambda[i];
}

} // namespace obstacle
