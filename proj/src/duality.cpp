#include "obstacle/duality.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace obstacle
{

//-----------------------------------------------------------------------------
double ExtendedReal::value() const
{
  if (kind_ != Kind::Finite)
    throw std::domain_error("ExtendedReal: value of an infinite quantity");
  return value_;
}
//-----------------------------------------------------------------------------
ExtendedReal operator-(const ExtendedReal& a, const ExtendedReal& b)
{
  using K = ExtendedReal::Kind;
  if (a.kind_ == K::Finite && b.kind_ == K::Finite)
    return ExtendedReal(a.value_ - b.value_);
  if (a.kind_ == b.kind_)
    throw std::domain_error("ExtendedReal: indeterminate difference");
  if (a.kind_ == K::PlusInfinity || b.kind_ == K::MinusInfinity)
    return ExtendedReal::plus_infinity();
  return ExtendedReal::minus_infinity();
}
//-----------------------------------------------------------------------------
bool operator<=(const ExtendedReal& a, const ExtendedReal& b)
{
  using K = ExtendedReal::Kind;
  if (a.kind_ == K::MinusInfinity || b.kind_ == K::PlusInfinity)
    return true;
  if (a.kind_ == K::PlusInfinity || b.kind_ == K::MinusInfinity)
    return false;
  return a.value_ <= b.value_;
}
//-----------------------------------------------------------------------------
std::ostream& operator<<(std::ostream& os, const ExtendedReal& x)
{
  switch (x.kind_)
  {
  case ExtendedReal::Kind::PlusInfinity:
    return os << "+inf";
  case ExtendedReal::Kind::MinusInfinity:
    return os << "-inf";
  default:
    return os << x.value_;
  }
}
//-----------------------------------------------------------------------------
namespace
{
// Sign tolerance for div y + f_h, scaled by the round-off of the flux sum.
double divergence_tolerance(const Rt0Function& y, int t, double f)
{
  const Mesh& mesh = *y.mesh;
  const auto& e = mesh.element(t);
  double s = 0.0;
  for (int k = 0; k < 3; ++k)
    s += std::abs(y.flux[e.sides[k]]) * mesh.side(e.sides[k]).length;
  return 1e-10 * (1.0 + std::abs(f) + s / e.area);
}
} // namespace
//-----------------------------------------------------------------------------
DualField marini_flux(const CrFunction& u, const P0Function& lambda, const P0Function& f_h)
{
  const Mesh& mesh = *u.mesh;
  auto z = [&](int t, const Vec2& x) {
    const auto& e = mesh.element(t);
    return u.gradient(t) + 0.5 * (lambda.values[t] - f_h.values[t]) * (x - e.barycenter);
  };

  DualField d;
  d.rt = Rt0Function(mesh);
  double fmax = 0.0;
  for (int s = 0; s < mesh.num_sides(); ++s)
  {
    const auto& sd = mesh.side(s);
    d.rt.flux[s] = dot(z(sd.elements[0], sd.midpoint), sd.normal);
    fmax = std::max(fmax, std::abs(d.rt.flux[s]));
  }
  for (int s = 0; s < mesh.num_sides(); ++s)
  {
    const auto& sd = mesh.side(s);
    if (sd.elements[1] < 0)
      continue;
    const double other = dot(z(sd.elements[1], sd.midpoint), sd.normal);
    d.max_jump = std::max(d.max_jump, std::abs(other - d.rt.flux[s]));
  }
  if (d.max_jump > 1e-10 * (1.0 + fmax))
  {
    std::ostringstream os;
    os << "marini_flux: normal flux jump " << d.max_jump
       << " exceeds tolerance; (u, lambda) is not a discrete solution";
    throw std::runtime_error(os.str());
  }

  d.div = P0Function(mesh);
  d.pi0.resize(mesh.num_elements());
  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    d.div.values[t] = d.rt.divergence(t);
    d.pi0[t] = d.rt.mean(t);
  }
  return d;
}
//-----------------------------------------------------------------------------
ExtendedReal energy_primal_discrete(const CrFunction& v, const P0Function& f_h,
                                    const P0Function& chi_h, double tol)
{
  const Mesh& mesh = *v.mesh;
  double e = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    const double a = mesh.element(t).area;
    const double m = v.mean(t);
    if (m < chi_h.values[t] - tol * (1.0 + std::abs(chi_h.values[t])))
      return ExtendedReal::plus_infinity();
    e += 0.5 * a * norm2(v.gradient(t)) - f_h.values[t] * m * a;
  }
  return e;
}
//-----------------------------------------------------------------------------
ExtendedReal energy_dual_discrete(const Rt0Function& y, const P0Function& f_h,
                                  const P0Function& chi_h, const CrFunction* dirichlet)
{
  const Mesh& mesh = *y.mesh;
  double e = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    const double a = mesh.element(t).area;
    const double r = y.divergence(t) + f_h.values[t];
    if (r > divergence_tolerance(y, t, f_h.values[t]))
      return ExtendedReal::minus_infinity();
    e += -0.5 * a * norm2(y.mean(t)) - r * chi_h.values[t] * a;
  }
  if (dirichlet)
    for (int s = 0; s < mesh.num_sides(); ++s)
    {
      const auto& sd = mesh.side(s);
      if (sd.label == BoundaryLabel::Dirichlet)
        e += y.flux[s] * sd.length * dirichlet->values[s];
    }
  return e;
}
//-----------------------------------------------------------------------------
double energy_primal_continuous(const ConformingField& v, const ProblemData& data,
                                const TriangleRule& rule)
{
  double e = 0.0;
  for (int t = 0; t < v.mesh->num_elements(); ++t)
    e += integrate_field(v, t, rule, [&](const Vec2& x, double val, const Vec2& g) {
      return 0.5 * norm2(g) - data.f(x) * val;
    });
  return e;
}
//-----------------------------------------------------------------------------
double energy_primal_continuous(const Mesh& mesh, const ScalarField& u,
                                const VectorField& grad_u, const ProblemData& data,
                                const TriangleRule& rule)
{
  double e = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t)
    e += integrate_triangle(mesh.coords(t), rule, [&](const Vec2& x) {
      return 0.5 * norm2(grad_u(x)) - data.f(x) * u(x);
    });
  return e;
}
//-----------------------------------------------------------------------------
ExtendedReal energy_dual_continuous(const DualField& y, const ProblemData& data,
                                    const P0Function& f_h, const TriangleRule& rule,
                                    const LineRule& line)
{
  const Mesh& mesh = *y.rt.mesh;
  double e = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    const double div = y.div.values[t];
    if (div + f_h.values[t] > divergence_tolerance(y.rt, t, f_h.values[t]))
      return ExtendedReal::minus_infinity();
    e += integrate_triangle(mesh.coords(t), rule, [&](const Vec2& x) {
      return -0.5 * norm2(y.rt.value(t, x)) - (div + data.f(x)) * data.chi(x);
    });
  }
  if (data.dirichlet)
    for (int s = 0; s < mesh.num_sides(); ++s)
    {
      const auto& sd = mesh.side(s);
      if (sd.label != BoundaryLabel::Dirichlet)
        continue;
      e += y.rt.flux[s] * integrate_segment(mesh.vertex(sd.vertices[0]),
                                            mesh.vertex(sd.vertices[1]), line,
                                            data.dirichlet);
    }
  return e;
}

} // namespace obstacle
