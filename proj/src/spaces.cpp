#include "obstacle/spaces.hpp"

#include <stdexcept>

namespace obstacle
{

//-----------------------------------------------------------------------------
double CrFunction::value(int t, const Vec2& x) const
{
  const auto lam = mesh->barycentric(t, x);
  const auto& s = mesh->element(t).sides;
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    r += values[s[i]] * cr_basis(lam, i);
  return r;
}
//-----------------------------------------------------------------------------
double CrFunction::mean(int t) const
{
  const auto& s = mesh->element(t).sides;
  return (values[s[0]] + values[s[1]] + values[s[2]]) / 3.0;
}
//-----------------------------------------------------------------------------
Vec2 CrFunction::gradient(int t) const
{
  const auto g = mesh->barycentric_gradients(t);
  const auto& s = mesh->element(t).sides;
  Vec2 r;
  for (int i = 0; i < 3; ++i)
    r -= 2.0 * values[s[i]] * g[i];
  return r;
}
//-----------------------------------------------------------------------------
Vec2 Rt0Function::value(int t, const Vec2& x) const
{
  const auto& e = mesh->element(t);
  Vec2 r;
  for (int i = 0; i < 3; ++i)
  {
    const int s = e.sides[i];
    const double c = mesh->side_sign(t, i) * flux[s] * mesh->side(s).length
                     / (2.0 * e.area);
    r += c * (x - mesh->vertex(e.vertices[i]));
  }
  return r;
}
//-----------------------------------------------------------------------------
double Rt0Function::divergence(int t) const
{
  const auto& e = mesh->element(t);
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
  {
    const int s = e.sides[i];
    d += mesh->side_sign(t, i) * flux[s] * mesh->side(s).length;
  }
  return d / e.area;
}
//-----------------------------------------------------------------------------
double Rt0Function::normal_trace(int t, int local, const Vec2& x) const
{
  const int s = mesh->element(t).sides[local];
  return dot(value(t, x), mesh->side(s).normal);
}
//-----------------------------------------------------------------------------
double NodalP1::value(int t, const Vec2& x) const
{
  const auto lam = mesh->barycentric(t, x);
  const auto& v = mesh->element(t).vertices;
  return lam[0] * values[v[0]] + lam[1] * values[v[1]] + lam[2] * values[v[2]];
}
//-----------------------------------------------------------------------------
Vec2 NodalP1::gradient(int t) const
{
  const auto g = mesh->barycentric_gradients(t);
  const auto& v = mesh->element(t).vertices;
  return values[v[0]] * g[0] + values[v[1]] * g[1] + values[v[2]] * g[2];
}
//-----------------------------------------------------------------------------
CrFunction NodalP1::to_cr() const
{
  CrFunction r(*mesh);
  for (int s = 0; s < mesh->num_sides(); ++s)
  {
    const auto& sd = mesh->side(s);
    r.values[s] = 0.5 * (values[sd.vertices[0]] + values[sd.vertices[1]]);
  }
  return r;
}
//-----------------------------------------------------------------------------
double eval_cr(const CrFunction& v, int t, const Vec2& x)
{
  const auto lam = v.mesh->barycentric(t, x);
  for (double l : lam)
    if (l < -1e-10)
      throw std::out_of_range("eval_cr: point outside element");
  return v.value(t, x);
}
//-----------------------------------------------------------------------------
PiecewiseGradient gradient_h(const CrFunction& v)
{
  PiecewiseGradient g{v.mesh, std::vector<Vec2>(v.mesh->num_elements())};
  for (int t = 0; t < v.mesh->num_elements(); ++t)
    g.values[t] = v.gradient(t);
  return g;
}
//-----------------------------------------------------------------------------
P0Function project_p0(const Mesh& mesh, const ScalarField& f, const TriangleRule& rule)
{
  P0Function r(mesh);
  for (int t = 0; t < mesh.num_elements(); ++t)
    r.values[t] = integrate_triangle(mesh.coords(t), rule, f) / mesh.element(t).area;
  return r;
}
//-----------------------------------------------------------------------------
P0Function project_p0(const CrFunction& v)
{
  P0Function r(*v.mesh);
  for (int t = 0; t < v.mesh->num_elements(); ++t)
    r.values[t] = v.mean(t);
  return r;
}
//-----------------------------------------------------------------------------
P0Function project_p0(const P0Function& v) { return v; }
//-----------------------------------------------------------------------------
CrFunction interp_cr(const Mesh& mesh, const ScalarField& v, const LineRule& rule)
{
  CrFunction r(mesh);
  for (int s = 0; s < mesh.num_sides(); ++s)
  {
    const auto& sd = mesh.side(s);
    r.values[s] = integrate_segment(mesh.vertex(sd.vertices[0]),
                                    mesh.vertex(sd.vertices[1]), rule, v)
                  / sd.length;
  }
  return r;
}
//-----------------------------------------------------------------------------
Rt0Function interp_rt(const Mesh& mesh, const VectorField& y, const LineRule& rule)
{
  Rt0Function r(mesh);
  for (int s = 0; s < mesh.num_sides(); ++s)
  {
    const auto& sd = mesh.side(s);
    const Vec2 n = sd.normal;
    r.flux[s] = integrate_segment(mesh.vertex(sd.vertices[0]),
                                  mesh.vertex(sd.vertices[1]), rule,
                                  [&](const Vec2& x) { return dot(y(x), n); })
                / sd.length;
  }
  return r;
}
//-----------------------------------------------------------------------------
NodalP1 interp_av(const CrFunction& v, const ScalarField& dirichlet)
{
  const Mesh& mesh = *v.mesh;
  NodalP1 r{&mesh, std::vector<double>(mesh.num_vertices(), 0.0)};
  const auto& off = mesh.vertex_element_offsets();
  const auto& idx = mesh.vertex_element_indices();
  for (int z = 0; z < mesh.num_vertices(); ++z)
  {
    if (mesh.is_dirichlet_vertex(z))
    {
      r.values[z] = dirichlet ? dirichlet(mesh.vertex(z)) : 0.0;
      continue;
    }
    double s = 0.0;
    for (int k = off[z]; k < off[z + 1]; ++k)
      s += v.value(idx[k], mesh.vertex(z));
    r.values[z] = s / (off[z + 1] - off[z]);
  }
  return r;
}
//-----------------------------------------------------------------------------
std::pair<double, double> jump(const CrFunction& v, int s)
{
  const Mesh& mesh = *v.mesh;
  const auto& sd = mesh.side(s);
  const Vec2 &p = mesh.vertex(sd.vertices[0]), &q = mesh.vertex(sd.vertices[1]);
  const int tm = sd.elements[0], tp = sd.elements[1];
  if (tp < 0)
    return {v.value(tm, p), v.value(tm, q)};
  return {v.value(tp, p) - v.value(tm, p), v.value(tp, q) - v.value(tm, q)};
}
//-----------------------------------------------------------------------------
std::pair<double, double> jump_normal(const Rt0Function& y, int s)
{
  const Mesh& mesh = *y.mesh;
  const auto& sd = mesh.side(s);
  const Vec2 &p = mesh.vertex(sd.vertices[0]), &q = mesh.vertex(sd.vertices[1]);
  const int tm = sd.elements[0], tp = sd.elements[1];
  auto tr = [&](int t, const Vec2& x) { return dot(y.value(t, x), sd.normal); };
  if (tp < 0)
    return {tr(tm, p), tr(tm, q)};
  return {tr(tp, p) - tr(tm, p), tr(tp, q) - tr(tm, q)};
}
//-----------------------------------------------------------------------------
double jump_normal(const PiecewiseGradient& g, int s)
{
  const auto& sd = g.mesh->side(s);
  const int tm = sd.elements[0], tp = sd.elements[1];
  if (tp < 0)
    return dot(g.values[tm], sd.normal);
  return dot(g.values[tp] - g.values[tm], sd.normal);
}

} // namespace obstacle
