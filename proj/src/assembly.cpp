#include "obstacle/assembly.hpp"

#include <sstream>
#include <stdexcept>

namespace obstacle
{

//-----------------------------------------------------------------------------
Vec2 ProblemData::chi_gradient(const Vec2& x) const
{
  if (grad_chi)
    return grad_chi(x);
  const double h = 1e-6;
  return {(chi(x + Vec2{h, 0}) - chi(x - Vec2{h, 0})) / (2 * h),
          (chi(x + Vec2{0, h}) - chi(x - Vec2{0, h})) / (2 * h)};
}
//-----------------------------------------------------------------------------
void validate(const ProblemData& data, const Mesh& mesh, double tol)
{
  if (!data.f || !data.chi)
    throw std::invalid_argument("problem data: f and chi are required");
  for (const auto& s : mesh.sides())
  {
    if (s.label != BoundaryLabel::Dirichlet)
      continue;
    const double c = data.chi(s.midpoint), g = data.g(s.midpoint);
    if (c > g + tol)
    {
      std::ostringstream os;
      os << "problem data: obstacle above Dirichlet data at (" << s.midpoint.x << ", "
         << s.midpoint.y << ")";
      throw std::invalid_argument(os.str());
    }
  }
}
//-----------------------------------------------------------------------------
DofMap make_dofmap(const Mesh& mesh)
{
  DofMap d;
  d.side_to_dof.assign(mesh.num_sides(), -1);
  for (int s = 0; s < mesh.num_sides(); ++s)
  {
    if (mesh.side(s).label == BoundaryLabel::Dirichlet)
      continue;
    d.side_to_dof[s] = d.num_dofs();
    d.dof_to_side.push_back(s);
  }
  d.elem_to_mult.resize(mesh.num_elements());
  d.mult_to_elem.resize(mesh.num_elements());
  for (int t = 0; t < mesh.num_elements(); ++t)
    d.elem_to_mult[t] = d.mult_to_elem[t] = t;
  return d;
}
//-----------------------------------------------------------------------------
void exclude_elements(DofMap& dofs, const std::vector<int>& elements)
{
  for (int t : elements)
  {
    if (dofs.elem_to_mult.at(t) < 0)
      continue;
    dofs.elem_to_mult[t] = -1;
    dofs.excluded.push_back(t);
  }
  dofs.mult_to_elem.clear();
  for (std::size_t t = 0; t < dofs.elem_to_mult.size(); ++t)
  {
    if (dofs.elem_to_mult[t] < 0)
      continue;
    dofs.elem_to_mult[t] = dofs.num_multipliers();
    dofs.mult_to_elem.push_back(static_cast<int>(t));
  }
}

namespace
{
// 4 |T| grad(lambda_i) . grad(lambda_j)
std::array<std::array<double, 3>, 3> local_stiffness(const Mesh& mesh, int t)
{
  const auto g = mesh.barycentric_gradients(t);
  const double a = mesh.element(t).area;
  std::array<std::array<double, 3>, 3> k{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      k[i][j] = 4.0 * a * dot(g[i], g[j]);
  return k;
}
} // namespace

//-----------------------------------------------------------------------------
CsrMatrix assemble_stiffness_full(const Mesh& mesh)
{
  std::vector<Triplet> t;
  t.reserve(9 * mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e)
  {
    const auto k = local_stiffness(mesh, e);
    const auto& s = mesh.element(e).sides;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        t.push_back({s[i], s[j], k[i][j]});
  }
  CsrMatrix m = CsrMatrix::from_triplets(mesh.num_sides(), mesh.num_sides(), std::move(t));
  m.set_symmetric(true);
  return m;
}
//-----------------------------------------------------------------------------
CsrMatrix assemble_stiffness(const Mesh& mesh, const DofMap& dofs)
{
  std::vector<Triplet> t;
  t.reserve(9 * mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e)
  {
    const auto k = local_stiffness(mesh, e);
    const auto& s = mesh.element(e).sides;
    for (int i = 0; i < 3; ++i)
    {
      const int di = dofs.side_to_dof[s[i]];
      if (di < 0)
        continue;
      for (int j = 0; j < 3; ++j)
      {
        const int dj = dofs.side_to_dof[s[j]];
        if (dj >= 0)
          t.push_back({di, dj, k[i][j]});
      }
    }
  }
  CsrMatrix m = CsrMatrix::from_triplets(dofs.num_dofs(), dofs.num_dofs(), std::move(t));
  m.set_symmetric(true);
  return m;
}
//-----------------------------------------------------------------------------
CsrMatrix assemble_coupling(const Mesh& mesh, const DofMap& dofs)
{
  std::vector<Triplet> t;
  t.reserve(3 * mesh.num_elements());
  for (int j = 0; j < dofs.num_multipliers(); ++j)
  {
    const int e = dofs.mult_to_elem[j];
    const double w = mesh.element(e).area / 3.0;
    for (int s : mesh.element(e).sides)
    {
      const int d = dofs.side_to_dof[s];
      if (d >= 0)
        t.push_back({d, j, w});
    }
  }
  return CsrMatrix::from_triplets(dofs.num_dofs(), dofs.num_multipliers(), std::move(t));
}
//-----------------------------------------------------------------------------
std::vector<int> find_excluded_elements(const CsrMatrix& coupling, const DofMap& dofs)
{
  std::vector<char> nonzero(coupling.cols(), 0);
  for (int k = 0; k < coupling.nnz(); ++k)
    if (coupling.values()[k] != 0.0)
      nonzero[coupling.indices()[k]] = 1;
  std::vector<int> zero;
  for (int j = 0; j < coupling.cols(); ++j)
    if (!nonzero[j])
      zero.push_back(dofs.mult_to_elem[j]);
  return zero;
}
//-----------------------------------------------------------------------------
ObstacleVectors assemble_obstacle_vectors(const Mesh& mesh, const ProblemData& data,
                                          const DofMap& dofs, const LineRule& rule)
{
  ObstacleVectors o;
  o.icr_chi = interp_cr(mesh, data.chi, rule);
  o.chi_h = project_p0(o.icr_chi);
  o.X.resize(dofs.num_dofs());
  for (int d = 0; d < dofs.num_dofs(); ++d)
    o.X[d] = o.icr_chi.values[dofs.dof_to_side[d]];
  return o;
}
//-----------------------------------------------------------------------------
LoadVectors assemble_load(const Mesh& mesh, const ProblemData& data, const DofMap& dofs,
                          const TriangleRule& rule)
{
  LoadVectors l;
  l.f_h = project_p0(mesh, data.f, rule);
  l.F.resize(mesh.num_elements());
  l.rhs = Vector::Zero(dofs.num_dofs());
  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    l.F[t] = l.f_h.values[t] * mesh.element(t).area;
    for (int s : mesh.element(t).sides)
    {
      const int d = dofs.side_to_dof[s];
      if (d >= 0)
        l.rhs[d] += l.F[t] / 3.0;
    }
  }
  return l;
}
//-----------------------------------------------------------------------------
Oscillation osc(const Mesh& mesh, const ProblemData& data, const P0Function& f_h,
                const TriangleRule& rule)
{
  Oscillation o;
  o.element.resize(mesh.num_elements());
  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    const double fh = f_h.values[t];
    const double h = mesh.element(t).diameter;
    const double v = data.f_piecewise_constant
                         ? 0.0
                         : integrate_triangle(mesh.coords(t), rule, [&](const Vec2& x) {
                             const double d = data.f(x) - fh;
                             return d * d;
                           });
    o.element[t] = h * h * v;
    o.total += o.element[t];
  }
  return o;
}
//-----------------------------------------------------------------------------
CrFunction DiscreteProblem::expand(const Vector& U) const
{
  CrFunction u = dirichlet;
  for (int d = 0; d < dofs.num_dofs(); ++d)
    u.values[dofs.dof_to_side[d]] = U[d];
  return u;
}
//-----------------------------------------------------------------------------
P0Function DiscreteProblem::expand_multiplier(const Vector& L) const
{
  P0Function l(*mesh);
  for (int j = 0; j < dofs.num_multipliers(); ++j)
    l.values[dofs.mult_to_elem[j]] = L[j];
  return l;
}
//-----------------------------------------------------------------------------
double DiscreteProblem::mean(const Vector& U, int j) const
{
  const int t = dofs.mult_to_elem[j];
  double s = 0.0;
  for (int side : mesh->element(t).sides)
  {
    const int d = dofs.side_to_dof[side];
    s += d >= 0 ? U[d] : dirichlet.values[side];
  }
  return s / 3.0;
}
//-----------------------------------------------------------------------------
Vector DiscreteProblem::restrict(const CrFunction& v) const
{
  Vector r(dofs.num_dofs());
  for (int d = 0; d < dofs.num_dofs(); ++d)
    r[d] = v.values[dofs.dof_to_side[d]];
  return r;
}
//-----------------------------------------------------------------------------
DiscreteProblem assemble(const Mesh& mesh, const ProblemData& data, const TriangleRule& rule)
{
  validate(data, mesh);
  DiscreteProblem p;
  p.mesh = &mesh;
  p.data = &data;
  p.dofs = make_dofmap(mesh);
  {
    const CsrMatrix full = assemble_coupling(mesh, p.dofs);
    exclude_elements(p.dofs, find_excluded_elements(full, p.dofs));
  }
  p.stiffness = assemble_stiffness(mesh, p.dofs);
  p.coupling = assemble_coupling(mesh, p.dofs);
  p.obstacle = assemble_obstacle_vectors(mesh, data, p.dofs);
  p.load = assemble_load(mesh, data, p.dofs, rule);

  // Dirichlet values are side averages of g, like I_cr.
  p.dirichlet = CrFunction(mesh);
  bool lifted = false;
  if (data.dirichlet)
  {
    const CrFunction g = interp_cr(mesh, data.dirichlet);
    for (int s = 0; s < mesh.num_sides(); ++s)
      if (p.dofs.side_to_dof[s] < 0)
      {
        p.dirichlet.values[s] = g.values[s];
        lifted = lifted || g.values[s] != 0.0;
      }
  }
  p.rhs = p.load.rhs;
  if (lifted)
  {
    for (int e = 0; e < mesh.num_elements(); ++e)
    {
      const auto& s = mesh.element(e).sides;
      const auto gr = mesh.barycentric_gradients(e);
      const double a = mesh.element(e).area;
      for (int i = 0; i < 3; ++i)
      {
        const int di = p.dofs.side_to_dof[s[i]];
        if (di < 0)
          continue;
        for (int j = 0; j < 3; ++j)
          if (p.dofs.side_to_dof[s[j]] < 0)
            p.rhs[di] -= 4.0 * a * dot(gr[i], gr[j]) * p.dirichlet.values[s[j]];
      }
    }
  }
  return p;
}

} // namespace obstacle
