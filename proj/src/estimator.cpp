#include "obstacle/estimator.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace obstacle
{

namespace
{
// Clip T along the zero line of the affine function with vertex values d
// and fan-triangulate both parts.
std::vector<std::array<Vec2, 3>> split_by_sign(const std::array<Vec2, 3>& c,
                                               const std::array<double, 3>& d)
{
  const bool has_pos = d[0] > 0 || d[1] > 0 || d[2] > 0;
  const bool has_neg = d[0] < 0 || d[1] < 0 || d[2] < 0;
  if (!(has_pos && has_neg))
    return {c};

  std::vector<std::array<Vec2, 3>> out;
  for (int side = 0; side < 2; ++side)
  {
    const double sign = side == 0 ? 1.0 : -1.0;
    std::vector<Vec2> poly;
    for (int i = 0; i < 3; ++i)
    {
      const int j = (i + 1) % 3;
      if (sign * d[i] >= 0)
        poly.push_back(c[i]);
      if (d[i] * d[j] < 0)
      {
        const double s = d[i] / (d[i] - d[j]);
        poly.push_back((1.0 - s) * c[i] + s * c[j]);
      }
    }
    for (std::size_t k = 1; k + 1 < poly.size(); ++k)
    {
      const std::array<Vec2, 3> tri{poly[0], poly[k], poly[k + 1]};
      if (std::abs(cross(tri[1] - tri[0], tri[2] - tri[0])) > 0.0)
        out.push_back(tri);
    }
  }
  return out;
}
} // namespace

//-----------------------------------------------------------------------------
PostProcessed postprocess_conforming(const CrFunction& u, const ProblemData& data)
{
  PostProcessed r;
  r.averaged = interp_av(u, data.dirichlet);
  const Mesh* mesh = u.mesh;
  // Shared copy keeps the closures valid when PostProcessed is moved.
  auto p1 = std::make_shared<NodalP1>(r.averaged);
  auto chi = data.chi;
  const ProblemData* pd = &data;

  r.v.mesh = mesh;
  r.v.value = [p1, chi](int t, const Vec2& x) { return std::max(p1->value(t, x), chi(x)); };
  r.v.gradient = [p1, chi, pd](int t, const Vec2& x) {
    return chi(x) > p1->value(t, x) ? pd->chi_gradient(x) : p1->gradient(t);
  };
  r.v.pieces = [p1, chi, mesh](int t) {
    const auto c = mesh->coords(t);
    const auto& vs = mesh->element(t).vertices;
    std::array<double, 3> d;
    for (int i = 0; i < 3; ++i)
      d[i] = p1->values[vs[i]] - chi(c[i]);
    return split_by_sign(c, d);
  };
  return r;
}
//-----------------------------------------------------------------------------
std::vector<double> eta_A(const ConformingField& v, const CrFunction& u,
                          const TriangleRule& rule)
{
  std::vector<double> r(v.mesh->num_elements());
  for (int t = 0; t < v.mesh->num_elements(); ++t)
  {
    const Vec2 gu = u.gradient(t);
    r[t] = integrate_field(v, t, rule, [&](const Vec2&, double, const Vec2& g) {
      return norm2(g - gu);
    });
  }
  return r;
}
//-----------------------------------------------------------------------------
std::vector<double> eta_B(const ConformingField& v, const P0Function& lambda,
                          const ProblemData& data, const TriangleRule& rule)
{
  std::vector<double> r(v.mesh->num_elements());
  for (int t = 0; t < v.mesh->num_elements(); ++t)
  {
    const double l = lambda.values[t];
    if (l == 0.0)
    {
      r[t] = 0.0;
      continue;
    }
    r[t] = -l * integrate_field(v, t, rule, [&](const Vec2& x, double val, const Vec2&) {
      return val - data.chi(x);
    });
    if (r[t] < -1e-12)
    {
      std::ostringstream os;
      os << "eta_B: negative contribution " << r[t] << " on element " << t
         << " (v below chi or lambda positive)";
      throw std::runtime_error(os.str());
    }
  }
  return r;
}
//-----------------------------------------------------------------------------
std::vector<double> eta_C(const P0Function& lambda, const P0Function& f_h)
{
  const Mesh& mesh = *lambda.mesh;
  std::vector<double> r(mesh.num_elements());
  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    const auto& e = mesh.element(t);
    const double d = f_h.values[t] - lambda.values[t];
    r[t] = 0.25 * e.diameter * e.diameter * d * d * e.area;
  }
  return r;
}
//-----------------------------------------------------------------------------
std::vector<double> EstimatorBreakdown::indicators() const
{
  std::vector<double> r(eta_A.size());
  for (std::size_t t = 0; t < r.size(); ++t)
    r[t] = eta_A[t] + eta_B[t] + eta_C[t];
  return r;
}
//-----------------------------------------------------------------------------
EstimatorBreakdown estimate(const ConformingField& v, const CrFunction& u,
                            const P0Function& lambda, const P0Function& f_h,
                            const ProblemData& data, const TriangleRule& rule)
{
  EstimatorBreakdown b;
  b.eta_A = eta_A(v, u, rule);
  b.eta_B = eta_B(v, lambda, data, rule);
  b.eta_C = eta_C(lambda, f_h);
  const Oscillation o = osc(*u.mesh, data, f_h, rule);
  b.osc = o.element;
  b.total_osc = o.total;
  for (std::size_t t = 0; t < b.eta_A.size(); ++t)
  {
    b.total_A += b.eta_A[t];
    b.total_B += b.eta_B[t];
    b.total_C += b.eta_C[t];
  }
  b.eta2 = b.total_A + b.total_B + b.total_C;
  return b;
}
//-----------------------------------------------------------------------------
double rho_reduced(const ConformingField& v, const CrFunction& u, const P0Function& lambda,
                   const ProblemData& data, double exact_energy, bool full,
                   const TriangleRule& rule)
{
  double rho = energy_primal_continuous(v, data, rule) - exact_energy;
  if (!full)
    return rho;
  if (!data.exact)
    throw std::invalid_argument("rho_reduced: exact solution required");
  const auto& ex = *data.exact;
  const Mesh& mesh = *u.mesh;
  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    const Vec2 gu = u.gradient(t);
    const double l = lambda.values[t];
    rho += integrate_triangle(mesh.coords(t), rule, [&](const Vec2& x) {
      return norm2(ex.grad_u(x) - gu) - l * (ex.u(x) - data.chi(x));
    });
  }
  return rho;
}
//-----------------------------------------------------------------------------
ExactErrors exact_errors(const CrFunction& u, const DualField& z, const P0Function& lambda,
                         const ExactSolution& exact, const TriangleRule& rule,
                         const LineRule& line)
{
  const Mesh& mesh = *u.mesh;
  const CrFunction icr = interp_cr(mesh, exact.u, line);
  const Rt0Function irt = interp_rt(mesh, exact.grad_u, line);
  ExactErrors e;
  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    const auto c = mesh.coords(t);
    const double a = mesh.element(t).area;
    const Vec2 gu = u.gradient(t);
    e.e_u += integrate_triangle(c, rule, [&](const Vec2& x) {
      return norm2(gu - exact.grad_u(x));
    });
    e.e_Icru += a * norm2(gu - icr.gradient(t));
    e.e_z += integrate_triangle(c, rule, [&](const Vec2& x) {
      return norm2(z.rt.value(t, x) - exact.grad_u(x));
    });
    e.e_Irtz += a * norm2(z.pi0[t] - irt.mean(t));
    const double l = lambda.values[t];
    if (l != 0.0)
    {
      const double int_u = integrate_triangle(c, rule, exact.u);
      e.e_lambda_u += -l * (int_u - a * u.mean(t));
      e.e_lambda_Icru += -l * a * (icr.mean(t) - u.mean(t));
    }
  }
  e.e_u = std::sqrt(e.e_u);
  e.e_Icru = std::sqrt(e.e_Icru);
  e.e_z = std::sqrt(e.e_z);
  e.e_Irtz = std::sqrt(e.e_Irtz);
  e.tot_u = e.e_lambda_u + e.e_u;
  e.tot_Icru = e.e_lambda_Icru + e.e_Icru;
  return e;
}
//-----------------------------------------------------------------------------
std::vector<double> eoc(const std::vector<double>& e, const std::vector<double>& h)
{
  if (e.size() != h.size() || e.size() < 2)
    throw std::invalid_argument("eoc: need two sequences of equal length >= 2");
  for (std::size_t k = 0; k < e.size(); ++k)
    if (!(e[k] > 0.0) || !(h[k] > 0.0))
      throw std::invalid_argument("eoc: entries must be positive");
  std::vector<double> r(e.size() - 1);
  for (std::size_t k = 1; k < e.size(); ++k)
    r[k - 1] = std::log(e[k] / e[k - 1]) / std::log(h[k] / h[k - 1]);
  return r;
}
//-----------------------------------------------------------------------------
std::vector<double> aitken_sequence(const std::vector<double>& seq)
{
  if (seq.size() < 3)
    throw std::invalid_argument("aitken: need at least three values");
  double scale = 0.0;
  for (double v : seq)
    scale = std::max(scale, std::abs(v));
  std::vector<double> r;
  for (std::size_t k = 2; k < seq.size(); ++k)
  {
    const double a = seq[k - 2], b = seq[k - 1], c = seq[k];
    const double den = c - 2.0 * b + a;
    if (std::abs(den) <= 1e-14 * scale)
    {
      std::ostringstream os;
      os << "aitken: vanishing denominator " << den << " at index " << k;
      throw std::domain_error(os.str());
    }
    r.push_back((c * a - b * b) / den);
  }
  return r;
}
//-----------------------------------------------------------------------------
double aitken(const std::vector<double>& seq)
{
  if (seq.size() < 3)
    throw std::invalid_argument("aitken: need at least three values");
  const std::vector<double> last(seq.end() - 3, seq.end());
  return aitken_sequence(last).back();
}
//-----------------------------------------------------------------------------
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need two sequences of equal length >= 2");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("loglog_slope: entries must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace obstacle
