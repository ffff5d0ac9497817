#include "obstacle/benchmarks.hpp"

#include "obstacle/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace obstacle
{

namespace
{
constexpr double pi = std::numbers::pi;

// Composite Gauss-Legendre on [a, b].
template <class F>
double integrate_1d(F&& f, double a, double b, int pieces = 64)
{
  static const LineRule rule = gauss_line(20);
  double s = 0.0;
  const double h = (b - a) / pieces;
  for (int p = 0; p < pieces; ++p)
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      s += h * rule.weights[q] * f(a + (p + rule.points[q]) * h);
  return s;
}

double ring_u(const Vec2& x)
{
  const double r2 = norm2(x);
  if (r2 <= 1.0)
    return 0.0;
  return 0.5 * r2 - 0.5 * std::log(r2) - 0.5;
}

Vec2 ring_grad(const Vec2& x)
{
  const double r2 = norm2(x);
  if (r2 <= 1.0)
    return {};
  return x - x / r2;
}

double polar_angle(const Vec2& x)
{
  double phi = std::atan2(x.y, x.x);
  if (phi < 0.0)
    phi += 2.0 * pi;
  return phi;
}
} // namespace

//-----------------------------------------------------------------------------
Mesh Benchmark::initial_mesh() const
{
  return build_structured(domain, cells, data.boundary, pattern);
}
//-----------------------------------------------------------------------------
Benchmark ring_benchmark()
{
  Benchmark b;
  b.id = "ring";
  b.domain = Domain::rectangle(-1.5, 1.5, -1.5, 1.5);
  b.cells = 4;
  b.pattern = DiagonalPattern::Alternating;
  ProblemData& d = b.data;
  d.name = "ring";
  d.f = [](const Vec2&) { return -2.0; };
  d.chi = [](const Vec2&) { return 0.0; };
  d.grad_chi = [](const Vec2&) { return Vec2{}; };
  d.dirichlet = ring_u;
  d.f_piecewise_constant = true;
  d.chi_piecewise_affine = true;
  ExactSolution ex;
  ex.u = ring_u;
  ex.grad_u = ring_grad;
  ex.lambda = [](const Vec2& x) { return norm2(x) < 1.0 ? -2.0 : 0.0; };
  ex.in_contact = [](const Vec2& x) { return norm2(x) <= 1.0; };
  ex.energy = ring_exact_energy();
  d.exact = ex;
  return b;
}
//-----------------------------------------------------------------------------
double ring_exact_energy()
{
  // Radial integrand 1/2 |grad u|^2 - f u on r > 1.
  auto F = [](double r) {
    const double u = 0.5 * r * r - std::log(r) - 0.5;
    const double du = r - 1.0 / r;
    return 0.5 * du * du + 2.0 * u;
  };
  const double a = 1.5;
  // Length of the circle of radius r inside the square.
  const double inner = integrate_1d([&](double r) { return F(r) * 2.0 * pi * r; }, 1.0, a);
  // r = a + s^2 removes the square-root behaviour at r = a.
  const double smax = std::sqrt(a * std::sqrt(2.0) - a);
  const double outer = integrate_1d(
      [&](double s) {
        const double r = a + s * s;
        const double len = 8.0 * r * (pi / 4.0 - std::acos(std::min(1.0, a / r)));
        return F(r) * len * 2.0 * s;
      },
      0.0, smax);
  return inner + outer;
}
//-----------------------------------------------------------------------------
Cutoff corner_cutoff(double r)
{
  const double rb = 2.0 * (r - 0.25);
  if (rb < 0.0)
    return {1.0, 0.0, 0.0};
  if (rb >= 1.0)
    return {0.0, 0.0, 0.0};
  const double rb2 = rb * rb, rb3 = rb2 * rb;
  const double g = -6.0 * rb3 * rb2 + 15.0 * rb2 * rb2 - 10.0 * rb3 + 1.0;
  const double dg = -30.0 * rb2 * rb2 + 60.0 * rb3 - 30.0 * rb2;
  const double d2g = -120.0 * rb3 + 180.0 * rb2 - 60.0 * rb;
  return {g, 2.0 * dg, 4.0 * d2g};
}
//-----------------------------------------------------------------------------
Benchmark corner_benchmark()
{
  Benchmark b;
  b.id = "corner";
  b.domain = Domain::l_shape(2.0);
  b.cells = 8;
  b.pattern = DiagonalPattern::Alternating;
  ProblemData& d = b.data;
  d.name = "corner";
  d.f = [](const Vec2& x) {
    const double r = norm(x);
    const double rb = 2.0 * (r - 0.25);
    const double g2 = rb > 1.25 ? 1.0 : 0.0;
    if (r == 0.0)
      return -g2;
    const Cutoff c = corner_cutoff(r);
    const double s = std::sin(2.0 * polar_angle(x) / 3.0);
    return -std::pow(r, 2.0 / 3.0) * s * (c.dg / r + c.d2g)
           - 4.0 / 3.0 * std::pow(r, -1.0 / 3.0) * c.dg * s - g2;
  };
  d.chi = [](const Vec2&) { return 0.0; };
  d.grad_chi = [](const Vec2&) { return Vec2{}; };
  d.chi_piecewise_affine = true;
  ExactSolution ex;
  ex.u = [](const Vec2& x) {
    const double r = norm(x);
    if (r == 0.0)
      return 0.0;
    return std::pow(r, 2.0 / 3.0) * corner_cutoff(r).g
           * std::sin(2.0 * polar_angle(x) / 3.0);
  };
  ex.grad_u = [](const Vec2& x) {
    const double r = norm(x);
    if (r == 0.0)
      return Vec2{};
    const double phi = polar_angle(x);
    const Cutoff c = corner_cutoff(r);
    const double s = std::sin(2.0 * phi / 3.0), co = std::cos(2.0 * phi / 3.0);
    const double ur = (2.0 / 3.0 * std::pow(r, -1.0 / 3.0) * c.g + std::pow(r, 2.0 / 3.0) * c.dg) * s;
    const double uphi = 2.0 / 3.0 * std::pow(r, -1.0 / 3.0) * c.g * co;
    const Vec2 er{std::cos(phi), std::sin(phi)}, ephi{-std::sin(phi), std::cos(phi)};
    return ur * er + uphi * ephi;
  };
  ex.lambda = [](const Vec2& x) { return 2.0 * (norm(x) - 0.25) > 1.25 ? -1.0 : 0.0; };
  ex.in_contact = [](const Vec2& x) { return norm(x) >= 0.75; };
  ex.energy = corner_exact_energy();
  d.exact = ex;
  return b;
}
//-----------------------------------------------------------------------------
double corner_exact_energy()
{
  // Angular factors integrate to 3 pi / 4 over (0, 3 pi / 2). With r = s^3
  // the radial integrand is smooth at the origin.
  auto radial = [](double s) {
    const double r = s * s * s;
    const Cutoff c = corner_cutoff(r);
    const double a = 2.0 / 3.0 * std::pow(r, -1.0 / 3.0) * c.g + std::pow(r, 2.0 / 3.0) * c.dg;
    const double b = 2.0 / 3.0 * std::pow(r, -1.0 / 3.0) * c.g;
    const double U = std::pow(r, 2.0 / 3.0) * c.g;
    const double F = -std::pow(r, 2.0 / 3.0) * (c.dg / r + c.d2g)
                     - 4.0 / 3.0 * std::pow(r, -1.0 / 3.0) * c.dg;
    return (0.5 * (a * a + b * b) - F * U) * r * 3.0 * s * s;
  };
  const double s1 = std::cbrt(0.25), s2 = std::cbrt(0.75);
  return 0.75 * pi * (integrate_1d(radial, 0.0, s1) + integrate_1d(radial, s1, s2));
}
//-----------------------------------------------------------------------------
Benchmark pyramid_benchmark()
{
  Benchmark b;
  b.id = "pyramid";
  b.domain = Domain::rectangle(-1.0, 1.0, -1.0, 1.0);
  b.cells = 4;
  b.pattern = DiagonalPattern::CrissCross;
  ProblemData& d = b.data;
  d.name = "pyramid";
  d.f = [](const Vec2&) { return 1.0; };
  d.chi = [](const Vec2& x) { return 1.0 - std::max(std::abs(x.x), std::abs(x.y)); };
  d.grad_chi = [](const Vec2& x) {
    if (std::abs(x.x) >= std::abs(x.y))
      return Vec2{x.x > 0 ? -1.0 : 1.0, 0.0};
    return Vec2{0.0, x.y > 0 ? -1.0 : 1.0};
  };
  d.f_piecewise_constant = true;
  d.chi_piecewise_affine = true;
  return b;
}
//-----------------------------------------------------------------------------
Benchmark make_benchmark(const std::string& id)
{
  if (id == "ring")
    return ring_benchmark();
  if (id == "corner")
    return corner_benchmark();
  if (id == "pyramid")
    return pyramid_benchmark();
  throw std::invalid_argument("unknown benchmark '" + id + "'");
}

} // namespace obstacle
