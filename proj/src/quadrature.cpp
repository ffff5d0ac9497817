#include "obstacle/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace obstacle
{

//-----------------------------------------------------------------------------
LineRule gauss_line(int n)
{
  if (n < 1)
    throw std::invalid_argument("gauss_line: need at least one point");

  LineRule rule;
  rule.degree = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);

  // Newton iteration on P_n from the Chebyshev initial guess.
  for (int i = 0; i < n; ++i)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it)
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k)
      {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pnm1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k)
    {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double pn = (n == 1) ? x : p1;
    const double pnm1 = (n == 1) ? 1.0 : p0;
    dp = n * (x * pn - pnm1) / (x * x - 1.0);

    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}
//-----------------------------------------------------------------------------
TriangleRule dunavant5()
{
  TriangleRule rule;
  rule.degree = 5;
  const double a1 = 0.059715871789770, b1 = 0.470142064105115;
  const double a2 = 0.797426985353087, b2 = 0.101286507323456;
  const double w1 = 0.132394152788506, w2 = 0.125939180544827;

  rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  rule.weights.push_back(0.225);
  rule.points.push_back({a1, b1, b1});
  rule.points.push_back({b1, a1, b1});
  rule.points.push_back({b1, b1, a1});
  rule.weights.insert(rule.weights.end(), 3, w1);
  rule.points.push_back({a2, b2, b2});
  rule.points.push_back({b2, a2, b2});
  rule.points.push_back({b2, b2, a2});
  rule.weights.insert(rule.weights.end(), 3, w2);

  // The tabulated weights are rounded to 15 digits; renormalise.
  double s = 0.0;
  for (double w : rule.weights)
    s += w;
  for (double& w : rule.weights)
    w /= s;
  return rule;
}
//-----------------------------------------------------------------------------
TriangleRule conical_product(int n)
{
  const LineRule g = gauss_line(n);
  TriangleRule rule;
  rule.degree = 2 * n - 2;
  // x = s, y = t (1 - s) on the unit triangle; Jacobian (1 - s), area 1/2.
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      const double s = g.points[i];
      const double t = g.points[j];
      const double x = s;
      const double y = t * (1.0 - s);
      rule.points.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - s));
    }
  }
  return rule;
}
//-----------------------------------------------------------------------------
TriangleRule composite(const TriangleRule& base, int levels)
{
  using Bary = std::array<double, 3>;
  std::vector<std::array<Bary, 3>> tris
      = {{Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 1}}};
  auto mid = [](const Bary& a, const Bary& b) {
    return Bary{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
  };
  for (int l = 0; l < levels; ++l)
  {
    std::vector<std::array<Bary, 3>> next;
    next.reserve(4 * tris.size());
    for (const auto& t : tris)
    {
      const Bary m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]),
                 m20 = mid(t[2], t[0]);
      next.push_back({t[0], m01, m20});
      next.push_back({m01, t[1], m12});
      next.push_back({m20, m12, t[2]});
      next.push_back({m01, m12, m20});
    }
    tris = std::move(next);
  }

  TriangleRule rule;
  rule.degree = base.degree;
  const double scale = 1.0 / static_cast<double>(tris.size());
  for (const auto& t : tris)
  {
    for (std::size_t q = 0; q < base.weights.size(); ++q)
    {
      Bary p{0, 0, 0};
      for (int k = 0; k < 3; ++k)
        for (int c = 0; c < 3; ++c)
          p[c] += base.points[q][k] * t[k][c];
      rule.points.push_back(p);
      rule.weights.push_back(base.weights[q] * scale);
    }
  }
  return rule;
}

} // namespace obstacle
