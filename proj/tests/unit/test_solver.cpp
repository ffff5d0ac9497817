#include "obstacle/benchmarks.hpp"
#include "obstacle/solver.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace obstacle;

namespace
{

ProblemData contact_data(double f = -10.0)
{
  ProblemData d;
  d.f = [f](const Vec2&) { return f; };
  d.chi = [](const Vec2&) { return 0.0; };
  d.f_piecewise_constant = true;
  d.chi_piecewise_affine = true;
  return d;
}

// Varying data on the unit square with partial contact.
ProblemData bump_data()
{
  ProblemData d;
  d.f = [](const Vec2& x) { return -12.0 + 4.0 * std::sin(3.0 * x.x + x.y); };
  d.chi = [](const Vec2& x) {
    return 0.4 * std::sin(M_PI * x.x) * std::sin(M_PI * x.y) - 0.3;
  };
  return d;
}

Mesh pentagon_fan()
{
  std::vector<Vec2> v{{0.0, 0.0}};
  for (int k = 0; k < 5; ++k)
    v.push_back({std::cos(2 * M_PI * k / 5), std::sin(2 * M_PI * k / 5)});
  return Mesh(v, {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 1}});
}

double broken_energy_norm(const CrFunction& v)
{
  const auto g = gradient_h(v);
  double s = 0.0;
  for (int t = 0; t < v.mesh->num_elements(); ++t)
    s += v.mesh->element(t).area * norm2(g.values[t]);
  return std::sqrt(s);
}

CrFunction difference(const CrFunction& a, const CrFunction& b)
{
  CrFunction d = a;
  for (std::size_t s = 0; s < d.values.size(); ++s)
    d.values[s] -= b.values[s];
  return d;
}

// 1/2 ||grad_h v||^2 - (f_h, Pi_h v).
double discrete_energy(const DiscreteProblem& p, const CrFunction& v)
{
  const double a = broken_energy_norm(v);
  double l = 0.0;
  for (int t = 0; t < p.mesh->num_elements(); ++t)
    l += p.load.f_h.values[t] * v.mean(t) * p.mesh->element(t).area;
  return 0.5 * a * a - l;
}

// Random v with Pi_h v >= chi_h: random side values shifted up on the free sides.
CrFunction random_feasible(const DiscreteProblem& p, std::mt19937& rng, double amplitude)
{
  const Mesh& m = *p.mesh;
  CrFunction v = p.dirichlet;
  std::uniform_real_distribution<double> d(-amplitude, amplitude);
  for (int k = 0; k < p.dofs.num_dofs(); ++k)
    v.values[p.dofs.dof_to_side[k]] = d(rng);
  double shift = 0.0;
  for (int t = 0; t < m.num_elements(); ++t)
  {
    int free = 0;
    for (int s : m.element(t).sides)
      free += p.dofs.side_to_dof[s] >= 0;
    if (free > 0)
      shift = std::max(shift, 3.0 * (p.obstacle.chi_h.values[t] - v.mean(t)) / free);
  }
  for (int k = 0; k < p.dofs.num_dofs(); ++k)
    v.values[p.dofs.dof_to_side[k]] += shift;
  return v;
}

void check_discrete_kkt(const DiscreteProblem& p, const SolveOutcome& out)
{
  const double scale = 1.0 + p.rhs.cwiseAbs().maxCoeff();
  CHECK(stationarity_residual(p, out.state.U, out.state.L) <= 1e-10 * scale);
  const Mesh& m = *p.mesh;
  for (int t = 0; t < m.num_elements(); ++t)
  {
    const double gap = out.u.mean(t) - p.obstacle.chi_h.values[t];
    CHECK(out.lambda.values[t] <= 1e-10);
    CHECK(gap >= -1e-10);
    CHECK(std::abs(out.lambda.values[t] * gap) <= 1e-10);
  }
}

} // namespace

TEST_CASE("Active-set test")
{
  const Vector chi = Vector::Zero(3);
  CHECK(active_set(Vector::Constant(3, 0.5), Vector::Zero(3), chi, 1.0)
        == std::vector<char>{0, 0, 0});
  // Ties are inactive.
  CHECK(active_set(Vector::Zero(3), Vector::Zero(3), chi, 1.0) == std::vector<char>{0, 0, 0});
  CHECK(active_set(Vector::Zero(3), Vector::Constant(3, -1.0), chi, 1.0)
        == std::vector<char>{1, 1, 1});
  const Vector means = (Vector(3) << -2.0, 0.5, 0.1).finished();
  const Vector L = (Vector(3) << 1.0, -1.0, -0.1).finished();
  CHECK(active_set(means, L, chi, 1.0) == std::vector<char>{1, 1, 0});
  CHECK(active_set(means, L, chi, 3.0) == std::vector<char>{1, 0, 0});
  CHECK(active_set(means, L, chi, 1.0, ActiveTest::Classical) == std::vector<char>{0, 1, 1});
  CHECK_THROWS_AS(active_set(means, L, chi, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(active_set(means, L, Vector::Zero(2), 1.0), std::invalid_argument);
}

TEST_CASE("PDAS matches brute-force enumeration on the 8-element contact problem")
{
  const Mesh m = testing::unit_square(2);
  REQUIRE(m.num_elements() == 8);
  const ProblemData data = contact_data();
  const DiscreteProblem p = assemble(m, data);
  const SolveOutcome pdas = pdas_solve(p);
  const SolveOutcome brute = brute_force_solve(p);
  REQUIRE(pdas.converged);
  CHECK((pdas.state.U - brute.state.U).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((pdas.state.L - brute.state.L).cwiseAbs().maxCoeff() <= 1e-10);
  // Contact set: elements with a nonzero multiplier.
  for (int j = 0; j < p.dofs.num_multipliers(); ++j)
    if (brute.state.L[j] < -1e-10)
      CHECK(pdas.state.active[j] == 1);
  check_discrete_kkt(p, pdas);
  check_discrete_kkt(p, brute);
}

TEST_CASE("Inactive obstacle: empty active set and the unconstrained solution")
{
  const Mesh m = testing::unit_square(4);
  ProblemData data = contact_data(-3.0);
  data.chi = [](const Vec2&) { return -1e6; };
  const DiscreteProblem p = assemble(m, data);
  const SolveOutcome out = pdas_solve(p);
  CHECK(out.converged);
  CHECK(out.iterations <= 2);
  REQUIRE(out.log.size() >= 2);
  CHECK(out.log[1].active == 0);
  CHECK(std::count(out.state.active.begin(), out.state.active.end(), 1) == 0);
  SolveReport rep;
  const Vector U = solve_spd(p.stiffness, p.rhs, rep);
  CHECK((out.state.U - U).cwiseAbs().maxCoeff() <= 1e-13);
  for (double l : out.lambda.values)
    CHECK(l == 0.0);

  const PenaltyOutcome pen = penalized_solve(p, 1e-3);
  CHECK(pen.converged);
  CHECK((pen.U - U).cwiseAbs().maxCoeff() <= 1e-13);

  const Mesh small = testing::unit_square(2);
  const DiscreteProblem q = assemble(small, data);
  const SolveOutcome brute = brute_force_solve(q);
  CHECK(std::count(brute.state.active.begin(), brute.state.active.end(), 1) == 0);
}

TEST_CASE("Full contact: brute force selects every element")
{
  const Mesh m = pentagon_fan();
  const ProblemData data = contact_data(-10.0);
  const DiscreteProblem p = assemble(m, data);
  REQUIRE(p.dofs.num_multipliers() == 5);
  const SolveOutcome brute = brute_force_solve(p);
  CHECK(std::count(brute.state.active.begin(), brute.state.active.end(), 1) == 5);
  // u = 0 and lambda = f_h.
  CHECK(brute.state.U.cwiseAbs().maxCoeff() <= 1e-12);
  for (double l : brute.lambda.values)
    CHECK(l == doctest::Approx(-10.0));
  const SolveOutcome pdas = pdas_solve(p);
  CHECK((pdas.state.L - brute.state.L).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("Rank-deficient full contact on a bipartite mesh is resolved")
{
  // Every element of an alternating structured mesh is in contact; one
  // constraint is redundant.
  const Mesh m = testing::unit_square(4);
  const ProblemData data = contact_data(-1000.0);
  const DiscreteProblem p = assemble(m, data);
  const SolveOutcome out = pdas_solve(p);
  CHECK(out.converged);
  CHECK(out.state.U.cwiseAbs().maxCoeff() <= 1e-10);
  check_discrete_kkt(p, out);
  // With u = 0 the unique multiplier in Pi_h of the discrete space is f_h.
  for (double l : out.lambda.values)
    CHECK(l == doctest::Approx(-1000.0).epsilon(1e-10));
}

TEST_CASE("PDAS satisfies the discrete KKT conditions on varied meshes")
{
  std::mt19937 rng(7);
  const Mesh meshes[] = {testing::unit_square(8), testing::criss_cross(4),
                         testing::jiggle(testing::unit_square(8), 0.25, rng),
                         refine_rgb(testing::unit_square(4), {0, 3, 7, 12})};
  const ProblemData data = bump_data();
  for (const Mesh& m : meshes)
  {
    const DiscreteProblem p = assemble(m, data);
    for (double alpha : {1e-2, 1.0, 1e3})
    {
      PdasOptions o;
      o.alpha = alpha;
      const SolveOutcome out = pdas_solve(p, o);
      REQUIRE(out.converged);
      CHECK(out.iterations < 50);
      check_discrete_kkt(p, out);
      const int active = static_cast<int>(std::count(out.state.active.begin(),
                                                     out.state.active.end(), 1));
      CHECK(active > 0);
      CHECK(active < p.dofs.num_multipliers());
    }
  }
}

TEST_CASE("Discrete variational inequality and energy minimality")
{
  std::mt19937 rng(8);
  const Mesh m = testing::jiggle(testing::criss_cross(3), 0.2, rng);
  const ProblemData data = bump_data();
  const DiscreteProblem p = assemble(m, data);
  const SolveOutcome out = pdas_solve(p);
  REQUIRE(out.converged);
  const double e_u = discrete_energy(p, out.u);
  const auto gu = gradient_h(out.u);
  for (int k = 0; k < 100; ++k)
  {
    const CrFunction v = random_feasible(p, rng, k % 2 ? 0.05 : 1.0);
    for (int t = 0; t < m.num_elements(); ++t)
      REQUIRE(v.mean(t) >= p.obstacle.chi_h.values[t] - 1e-12);
    const auto gv = gradient_h(v);
    double lhs = 0.0, rhs = 0.0;
    for (int t = 0; t < m.num_elements(); ++t)
    {
      const double a = m.element(t).area;
      lhs += a * dot(gu.values[t], gu.values[t] - gv.values[t]);
      rhs += a * p.load.f_h.values[t] * (out.u.mean(t) - v.mean(t));
    }
    CHECK(lhs <= rhs + 1e-10 * (1.0 + std::abs(rhs)));
    CHECK(e_u <= discrete_energy(p, v) + 1e-12);
  }

  // Convex combinations with the solution stay feasible and cost more.
  const CrFunction w = random_feasible(p, rng, 0.5);
  for (double s : {1e-4, 1e-2, 0.5})
  {
    CrFunction v = out.u;
    for (std::size_t i = 0; i < v.values.size(); ++i)
      v.values[i] += s * (w.values[i] - out.u.values[i]);
    CHECK(e_u <= discrete_energy(p, v) + 1e-14);
  }
}

TEST_CASE("Penalty solutions converge to the PDAS solution")
{
  const Mesh m = testing::unit_square(2);
  const ProblemData data = contact_data();
  const DiscreteProblem p = assemble(m, data);
  const SolveOutcome pdas = pdas_solve(p);
  double previous = 1e300;
  for (double eps : {1e-2, 1e-3, 1e-4})
  {
    const PenaltyOutcome pen = penalized_solve(p, eps);
    REQUIRE(pen.converged);
    // Stationarity with the penalty multiplier; round-off in L grows like eps^-2.
    CHECK(stationarity_residual(p, pen.U, pen.L)
          <= 1e-10 * (1.0 + p.rhs.norm()) * (1.0 + 1e-6 / (eps * eps)));
    const double err = broken_energy_norm(difference(pen.u, pdas.u));
    CHECK(err < previous);
    previous = err;

    // ||(Pi_h u_eps - chi_h)_-|| = eps^2 ||lambda_eps||.
    double viol = 0.0, lam = 0.0;
    for (int t = 0; t < m.num_elements(); ++t)
    {
      const double a = m.element(t).area;
      const double neg = std::min(pen.u.mean(t) - p.obstacle.chi_h.values[t], 0.0);
      viol += a * neg * neg;
      lam += a * pen.lambda.values[t] * pen.lambda.values[t];
      CHECK(pen.lambda.values[t] <= 0.0);
    }
    CHECK(std::sqrt(viol) == doctest::Approx(eps * eps * std::sqrt(lam)).epsilon(1e-12));
  }
  CHECK(previous <= 1e-3);
  CHECK_THROWS_AS(penalized_solve(p, 0.0), std::invalid_argument);
}

TEST_CASE("Warm start, iteration limit and the log")
{
  const Mesh m = testing::criss_cross(4);
  const ProblemData data = bump_data();
  const DiscreteProblem p = assemble(m, data);
  const SolveOutcome cold = pdas_solve(p);
  REQUIRE(cold.converged);

  PdasOptions warm;
  warm.init = std::make_pair(cold.state.U, cold.state.L);
  const SolveOutcome again = pdas_solve(p, warm);
  CHECK(again.converged);
  CHECK(again.iterations <= 1);
  CHECK((again.state.U - cold.state.U).cwiseAbs().maxCoeff() <= 1e-12);

  PdasOptions limited;
  limited.max_iter = 1;
  const SolveOutcome stopped = pdas_solve(p, limited);
  if (cold.iterations > 1)
  {
    CHECK_FALSE(stopped.converged);
    CHECK_FALSE(stopped.message.empty());
  }

  PdasOptions wrong;
  wrong.init = std::make_pair(Vector::Zero(3), Vector::Zero(2));
  CHECK_THROWS_AS(pdas_solve(p, wrong), std::invalid_argument);
  PdasOptions bad_alpha;
  bad_alpha.alpha = -1.0;
  CHECK_THROWS_AS(pdas_solve(p, bad_alpha), std::invalid_argument);

  std::ostringstream os;
  write_iteration_log(cold, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,active,du_inf,residual");
  int rows = 0;
  while (std::getline(in, line))
    ++rows;
  CHECK(rows == static_cast<int>(cold.log.size()));
}

TEST_CASE("Brute force refuses large problems")
{
  const Mesh m = testing::unit_square(4);
  const DiscreteProblem p = assemble(m, contact_data());
  CHECK_THROWS_AS(brute_force_solve(p), std::invalid_argument);
}

TEST_CASE("Ring benchmark on the mesh with 8 cells per axis")
{
  const Benchmark b = ring_benchmark();
  const Mesh m = refine_uniform(b.initial_mesh(), 1);
  const DiscreteProblem p = assemble(m, b.data);
  const SolveOutcome out = pdas_solve(p);
  REQUIRE(out.converged);
  check_discrete_kkt(p, out);
  const auto g = gradient_h(out.u);
  const TriangleRule rule = conical_product(10);
  double e2 = 0.0;
  for (int t = 0; t < m.num_elements(); ++t)
    e2 += integrate_triangle(m.coords(t), rule, [&](const Vec2& x) {
      return norm2(g.values[t] - b.data.exact->grad_u(x));
    });
  CHECK(std::sqrt(e2) == doctest::Approx(0.380).epsilon(0.15));
}

TEST_CASE("PDAS matches brute force with partial contact and varying data")
{
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int partial = 0;
  for (int trial = 0; trial < 12; ++trial)
  {
    // unit_square(2) has a bipartite dual graph, criss_cross(2) does not.
    const Mesh m = testing::jiggle(trial % 2 ? testing::criss_cross(2) : testing::unit_square(2),
                                   0.2, rng);
    ProblemData d;
    const double f0 = -20.0 * u01(rng) - 1.0, f1 = 5.0 * u01(rng);
    d.f = [=](const Vec2& x) { return f0 + f1 * std::sin(3.0 * x.x + 2.0 * x.y); };
    const double A = 0.3 * u01(rng), B = A + 0.2 * u01(rng);
    d.chi = [=](const Vec2& x) { return A * std::cos(2.0 * x.x) * std::cos(2.0 * x.y) - B; };
    const DiscreteProblem p = assemble(m, d);
    const SolveOutcome pdas = pdas_solve(p);
    REQUIRE(pdas.converged);
    const SolveOutcome brute = brute_force_solve(p);
    INFO("trial " << trial);
    CHECK((pdas.state.U - brute.state.U).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((pdas.state.L - brute.state.L).cwiseAbs().maxCoeff() <= 1e-10);
    const auto n = std::count(pdas.state.active.begin(), pdas.state.active.end(), 1);
    partial += n > 0 && n < p.dofs.num_multipliers();
  }
  CHECK(partial >= 6);
}
