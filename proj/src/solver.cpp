#include "obstacle/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace obstacle
{

//-----------------------------------------------------------------------------
std::vector<char> active_set(const Vector& means, const Vector& L, const Vector& chi,
                             double alpha, ActiveTest test)
{
  if (!(alpha > 0.0))
    throw std::invalid_argument("active_set: alpha must be positive");
  if (means.size() != L.size() || chi.size() != L.size())
    throw std::invalid_argument("active_set: size mismatch");
  std::vector<char> a(L.size(), 0);
  for (Eigen::Index j = 0; j < L.size(); ++j)
  {
    const double q = test == ActiveTest::Mean ? L[j] + alpha * (means[j] - chi[j]) : L[j];
    a[j] = q < 0.0 ? 1 : 0;
  }
  return a;
}
//-----------------------------------------------------------------------------
Vector element_means(const DiscreteProblem& p, const Vector& U)
{
  Vector m(p.dofs.num_multipliers());
  for (int j = 0; j < m.size(); ++j)
    m[j] = p.mean(U, j);
  return m;
}
//-----------------------------------------------------------------------------
Vector obstacle_means(const DiscreteProblem& p)
{
  Vector c(p.dofs.num_multipliers());
  for (int j = 0; j < c.size(); ++j)
    c[j] = p.obstacle.chi_h.values[p.dofs.mult_to_elem[j]];
  return c;
}

namespace
{
// Rows (1/3 on free sides of T) and right-hand sides chi_T - Dirichlet mean.
void constraint_rows(const DiscreteProblem& p, const std::vector<char>& active,
                     CsrMatrix& b, Vector& g, std::vector<int>& which)
{
  which.clear();
  for (std::size_t j = 0; j < active.size(); ++j)
    if (active[j])
      which.push_back(static_cast<int>(j));
  std::vector<Triplet> t;
  g.resize(which.size());
  for (std::size_t r = 0; r < which.size(); ++r)
  {
    const int e = p.dofs.mult_to_elem[which[r]];
    double fixed = 0.0;
    for (int s : p.mesh->element(e).sides)
    {
      const int d = p.dofs.side_to_dof[s];
      if (d >= 0)
        t.push_back({static_cast<int>(r), d, 1.0 / 3.0});
      else
        fixed += p.dirichlet.values[s] / 3.0;
    }
    g[r] = p.obstacle.chi_h.values[e] - fixed;
  }
  b = CsrMatrix::from_triplets(static_cast<int>(which.size()), p.dofs.num_dofs(),
                               std::move(t));
}

// Removes from L the components along kernel modes of the coupling matrix
// supported on the active set. Such a mode exists when a connected group of
// active elements is closed under free sides and two-colourable; it is
// w_T = +-1/|T|. Afterwards L lies in the range of Pi_h.
void remove_kernel_modes(const DiscreteProblem& p, const std::vector<char>& active, Vector& L)
{
  const Mesh& mesh = *p.mesh;
  const int m = p.dofs.num_multipliers();
  std::vector<int> colour(m, 0);
  for (int start = 0; start < m; ++start)
  {
    if (!active[start] || colour[start] != 0)
      continue;
    std::vector<int> group{start}, stack{start};
    colour[start] = 1;
    bool closed = true;
    while (!stack.empty())
    {
      const int j = stack.back();
      stack.pop_back();
      for (int s : mesh.element(p.dofs.mult_to_elem[j]).sides)
      {
        if (p.dofs.side_to_dof[s] < 0)
          continue;
        const auto& el = mesh.side(s).elements;
        const int other = el[0] == p.dofs.mult_to_elem[j] ? el[1] : el[0];
        const int k = other >= 0 ? p.dofs.elem_to_mult[other] : -1;
        if (k < 0 || !active[k])
        {
          closed = false;
          continue;
        }
        if (colour[k] == 0)
        {
          colour[k] = -colour[j];
          group.push_back(k);
          stack.push_back(k);
        }
        else if (colour[k] == colour[j])
          closed = false;
      }
    }
    if (!closed)
      continue;
    double num = 0.0, den = 0.0;
    for (int j : group)
    {
      const double a = mesh.element(p.dofs.mult_to_elem[j]).area;
      num += L[j] * colour[j];
      den += 1.0 / a;
    }
    for (int j : group)
      L[j] -= num / den * colour[j] / mesh.element(p.dofs.mult_to_elem[j]).area;
  }
}
} // namespace

//-----------------------------------------------------------------------------
std::pair<Vector, Vector> solve_active(const DiscreteProblem& p,
                                       const std::vector<char>& active,
                                       SolveReport* report, double tol)
{
  CsrMatrix b;
  Vector g;
  std::vector<int> which;
  std::vector<char> act = active;
  KktSolution sol;
  // A full active set on a mesh whose dual graph is bipartite has one
  // redundant constraint; it is dropped once and the multiplier is then
  // made unique by removing the kernel mode.
  for (int attempt = 0;; ++attempt)
  {
    constraint_rows(p, act, b, g, which);
    try
    {
      sol = solve_kkt(p.stiffness, b, p.rhs, g, tol);
      break;
    }
    catch (const SingularSystemError& e)
    {
      std::vector<int> elems;
      for (int r : e.rows())
        elems.push_back(p.dofs.mult_to_elem[which[r]]);
      if (attempt == 0 && !e.rows().empty())
      {
        for (int r : e.rows())
          act[which[r]] = 0;
        continue;
      }
      std::string msg = "singular active-set system; dependent constraints on elements";
      for (std::size_t i = 0; i < elems.size() && i < 20; ++i)
        msg += " " + std::to_string(elems[i]);
      throw SingularSystemError(msg, elems);
    }
  }
  if (report)
    *report = sol.report;
  Vector L = Vector::Zero(p.dofs.num_multipliers());
  for (std::size_t r = 0; r < which.size(); ++r)
    L[which[r]] = sol.lam[r] / p.mesh->element(p.dofs.mult_to_elem[which[r]]).area;
  // The LU may also succeed on the singular but consistent system.
  remove_kernel_modes(p, active, L);
  return {sol.u, L};
}
//-----------------------------------------------------------------------------
double stationarity_residual(const DiscreteProblem& p, const Vector& U, const Vector& L)
{
  const Vector r = p.stiffness.multiply(U) + p.coupling.multiply(L) - p.rhs;
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}
//-----------------------------------------------------------------------------
SolveOutcome pdas_solve(const DiscreteProblem& p, const PdasOptions& opts)
{
  if (!(opts.alpha > 0.0))
    throw std::invalid_argument("pdas_solve: alpha must be positive");
  const int m = p.dofs.num_multipliers();
  const Vector chi = obstacle_means(p);

  SolveOutcome out;
  PdasState& st = out.state;
  st.alpha = opts.alpha;
  if (opts.init)
  {
    st.U = opts.init->first;
    st.L = opts.init->second;
    if (st.U.size() != p.dofs.num_dofs() || st.L.size() != m)
      throw std::invalid_argument("pdas_solve: initial guess has wrong size");
  }
  else
  {
    SolveReport rep;
    st.U = solve_spd(p.stiffness, p.rhs, rep, SpdOptions{opts.tol});
    if (!rep.success)
      throw std::runtime_error("pdas_solve: unconstrained solve failed: " + rep.message);
    st.L = Vector::Zero(m);
  }
  out.log.push_back({0, 0, 0.0, 0.0});

  std::vector<char> previous;
  for (int k = 1; k <= opts.max_iter; ++k)
  {
    std::vector<char> act = active_set(element_means(p, st.U), st.L, chi, opts.alpha,
                                       opts.test);
    if (k > 1 && act == previous)
    {
      out.converged = true;
      out.iterations = k - 1;
      break;
    }
    SolveReport rep;
    auto [U, L] = solve_active(p, act, &rep, opts.tol);
    const double du = st.U.size() ? (U - st.U).cwiseAbs().maxCoeff() : 0.0;
    st.U = std::move(U);
    st.L = std::move(L);
    st.active = act;
    st.k = k;
    out.log.push_back({k, static_cast<int>(std::count(act.begin(), act.end(), 1)), du,
                       rep.residual});
    previous = std::move(act);
    // Round-off floor: with a redundant constraint the multipliers are not
    // unique and the active set may keep changing while U is fixed.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon()
                         * (1.0 + (st.U.size() ? st.U.cwiseAbs().maxCoeff() : 0.0));
    if (du <= opts.eps_stop + floor)
    {
      out.converged = true;
      out.iterations = k;
      break;
    }
  }
  if (!out.converged)
  {
    out.iterations = opts.max_iter;
    out.message = "pdas_solve: no convergence within " + std::to_string(opts.max_iter)
                  + " iterations";
  }
  if (st.active.empty())
    st.active.assign(m, 0);
  out.u = p.expand(st.U);
  out.lambda = p.expand_multiplier(st.L);
  return out;
}
//-----------------------------------------------------------------------------
void write_iteration_log(const SolveOutcome& out, std::ostream& os)
{
  os << "k,active,du_inf,residual\n";
  os << std::setprecision(10);
  for (const auto& it : out.log)
    os << it.k << ',' << it.active << ',' << it.du_inf << ',' << it.residual << '\n';
}
//-----------------------------------------------------------------------------
PenaltyOutcome penalized_solve(const DiscreteProblem& p, double eps, double newton_tol,
                               int max_iter)
{
  if (!(eps > 0.0))
    throw std::invalid_argument("penalized_solve: eps must be positive");
  const int m = p.dofs.num_multipliers();
  const double pen = 1.0 / (eps * eps);
  const Vector chi = obstacle_means(p);

  PenaltyOutcome out;
  SolveReport rep;
  out.U = solve_spd(p.stiffness, p.rhs, rep);
  if (!rep.success)
    throw std::runtime_error("penalized_solve: unconstrained solve failed");

  auto multiplier = [&](const Vector& U) {
    const Vector means = element_means(p, U);
    Vector L(m);
    for (int j = 0; j < m; ++j)
      L[j] = pen * std::min(means[j] - chi[j], 0.0);
    return L;
  };
  const double scale = 1.0 + p.rhs.cwiseAbs().maxCoeff();

  std::vector<char> previous;
  for (int it = 0; it < max_iter; ++it)
  {
    const Vector means = element_means(p, out.U);
    std::vector<char> violated(m);
    for (int j = 0; j < m; ++j)
      violated[j] = means[j] < chi[j] ? 1 : 0;
    out.L = multiplier(out.U);
    const Vector grad = p.stiffness.multiply(out.U) + p.coupling.multiply(out.L) - p.rhs;
    out.residual = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
    // An unchanged violated set means the last step minimised the exact
    // quadratic model.
    if (out.residual <= newton_tol * scale || (it > 0 && violated == previous))
    {
      out.converged = true;
      break;
    }

    std::vector<Triplet> t;
    for (int i = 0; i < p.stiffness.rows(); ++i)
      for (int k = p.stiffness.offsets()[i]; k < p.stiffness.offsets()[i + 1]; ++k)
        t.push_back({i, p.stiffness.indices()[k], p.stiffness.values()[k]});
    for (int j = 0; j < m; ++j)
    {
      if (!violated[j])
        continue;
      const int e = p.dofs.mult_to_elem[j];
      const double w = pen * p.mesh->element(e).area / 9.0;
      for (int si : p.mesh->element(e).sides)
        for (int sj : p.mesh->element(e).sides)
        {
          const int di = p.dofs.side_to_dof[si], dj = p.dofs.side_to_dof[sj];
          if (di >= 0 && dj >= 0)
            t.push_back({di, dj, w});
        }
    }
    CsrMatrix h = CsrMatrix::from_triplets(p.stiffness.rows(), p.stiffness.cols(),
                                           std::move(t));
    h.set_symmetric(true);
    const Vector step = solve_spd(h, -grad, rep, SpdOptions{1e-14});
    out.U += step;
    ++out.newton_iterations;
    previous = std::move(violated);
  }
  out.u = p.expand(out.U);
  out.lambda = p.expand_multiplier(out.L);
  return out;
}
//-----------------------------------------------------------------------------
SolveOutcome brute_force_solve(const DiscreteProblem& p, double tol)
{
  const int m = p.dofs.num_multipliers(), n = p.dofs.num_dofs();
  if (m > 20)
    throw std::invalid_argument("brute_force_solve: too many multiplier elements");

  const Eigen::MatrixXd S = p.stiffness.to_dense();
  const Vector chi = obstacle_means(p);
  // Rows of the constraint matrix and the Dirichlet part of every mean.
  Eigen::MatrixXd Ball = Eigen::MatrixXd::Zero(m, n);
  Vector fixed = Vector::Zero(m);
  for (int j = 0; j < m; ++j)
    for (int s : p.mesh->element(p.dofs.mult_to_elem[j]).sides)
    {
      const int d = p.dofs.side_to_dof[s];
      if (d >= 0)
        Ball(j, d) += 1.0 / 3.0;
      else
        fixed[j] += p.dirichlet.values[s] / 3.0;
    }

  double lscale = 1.0;
  for (double f : p.load.f_h.values)
    lscale = std::max(lscale, 1.0 + std::abs(f));

  struct Candidate
  {
    std::uint32_t mask;
    Vector U, L;
  };
  std::vector<Candidate> feasible;

  for (std::uint32_t mask = 0; mask < (1u << m); ++mask)
  {
    std::vector<int> act;
    for (int j = 0; j < m; ++j)
      if (mask & (1u << j))
        act.push_back(j);
    const int k = static_cast<int>(act.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
    Vector r = Vector::Zero(n + k);
    K.topLeftCorner(n, n) = S;
    r.head(n) = p.rhs;
    for (int a = 0; a < k; ++a)
    {
      K.block(n + a, 0, 1, n) = Ball.row(act[a]);
      K.block(0, n + a, n, 1) = Ball.row(act[a]).transpose();
      r[n + a] = chi[act[a]] - fixed[act[a]];
    }
    // Multiplier columns scaled by sqrt|T|: the minimum-norm solution picks
    // the multiplier that is L2-orthogonal to any kernel mode.
    Vector scale = Vector::Ones(n + k);
    for (int a = 0; a < k; ++a)
      scale[n + a] = std::sqrt(p.mesh->element(p.dofs.mult_to_elem[act[a]]).area);
    const Eigen::MatrixXd Ks = K * scale.asDiagonal();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Ks);
    cod.setThreshold(1e-12);
    const Vector x = scale.asDiagonal() * cod.solve(r);
    if ((K * x - r).norm() > 1e-10 * (1.0 + r.norm()))
      continue;
    Vector U = x.head(n);
    Vector L = Vector::Zero(m);
    for (int a = 0; a < k; ++a)
      L[act[a]] = x[n + a] / p.mesh->element(p.dofs.mult_to_elem[act[a]]).area;
    const Vector means = Ball * U + fixed;
    bool ok = true;
    for (int j = 0; j < m && ok; ++j)
      ok = means[j] >= chi[j] - tol * (1.0 + std::abs(chi[j])) && L[j] <= tol * lscale;
    if (ok)
      feasible.push_back({mask, std::move(U), std::move(L)});
  }

  if (feasible.empty())
    throw std::runtime_error("brute_force_solve: no feasible active set");
  auto same = [](const Candidate& a, const Candidate& b) {
    const double du = a.U.size() ? (a.U - b.U).cwiseAbs().maxCoeff() : 0.0;
    const double dl = a.L.size() ? (a.L - b.L).cwiseAbs().maxCoeff() : 0.0;
    return du <= 1e-8 * (1.0 + b.U.cwiseAbs().maxCoeff())
           && dl <= 1e-8 * (1.0 + b.L.cwiseAbs().maxCoeff());
  };
  // Multipliers of different masks may differ by a kernel mode of the
  // coupling. The union of all feasible masks then carries the minimum-norm
  // multiplier, which is the one orthogonal to that mode.
  std::uint32_t all = 0;
  for (const auto& c : feasible)
    all |= c.mask;
  const auto full = std::find_if(feasible.begin(), feasible.end(),
                                 [all](const Candidate& c) { return c.mask == all; });
  const bool agree = std::all_of(feasible.begin(), feasible.end(),
                                 [&](const Candidate& c) { return same(c, feasible[0]); });
  const bool same_u = std::all_of(feasible.begin(), feasible.end(), [&](const Candidate& c) {
    return c.U.size() == 0
           || (c.U - feasible[0].U).cwiseAbs().maxCoeff()
                  <= 1e-8 * (1.0 + feasible[0].U.cwiseAbs().maxCoeff());
  });
  if (!same_u || (!agree && full == feasible.end()))
    throw std::runtime_error("brute_force_solve: several distinct feasible active sets");

  // Prefer the smallest active set among equivalent candidates.
  const auto best = !agree ? full
                           : std::min_element(feasible.begin(), feasible.end(),
                                              [](const Candidate& a, const Candidate& b) {
                                                const int pa = std::popcount(a.mask),
                                                          pb = std::popcount(b.mask);
                                                return pa != pb ? pa < pb : a.mask < b.mask;
                                              });
  SolveOutcome out;
  out.state.U = best->U;
  out.state.L = best->L;
  out.state.active.assign(m, 0);
  for (int j = 0; j < m; ++j)
    out.state.active[j] = (best->mask >> j) & 1u;
  out.converged = true;
  out.u = p.expand(out.state.U);
  out.lambda = p.expand_multiplier(out.state.L);
  return out;
}

} // namespace obstacle
