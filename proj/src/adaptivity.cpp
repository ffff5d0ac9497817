#include "obstacle/adaptivity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace obstacle
{

//-----------------------------------------------------------------------------
std::vector<int> doerfler_mark(const std::vector<double>& indicators, double theta)
{
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("doerfler_mark: theta must lie in (0, 1)");
  double total = 0.0;
  for (double v : indicators)
  {
    if (v < 0.0)
      throw std::invalid_argument("doerfler_mark: negative indicator");
    total += v;
  }
  if (total == 0.0)
    return {};
  std::vector<int> order(indicators.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return indicators[a] > indicators[b]; });
  const double target = theta * theta * total;
  std::vector<int> marked;
  double sum = 0.0;
  for (int t : order)
  {
    if (sum >= target - 1e-14 * total)
      break;
    marked.push_back(t);
    sum += indicators[t];
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}
//-----------------------------------------------------------------------------
ErrorRecord solve_level(const Mesh& mesh, const ProblemData& data, const AfemConfig& config,
                        int level, const LevelCallback& callback,
                        std::vector<double>* indicators)
{
  const auto start = std::chrono::steady_clock::now();
  ErrorRecord rec;
  rec.level = level;
  rec.elements = mesh.num_elements();
  rec.h = mesh.h_max();

  if (config.triangle_order < 1 || config.line_order < 1)
    throw std::invalid_argument("solve_level: quadrature orders must be positive");
  const TriangleRule rule = conical_product(config.triangle_order);
  const LineRule line = gauss_line(config.line_order);
  const DiscreteProblem p = assemble(mesh, data);
  rec.dofs = p.dofs.num_dofs();
  const SolveOutcome sol = pdas_solve(p, config.pdas);
  if (!sol.converged)
    throw std::runtime_error(sol.message);
  rec.pdas_iterations = sol.iterations;
  for (double l : sol.lambda.values)
    rec.contact_elements += l < 0.0 ? 1 : 0;

  const DualField z = marini_flux(sol.u, sol.lambda, p.load.f_h);
  rec.max_flux_jump = z.max_jump;
  const PostProcessed post = postprocess_conforming(sol.u, data);
  const EstimatorBreakdown est = estimate(post.v, sol.u, sol.lambda, p.load.f_h, data, rule);
  rec.eta2 = est.eta2;
  rec.eta_A = est.total_A;
  rec.eta_B = est.total_B;
  rec.eta_C = est.total_C;
  rec.osc = est.total_osc;

  rec.I_v = energy_primal_continuous(post.v, data, rule);
  const ExtendedReal D = energy_dual_continuous(z, data, p.load.f_h, rule, line);
  rec.D_z = D.is_finite() ? D.value() : not_available;
  const ExtendedReal Ih = energy_primal_discrete(sol.u, p.load.f_h, p.obstacle.chi_h);
  const ExtendedReal Dh = energy_dual_discrete(z.rt, p.load.f_h, p.obstacle.chi_h,
                                               data.dirichlet ? &p.dirichlet : nullptr);
  rec.I_h = Ih.is_finite() ? Ih.value() : not_available;
  rec.D_h = Dh.is_finite() ? Dh.value() : not_available;
  rec.discrete_gap = rec.I_h - rec.D_h;

  std::optional<double> energy = config.exact_energy;
  if (!energy && data.exact && data.exact->energy)
    energy = data.exact->energy;
  if (energy)
    rec.rho2 = rho_reduced(post.v, sol.u, sol.lambda, data, *energy,
                           data.exact.has_value(), rule);
  if (config.compute_exact_errors && data.exact && data.exact->u && data.exact->grad_u)
  {
    rec.errors = exact_errors(sol.u, z, sol.lambda, *data.exact, rule, line);
    rec.has_exact = true;
  }
  if (indicators)
    *indicators = est.indicators();
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (callback)
  {
    LevelState st{&mesh, &p, &sol, &z, &post, &est, &rec};
    callback(st);
  }
  return rec;
}
//-----------------------------------------------------------------------------
AfemHistory afem_run(const ProblemData& data, const AfemConfig& config, const Mesh& mesh0,
                     const LevelCallback& callback)
{
  if (!(config.theta > 0.0 && config.theta < 1.0))
    throw std::invalid_argument("afem_run: theta must lie in (0, 1)");
  AfemHistory h;
  Mesh mesh = mesh0;
  for (int level = 0;; ++level)
  {
    std::vector<double> ind;
    ErrorRecord rec = solve_level(mesh, data, config, level, callback, &ind);
    if (!h.levels.empty() && rec.dofs <= h.levels.back().dofs)
      throw std::logic_error("afem_run: degrees of freedom did not increase");

    if (rec.eta2 <= config.eps_stop)
    {
      h.levels.push_back(rec);
      h.stop_reason = "estimator below tolerance";
      break;
    }
    if (level + 1 >= config.max_levels)
    {
      h.levels.push_back(rec);
      h.stop_reason = "maximum number of levels";
      break;
    }

    std::vector<int> marked;
    if (config.adaptive)
      marked = doerfler_mark(ind, config.theta);
    else
    {
      marked.resize(mesh.num_elements());
      std::iota(marked.begin(), marked.end(), 0);
    }
    rec.marked = static_cast<int>(marked.size());
    h.levels.push_back(rec);
    if (marked.empty())
    {
      h.stop_reason = "nothing marked";
      break;
    }
    Mesh next = refine_rgb(mesh, marked);
    if (next.num_elements() > config.max_elements)
    {
      h.stop_reason = "element limit";
      break;
    }
    mesh = std::move(next);
  }

  bool have_energy = config.exact_energy.has_value()
                     || (data.exact && data.exact->energy.has_value());
  if (!have_energy && h.levels.size() >= 3)
  {
    std::vector<double> iv;
    for (const auto& r : h.levels)
      iv.push_back(r.I_v);
    try
    {
      h.aitken_energy = aitken(iv);
      for (auto& r : h.levels)
        r.rho2 = r.I_v - *h.aitken_energy;
    }
    catch (const std::domain_error&)
    {
    }
  }
  return h;
}
//-----------------------------------------------------------------------------
void write_history_csv(const AfemHistory& history, std::ostream& os)
{
  os << "level,elements,dofs,h,pdas_iterations,marked,contact_elements,eta2,eta_A,eta_B,"
        "eta_C,osc,rho2,I_v,D_z,I_h,D_h,discrete_gap,max_flux_jump,e_u,e_Icru,e_z,e_Irtz,"
        "e_lambda_u,e_lambda_Icru,tot_u,tot_Icru\n";
  os << std::setprecision(12);
  auto num = [&os](double v) {
    if (std::isnan(v))
      os << "nan";
    else
      os << v;
  };
  for (const auto& r : history.levels)
  {
    os << r.level << ',' << r.elements << ',' << r.dofs << ',';
    num(r.h);
    os << ',' << r.pdas_iterations << ',' << r.marked << ',' << r.contact_elements;
    for (double v : {r.eta2, r.eta_A, r.eta_B, r.eta_C, r.osc, r.rho2, r.I_v, r.D_z, r.I_h,
                     r.D_h, r.discrete_gap, r.max_flux_jump})
    {
      os << ',';
      num(v);
    }
    const auto& e = r.errors;
    for (double v : {e.e_u, e.e_Icru, e.e_z, e.e_Irtz, e.e_lambda_u, e.e_lambda_Icru,
                     e.tot_u, e.tot_Icru})
    {
      os << ',';
      num(r.has_exact ? v : not_available);
    }
    os << '\n';
  }
}

} // namespace obstacle
