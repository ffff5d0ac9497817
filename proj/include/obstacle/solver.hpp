#pragma once

#include "obstacle/assembly.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace obstacle
{

enum class ActiveTest
{
  /// L_T + alpha (m_T(U) - chi_T) < 0
  Mean,
  /// L_T < 0
  Classical
};

/// Active-set mask per multiplier element. Ties count as inactive.
std::vector<char> active_set(const Vector& means, const Vector& L, const Vector& chi,
                             double alpha, ActiveTest test = ActiveTest::Mean);

struct PdasState
{
  Vector U;                 // free side values
  Vector L;                 // multiplier element values
  std::vector<char> active; // per multiplier element
  int k = 0;
  double alpha = 1.0;
};

struct PdasIteration
{
  int k = 0;
  int active = 0;
  double du_inf = 0.0;
  double residual = 0.0;
};

struct PdasOptions
{
  double alpha = 1.0;
  double eps_stop = 0.0;
  int max_iter = 200;
  ActiveTest test = ActiveTest::Mean;
  double tol = 1e-12;
  /// Initial (U, L); unconstrained solve and zero when absent.
  std::optional<std::pair<Vector, Vector>> init;
};

struct SolveOutcome
{
  CrFunction u;
  P0Function lambda; // zero on excluded elements
  PdasState state;
  bool converged = false;
  /// Iterations until the active set repeated.
  int iterations = 0;
  std::vector<PdasIteration> log;
  std::string message;
};

/// Multiplier-element data used by the active-set test.
Vector element_means(const DiscreteProblem& p, const Vector& U);
Vector obstacle_means(const DiscreteProblem& p);

/// Solve the equality-constrained system for a given active set; returns
/// (U, L) with L zero off the active set.
std::pair<Vector, Vector> solve_active(const DiscreteProblem& p,
                                       const std::vector<char>& active,
                                       SolveReport* report = nullptr, double tol = 1e-12);

SolveOutcome pdas_solve(const DiscreteProblem& p, const PdasOptions& opts = {});

void write_iteration_log(const SolveOutcome& out, std::ostream& os);

struct PenaltyOutcome
{
  CrFunction u;
  P0Function lambda;
  Vector U;
  Vector L;
  int newton_iterations = 0;
  bool converged = false;
  double residual = 0.0;
};

/// Minimiser of the discrete energy plus (2 eps^2)^{-1} ||(Pi_h v - chi_h)_-||^2
/// by semismooth Newton; lambda_eps = eps^{-2} min(Pi_h u - chi_h, 0).
PenaltyOutcome penalized_solve(const DiscreteProblem& p, double eps,
                               double newton_tol = 1e-12, int max_iter = 200);

/// Enumerates every active set with a dense saddle-point solve. Requires at
/// most 20 multiplier elements.
SolveOutcome brute_force_solve(const DiscreteProblem& p, double tol = 1e-11);

/// Stationarity residual max_S |(grad u, grad phi_S) + (lambda - f_h, Pi_h phi_S)|.
double stationarity_residual(const DiscreteProblem& p, const Vector& U, const Vector& L);

} // namespace obstacle
