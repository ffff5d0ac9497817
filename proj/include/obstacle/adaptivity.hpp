#pragma once

#include "obstacle/assembly.hpp"
#include "obstacle/duality.hpp"
#include "obstacle/estimator.hpp"
#include "obstacle/mesh.hpp"
#include "obstacle/solver.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace obstacle
{

/// Greedy selection in descending order (ties by ascending id) until the
/// selected sum reaches theta^2 times the total.
std::vector<int> doerfler_mark(const std::vector<double>& indicators, double theta);

struct AfemConfig
{
  double theta = 0.5;
  double eps_stop = 0.0;
  int max_levels = 10;
  bool adaptive = true;
  /// Stop before a refinement would exceed this many elements.
  int max_elements = 100000;
  PdasOptions pdas;
  /// I(u) for the reduced error measure; the exact record is used if absent.
  std::optional<double> exact_energy;
  bool compute_exact_errors = true;
  /// Points per direction of the conical product rule for continuous integrals.
  int triangle_order = 6;
  /// Gauss points on sides for boundary and interpolation integrals.
  int line_order = 4;
};

constexpr double not_available = std::numeric_limits<double>::quiet_NaN();

/// One row of the convergence history.
struct ErrorRecord
{
  int level = 0;
  int elements = 0;
  int dofs = 0;
  double h = 0.0;
  int pdas_iterations = 0;
  int marked = 0;
  int contact_elements = 0;

  double eta2 = 0.0;
  double eta_A = 0.0, eta_B = 0.0, eta_C = 0.0, osc = 0.0;
  double rho2 = not_available;

  double I_v = 0.0;             // I(v)
  double D_z = not_available;   // D(z_h), NaN for -inf
  double I_h = 0.0;             // discrete primal energy
  double D_h = not_available;   // discrete dual energy
  double discrete_gap = not_available;
  double max_flux_jump = 0.0;

  bool has_exact = false;
  ExactErrors errors;
  double seconds = 0.0;
};

/// Full state of one solve-estimate step.
struct LevelState
{
  const Mesh* mesh = nullptr;
  const DiscreteProblem* problem = nullptr;
  const SolveOutcome* solution = nullptr;
  const DualField* dual = nullptr;
  const PostProcessed* post = nullptr;
  const EstimatorBreakdown* estimator = nullptr;
  const ErrorRecord* record = nullptr;
};

struct AfemHistory
{
  std::vector<ErrorRecord> levels;
  std::string stop_reason;
  /// Aitken extrapolant of I(v_k) when no exact energy was supplied.
  std::optional<double> aitken_energy;
};

using LevelCallback = std::function<void(const LevelState&)>;

/// Solve, estimate and (in adaptive mode) mark on one mesh.
ErrorRecord solve_level(const Mesh& mesh, const ProblemData& data, const AfemConfig& config,
                        int level, const LevelCallback& callback = {},
                        std::vector<double>* indicators = nullptr);

AfemHistory afem_run(const ProblemData& data, const AfemConfig& config, const Mesh& mesh0,
                     const LevelCallback& callback = {});

void write_history_csv(const AfemHistory& history, std::ostream& os);

} // namespace obstacle
