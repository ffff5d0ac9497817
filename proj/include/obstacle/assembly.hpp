#pragma once

#include "obstacle/mesh.hpp"
#include "obstacle/quadrature.hpp"
#include "obstacle/spaces.hpp"
#include "obstacle/sparse.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace obstacle
{

/// Analytic solution of a benchmark, where known.
struct ExactSolution
{
  ScalarField u;
  VectorField grad_u;
  /// lambda = f + div grad u.
  ScalarField lambda;
  /// Gradient of the exact flux z = grad u is not needed; div z = lambda - f.
  std::function<bool(const Vec2&)> in_contact;
  /// I(u), when known in closed form.
  std::optional<double> energy;
};

struct ProblemData
{
  std::string name = "custom";
  ScalarField f;
  ScalarField chi;
  /// Gradient of chi; central differences of chi when empty.
  VectorField grad_chi;
  /// Dirichlet data g; zero when empty.
  ScalarField dirichlet;
  /// Boundary labels; Dirichlet everywhere when empty.
  BoundaryRule boundary;
  /// f is element-wise constant on every mesh used (f = f_h).
  bool f_piecewise_constant = false;
  /// chi is affine on every element of every mesh used.
  bool chi_piecewise_affine = false;
  std::optional<ExactSolution> exact;

  double g(const Vec2& x) const { return dirichlet ? dirichlet(x) : 0.0; }
  Vec2 chi_gradient(const Vec2& x) const;
};

/// Throws std::invalid_argument when chi exceeds the Dirichlet data at a
/// Dirichlet side midpoint.
void validate(const ProblemData& data, const Mesh& mesh, double tol = 1e-12);

/// Free side dofs and multiplier elements.
struct DofMap
{
  std::vector<int> side_to_dof; // -1 on Dirichlet sides
  std::vector<int> dof_to_side;
  std::vector<int> elem_to_mult; // -1 on excluded elements
  std::vector<int> mult_to_elem;
  std::vector<int> excluded;

  int num_dofs() const { return static_cast<int>(dof_to_side.size()); }
  int num_multipliers() const { return static_cast<int>(mult_to_elem.size()); }
};

/// All non-Dirichlet sides are free, all elements carry a multiplier.
DofMap make_dofmap(const Mesh& mesh);
/// Drops the listed elements from the multiplier enumeration.
void exclude_elements(DofMap& dofs, const std::vector<int>& elements);

/// Stiffness over all sides (no masking); constants lie in its kernel.
CsrMatrix assemble_stiffness_full(const Mesh& mesh);
/// Stiffness restricted to free dofs.
CsrMatrix assemble_stiffness(const Mesh& mesh, const DofMap& dofs);
/// Entry (S, T) = |T|/3 for free S on the boundary of T.
CsrMatrix assemble_coupling(const Mesh& mesh, const DofMap& dofs);
/// Elements whose coupling column is zero.
std::vector<int> find_excluded_elements(const CsrMatrix& coupling, const DofMap& dofs);

struct ObstacleVectors
{
  CrFunction icr_chi; // I_cr chi on all sides
  P0Function chi_h;   // Pi_h I_cr chi
  Vector X;           // I_cr chi on free dofs
};

ObstacleVectors assemble_obstacle_vectors(const Mesh& mesh, const ProblemData& data,
                                          const DofMap& dofs,
                                          const LineRule& rule = gauss_line(2));

struct LoadVectors
{
  P0Function f_h;
  Vector F;   // f_h|_T |T| per element
  Vector rhs; // (f_h, Pi_h phi_S) per free dof
};

LoadVectors assemble_load(const Mesh& mesh, const ProblemData& data, const DofMap& dofs,
                          const TriangleRule& rule = default_rule());

struct Oscillation
{
  std::vector<double> element;
  double total = 0.0;
};

/// h_T^2 ||f - f_h||_T^2.
Oscillation osc(const Mesh& mesh, const ProblemData& data, const P0Function& f_h,
                const TriangleRule& rule = high_order_rule());

/// Everything needed by the solvers on one mesh.
struct DiscreteProblem
{
  const Mesh* mesh = nullptr;
  const ProblemData* data = nullptr;
  DofMap dofs;
  CsrMatrix stiffness; // free x free
  CsrMatrix coupling;  // free x multipliers
  CrFunction dirichlet; // g on Dirichlet sides, 0 on free sides
  ObstacleVectors obstacle;
  LoadVectors load;
  /// Right-hand side after Dirichlet lifting.
  Vector rhs;

  /// Side values of u from free dofs.
  CrFunction expand(const Vector& U) const;
  /// Element multiplier field; zero on excluded elements.
  P0Function expand_multiplier(const Vector& L) const;
  /// Barycenter mean of the full side vector for multiplier index j.
  double mean(const Vector& U, int j) const;
  /// Free-dof restriction of a side vector.
  Vector restrict(const CrFunction& v) const;
};

DiscreteProblem assemble(const Mesh& mesh, const ProblemData& data,
                         const TriangleRule& rule = default_rule());

} // namespace obstacle
