#pragma once

#include "obstacle/assembly.hpp"
#include "obstacle/mesh.hpp"

#include <string>

namespace obstacle
{

struct Benchmark
{
  std::string id;
  ProblemData data;
  Domain domain;
  int cells = 4; // per axis
  DiagonalPattern pattern = DiagonalPattern::Alternating;

  Mesh initial_mesh() const;
};

/// (-3/2, 3/2)^2, f = -2, chi = 0, radially symmetric exact solution with
/// contact set the unit disk; Dirichlet data from the exact solution.
Benchmark ring_benchmark();

/// L-shaped domain with a corner singularity, chi = 0.
Benchmark corner_benchmark();

/// (-1, 1)^2, f = 1, chi = distance to the boundary. No exact solution.
Benchmark pyramid_benchmark();

/// "ring", "corner" or "pyramid".
Benchmark make_benchmark(const std::string& id);

/// I(u) of the ring benchmark by one-dimensional radial integration.
double ring_exact_energy();
/// I(u) of the corner benchmark by one-dimensional radial integration.
double corner_exact_energy();

/// Cut-off function and its first two derivatives with respect to r.
struct Cutoff
{
  double g, dg, d2g;
};
Cutoff corner_cutoff(double r);

} // namespace obstacle
