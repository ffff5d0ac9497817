#pragma once

#include "obstacle/geometry.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace obstacle
{

enum class BoundaryLabel : std::uint8_t
{
  Interior,
  Dirichlet,
  Neumann
};

/// How an element was produced by the last refinement step.
enum class RefineKind : std::uint8_t
{
  Initial,
  Unrefined,
  Red,
  Green,
  Blue
};

struct Element
{
  std::array<int, 3> vertices{};
  /// sides[i] is opposite vertices[i].
  std::array<int, 3> sides{};
  double area = 0.0;
  double diameter = 0.0;
  Vec2 barycenter;
};

struct Side
{
  std::array<int, 2> vertices{};
  /// elements[0] is T_- (the normal points out of it), elements[1] is T_+ or -1.
  std::array<int, 2> elements{-1, -1};
  BoundaryLabel label = BoundaryLabel::Interior;
  double length = 0.0;
  Vec2 midpoint;
  Vec2 normal;

  bool is_boundary() const { return elements[1] < 0; }
};

/// Assigns a label to a boundary side from its midpoint.
using BoundaryRule = std::function<BoundaryLabel(const Vec2&)>;

/// Key of an undirected edge.
inline std::uint64_t edge_key(int a, int b)
{
  if (a > b)
    std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

using EdgeLabelMap = std::unordered_map<std::uint64_t, BoundaryLabel>;

/// Conforming triangulation. Immutable after construction.
class Mesh
{
public:
  Mesh() = default;

  /// Triangles are reoriented counter-clockwise. Boundary sides are labelled
  /// by `rule` (Dirichlet when empty).
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
       const BoundaryRule& rule = {});

  /// Boundary sides are labelled by lookup; a missing key is an error.
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
       const EdgeLabelMap& labels);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_sides() const { return static_cast<int>(sides_.size()); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<Side>& sides() const { return sides_; }
  const Vec2& vertex(int i) const { return vertices_[i]; }
  const Element& element(int t) const { return elements_[t]; }
  const Side& side(int s) const { return sides_[s]; }

  std::array<Vec2, 3> coords(int t) const;

  /// +1 when n_S is the outer normal of T on S, -1 otherwise.
  int side_sign(int t, int local) const
  {
    return sides_[elements_[t].sides[local]].elements[0] == t ? 1 : -1;
  }

  /// Constant gradients of the barycentric coordinates of T.
  std::array<Vec2, 3> barycentric_gradients(int t) const;

  /// Barycentric coordinates of x with respect to T.
  std::array<double, 3> barycentric(int t, const Vec2& x) const;

  /// Elements sharing vertex v, ascending.
  std::vector<int> vertex_elements(int v) const;
  /// Offsets/indices of the vertex-to-element table.
  const std::vector<int>& vertex_element_offsets() const { return v2e_off_; }
  const std::vector<int>& vertex_element_indices() const { return v2e_idx_; }

  /// True when v lies on a Dirichlet side.
  bool is_dirichlet_vertex(int v) const { return dirichlet_vertex_[v] != 0; }

  /// Parent element in the previous mesh (-1 for initial meshes).
  const std::vector<int>& parents() const { return parents_; }
  const std::vector<RefineKind>& refine_kinds() const { return kinds_; }
  void set_history(std::vector<int> parents, std::vector<RefineKind> kinds);

  double total_area() const;
  double h_max() const;
  double h_min() const;
  /// Smallest interior angle in radians.
  double min_angle() const;
  /// max_T h_T / rho_T with rho_T the inradius.
  double chunkiness() const;
  int num_boundary_sides() const;
  int num_sides_with(BoundaryLabel label) const;

  /// Local index of side s in element t, or -1.
  int local_side(int t, int s) const;

  /// Side adjacency with consistent orientation (see conformity predicate).
  bool is_conforming() const;
  /// Vertices lying in the relative interior of some side.
  std::vector<int> hanging_nodes() const;

private:
  void build(const std::function<BoundaryLabel(int, const Vec2&)>& labeller);

  std::vector<Vec2> vertices_;
  std::vector<Element> elements_;
  std::vector<Side> sides_;
  std::vector<int> v2e_off_, v2e_idx_;
  std::vector<std::uint8_t> dirichlet_vertex_;
  std::vector<int> parents_;
  std::vector<RefineKind> kinds_;
};

/// Axis-aligned rectangle, optionally with an axis-aligned rectangle removed.
struct Domain
{
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  std::optional<std::array<double, 4>> removed; // {x0, x1, y0, y1}

  static Domain rectangle(double x0, double x1, double y0, double y1);
  /// (-a, a)^2 without [0, a] x [-a, 0].
  static Domain l_shape(double a);
  double area() const;
  bool contains(const Vec2& p, double tol = 1e-12) const;
  /// Distance to the boundary for interior points.
  double boundary_distance(const Vec2& p) const;
};

enum class DiagonalPattern
{
  Alternating,
  CrissCross,
  Uniform
};

DiagonalPattern parse_pattern(const std::string& name);
std::string to_string(DiagonalPattern p);

/// n cells per axis; cells inside the removed part are dropped.
Mesh build_structured(const Domain& domain, int n, const BoundaryRule& rule = {},
                      DiagonalPattern pattern = DiagonalPattern::Alternating);

/// Red refinement of the marked elements. Partial marking is accepted only
/// when no hanging node results.
Mesh refine_red(const Mesh& mesh, const std::vector<int>& marked);
Mesh refine_uniform(const Mesh& mesh, int times = 1);

/// Red-green-blue refinement with longest-edge reference edges.
Mesh refine_rgb(const Mesh& mesh, const std::vector<int>& marked);

/// Reference edge of every element (longest, ties to smallest side index).
std::vector<int> reference_edges(const Mesh& mesh);

struct Patches
{
  std::vector<std::vector<int>> element; // omega_T
  std::vector<std::vector<int>> side;    // omega_S
};

Patches patches(const Mesh& mesh);

} // namespace obstacle
