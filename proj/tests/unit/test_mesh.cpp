#include "obstacle/mesh.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace obstacle;
using testing::unit_square;

namespace
{

// Geometric and topological invariants every mesh must satisfy.
void check_invariants(const Mesh& m, double area)
{
  double total = 0.0;
  for (int t = 0; t < m.num_elements(); ++t)
  {
    const Element& e = m.element(t);
    const auto c = m.coords(t);
    CHECK(cross(c[1] - c[0], c[2] - c[0]) > 0.0);
    CHECK(e.area == doctest::Approx(0.5 * cross(c[1] - c[0], c[2] - c[0])));
    const Vec2 bary = (c[0] + c[1] + c[2]) / 3.0;
    CHECK(norm(e.barycenter - bary) < 1e-14);
    const double h = std::max({norm(c[1] - c[0]), norm(c[2] - c[1]), norm(c[0] - c[2])});
    CHECK(e.diameter == doctest::Approx(h));
    for (int i = 0; i < 3; ++i)
    {
      const Side& s = m.side(e.sides[i]);
      // Side i is opposite vertex i.
      CHECK(s.vertices[0] != e.vertices[i]);
      CHECK(s.vertices[1] != e.vertices[i]);
      CHECK((s.elements[0] == t || s.elements[1] == t));
    }
    total += e.area;
  }
  CHECK(total == doctest::Approx(area).epsilon(1e-12));

  for (int s = 0; s < m.num_sides(); ++s)
  {
    const Side& sd = m.side(s);
    const Vec2 a = m.vertex(sd.vertices[0]), b = m.vertex(sd.vertices[1]);
    CHECK(norm(sd.midpoint - 0.5 * (a + b)) < 1e-14);
    CHECK(sd.length == doctest::Approx(norm(b - a)));
    CHECK(norm(sd.normal) == doctest::Approx(1.0));
    CHECK(std::abs(dot(sd.normal, b - a)) < 1e-12);
    const Vec2 out = sd.midpoint - m.element(sd.elements[0]).barycenter;
    CHECK(dot(sd.normal, out) > 0.0);
    if (sd.is_boundary())
      CHECK(sd.label != BoundaryLabel::Interior);
    else
    {
      CHECK(sd.label == BoundaryLabel::Interior);
      const Vec2 dir = m.element(sd.elements[1]).barycenter - m.element(sd.elements[0]).barycenter;
      CHECK(dot(sd.normal, dir) > 0.0);
    }
  }
  CHECK(m.is_conforming());
  CHECK(m.hanging_nodes().empty());
}

// Independent hanging-node check: no vertex lies strictly inside a side.
bool no_vertex_inside_sides(const Mesh& m)
{
  for (const auto& s : m.sides())
  {
    const Vec2 a = m.vertex(s.vertices[0]), b = m.vertex(s.vertices[1]);
    for (int v = 0; v < m.num_vertices(); ++v)
    {
      if (v == s.vertices[0] || v == s.vertices[1])
        continue;
      const Vec2 p = m.vertex(v);
      const double t = dot(p - a, b - a) / norm2(b - a);
      if (t > 1e-9 && t < 1.0 - 1e-9 && std::abs(cross(b - a, p - a)) < 1e-12 * norm2(b - a))
        return false;
    }
  }
  return true;
}

} // namespace

TEST_CASE("Unit square with one cell")
{
  const Mesh m = unit_square(1);
  CHECK(m.num_elements() == 2);
  CHECK(m.num_sides() == 5);
  CHECK(m.num_boundary_sides() == 4);
  CHECK(m.num_sides_with(BoundaryLabel::Dirichlet) == 4);
  check_invariants(m, 1.0);
}

TEST_CASE("Ring grid has the expected size")
{
  const Mesh m = build_structured(Domain::rectangle(-1.5, 1.5, -1.5, 1.5), 4);
  CHECK(m.num_elements() == 32);
  CHECK(m.h_max() == doctest::Approx(3.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-14));
  check_invariants(m, 9.0);
}

TEST_CASE("L-shaped grid consists of 48 halved squares")
{
  const Mesh m = build_structured(Domain::l_shape(2.0), 8);
  CHECK(m.num_elements() == 96);
  check_invariants(m, 12.0);
  for (const auto& e : m.elements())
    CHECK(!(e.barycenter.x > 0.0 && e.barycenter.y < 0.0));
}

TEST_CASE("Structured patterns")
{
  const Domain d = Domain::rectangle(0.0, 2.0, 0.0, 1.0);
  for (auto p : {DiagonalPattern::Alternating, DiagonalPattern::Uniform,
                 DiagonalPattern::CrissCross})
  {
    const Mesh m = build_structured(d, 3, {}, p);
    CHECK(m.num_elements() == (p == DiagonalPattern::CrissCross ? 36 : 18));
    check_invariants(m, 2.0);
    CHECK(parse_pattern(to_string(p)) == p);
  }
  CHECK_THROWS(parse_pattern("diagonal"));
}

TEST_CASE("Invalid structured input is rejected")
{
  CHECK_THROWS(build_structured(Domain::rectangle(0.0, 0.0, 0.0, 1.0), 2));
  CHECK_THROWS(build_structured(Domain::rectangle(0.0, 1.0, 0.0, 1.0), 0));
}

TEST_CASE("Boundary rule labels sides by midpoint")
{
  auto rule = [](const Vec2& x) {
    return x.x > 1.0 - 1e-12 ? BoundaryLabel::Neumann : BoundaryLabel::Dirichlet;
  };
  const Mesh m = unit_square(4, rule);
  CHECK(m.num_sides_with(BoundaryLabel::Neumann) == 4);
  CHECK(m.num_sides_with(BoundaryLabel::Dirichlet) == 12);
  // Vertices on the Neumann side are Dirichlet vertices only at its ends.
  int dv = 0;
  for (int v = 0; v < m.num_vertices(); ++v)
    dv += m.is_dirichlet_vertex(v) ? 1 : 0;
  CHECK(dv == 16 - 3);
}

TEST_CASE("Explicit construction reorients and validates")
{
  std::vector<Vec2> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  // Clockwise input is reoriented.
  const Mesh m(v, {{0, 2, 1}, {0, 3, 2}});
  check_invariants(m, 1.0);

  EdgeLabelMap labels;
  labels[edge_key(0, 1)] = BoundaryLabel::Dirichlet;
  labels[edge_key(1, 2)] = BoundaryLabel::Neumann;
  labels[edge_key(2, 3)] = BoundaryLabel::Dirichlet;
  CHECK_THROWS(Mesh(v, {{0, 1, 2}, {0, 2, 3}}, labels));
  labels[edge_key(3, 0)] = BoundaryLabel::Dirichlet;
  const Mesh l(v, {{0, 1, 2}, {0, 2, 3}}, labels);
  CHECK(l.num_sides_with(BoundaryLabel::Neumann) == 1);

  std::vector<Vec2> w{{0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  CHECK_THROWS(Mesh(w, {{0, 1, 2}, {0, 2, 3}, {0, 1, 4}, {0, 2, 4}}));
  CHECK_THROWS(Mesh(v, {{0, 1, 1}}));
}

TEST_CASE("Red refinement of the unit square")
{
  const Mesh m = unit_square(1);
  const Mesh r = refine_red(m, {0, 1});
  CHECK(r.num_elements() == 8);
  check_invariants(r, 1.0);
  for (int t = 0; t < r.num_elements(); ++t)
  {
    const int p = r.parents()[t];
    REQUIRE(p >= 0);
    CHECK(r.element(t).diameter == doctest::Approx(0.5 * m.element(p).diameter));
    CHECK(r.refine_kinds()[t] == RefineKind::Red);
  }
  // Empty marking leaves the mesh unchanged.
  const Mesh same = refine_red(m, {});
  CHECK(same.num_elements() == 2);
  CHECK(same.vertices() == m.vertices());
  // Marking one element alone would leave a hanging node.
  CHECK_THROWS(refine_red(m, {0}));
}

TEST_CASE("Uniform refinement halves the mesh size")
{
  Mesh m = build_structured(Domain::rectangle(-1.5, 1.5, -1.5, 1.5), 4);
  const double h0 = m.h_max();
  for (int k = 1; k <= 7; ++k)
  {
    m = refine_uniform(m);
    CHECK(m.num_elements() == 32 * (1 << (2 * k)));
    CHECK(m.h_max() == doctest::Approx(h0 / (1 << k)).epsilon(1e-12));
    CHECK(m.total_area() == doctest::Approx(9.0).epsilon(1e-12));
  }
  CHECK(m.is_conforming());
}

TEST_CASE("RGB refinement with full marking equals red refinement")
{
  const Mesh m = build_structured(Domain::l_shape(1.0), 4);
  std::vector<int> all(m.num_elements());
  for (int t = 0; t < m.num_elements(); ++t)
    all[t] = t;
  const Mesh a = refine_rgb(m, all);
  const Mesh b = refine_red(m, all);
  REQUIRE(a.num_elements() == b.num_elements());
  auto key = [](const Mesh& x) {
    std::multiset<std::pair<double, double>> s;
    for (const auto& e : x.elements())
      s.insert({std::round(e.barycenter.x * 1e9), std::round(e.barycenter.y * 1e9)});
    return s;
  };
  CHECK(key(a) == key(b));
}

TEST_CASE("RGB refinement of one triangle closes the neighbour")
{
  const Mesh m = unit_square(1);
  const Mesh r = refine_rgb(m, {0});
  check_invariants(r, 1.0);
  CHECK(no_vertex_inside_sides(r));
  int red = 0, other = 0;
  for (int t = 0; t < r.num_elements(); ++t)
  {
    if (r.parents()[t] == 0)
    {
      CHECK(r.refine_kinds()[t] == RefineKind::Red);
      ++red;
    }
    else
    {
      CHECK(r.refine_kinds()[t] != RefineKind::Red);
      ++other;
    }
  }
  CHECK(red == 4);
  CHECK(other >= 2);
}

TEST_CASE("RGB refinement keeps shape regularity and conformity")
{
  Mesh m = unit_square(2);
  const double angle0 = m.min_angle();
  std::mt19937 rng(7);
  for (int k = 0; k < 10; ++k)
  {
    // Refine the element nearest to a fixed corner.
    int best = 0;
    for (int t = 0; t < m.num_elements(); ++t)
      if (norm(m.element(t).barycenter) < norm(m.element(best).barycenter))
        best = t;
    m = refine_rgb(m, {best});
    CHECK(m.min_angle() >= 0.5 * angle0 - 1e-12);
    CHECK(no_vertex_inside_sides(m));
  }
  check_invariants(m, 1.0);

  for (int k = 0; k < 6; ++k)
  {
    std::vector<int> marked;
    std::uniform_int_distribution<int> pick(0, m.num_elements() - 1);
    for (int i = 0; i < 1 + m.num_elements() / 10; ++i)
      marked.push_back(pick(rng));
    std::sort(marked.begin(), marked.end());
    marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
    const Mesh next = refine_rgb(m, marked);
    // Every marked element is refined.
    std::vector<int> children(m.num_elements(), 0);
    for (int p : next.parents())
      children[p]++;
    for (int t : marked)
      CHECK(children[t] == 4);
    m = next;
    CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.is_conforming());
    CHECK(m.min_angle() >= 0.5 * angle0 - 1e-12);
  }
  CHECK(no_vertex_inside_sides(m));
  CHECK(m.chunkiness() < 10.0);
}

TEST_CASE("Reference edges are longest edges")
{
  const Mesh m = unit_square(2);
  const auto ref = reference_edges(m);
  for (int t = 0; t < m.num_elements(); ++t)
    CHECK(m.side(ref[t]).length == doctest::Approx(m.element(t).diameter));
}

TEST_CASE("Patches")
{
  const Mesh sq = unit_square(1);
  const Patches p = patches(sq);
  for (int s = 0; s < sq.num_sides(); ++s)
    CHECK(p.side[s].size() == (sq.side(s).is_boundary() ? 1u : 2u));

  const Mesh m = build_structured(Domain::rectangle(-1.5, 1.5, -1.5, 1.5), 4);
  const Patches q = patches(m);
  for (int t = 0; t < m.num_elements(); ++t)
  {
    std::vector<int> scan;
    for (int u = 0; u < m.num_elements(); ++u)
    {
      bool shares = false;
      for (int a : m.element(t).vertices)
        for (int b : m.element(u).vertices)
          shares = shares || a == b;
      if (shares)
        scan.push_back(u);
    }
    auto got = q.element[t];
    std::sort(got.begin(), got.end());
    CHECK(got == scan);
  }
}

TEST_CASE("Domain helpers")
{
  const Domain l = Domain::l_shape(2.0);
  CHECK(l.area() == doctest::Approx(12.0));
  CHECK(l.contains({-1.0, -1.0}));
  CHECK(!l.contains({1.0, -1.0}));
  CHECK(l.boundary_distance({-1.0, 1.0}) == doctest::Approx(1.0));
  CHECK(l.boundary_distance({0.5, 0.25}) == doctest::Approx(0.25));
  const Domain r = Domain::rectangle(-1.0, 1.0, -1.0, 1.0);
  CHECK(r.boundary_distance({0.5, 0.0}) == doctest::Approx(0.5));
}
