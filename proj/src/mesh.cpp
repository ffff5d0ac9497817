#include "obstacle/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace obstacle
{

namespace
{
double signed_area(const Vec2& a, const Vec2& b, const Vec2& c)
{
  return 0.5 * cross(b - a, c - a);
}
} // namespace

//-----------------------------------------------------------------------------
Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
           const BoundaryRule& rule)
    : vertices_(std::move(vertices))
{
  elements_.resize(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t)
    elements_[t].vertices = triangles[t];
  build([&rule](int, const Vec2& mid) {
    return rule ? rule(mid) : BoundaryLabel::Dirichlet;
  });
}
//-----------------------------------------------------------------------------
Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
           const EdgeLabelMap& labels)
    : vertices_(std::move(vertices))
{
  elements_.resize(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t)
    elements_[t].vertices = triangles[t];
  build([this, &labels](int s, const Vec2&) {
    const auto& sd = sides_[s];
    auto it = labels.find(edge_key(sd.vertices[0], sd.vertices[1]));
    if (it == labels.end() || it->second == BoundaryLabel::Interior)
      throw std::runtime_error("Mesh: unlabelled boundary side");
    return it->second;
  });
}
//-----------------------------------------------------------------------------
void Mesh::build(const std::function<BoundaryLabel(int, const Vec2&)>& labeller)
{
  const int nv = num_vertices();
  for (auto& e : elements_)
  {
    for (int v : e.vertices)
      if (v < 0 || v >= nv)
        throw std::invalid_argument("Mesh: vertex index out of range");
    if (e.vertices[0] == e.vertices[1] || e.vertices[1] == e.vertices[2]
        || e.vertices[0] == e.vertices[2])
      throw std::invalid_argument("Mesh: repeated vertex in element");
    const Vec2 &a = vertices_[e.vertices[0]], &b = vertices_[e.vertices[1]],
               &c = vertices_[e.vertices[2]];
    double area = signed_area(a, b, c);
    if (area == 0.0 || !std::isfinite(area))
      throw std::invalid_argument("Mesh: degenerate element");
    if (area < 0.0)
    {
      std::swap(e.vertices[1], e.vertices[2]);
      area = -area;
    }
    e.area = area;
    e.barycenter = (a + b + c) / 3.0;
    e.diameter = std::max({norm(b - a), norm(c - b), norm(a - c)});
  }

  std::unordered_map<std::uint64_t, int> index;
  index.reserve(2 * elements_.size() + 8);
  sides_.clear();
  sides_.reserve(elements_.size() * 3 / 2 + 8);
  for (int t = 0; t < num_elements(); ++t)
  {
    auto& e = elements_[t];
    for (int i = 0; i < 3; ++i)
    {
      const int p = e.vertices[(i + 1) % 3], q = e.vertices[(i + 2) % 3];
      auto [it, fresh] = index.try_emplace(edge_key(p, q), num_sides());
      if (fresh)
      {
        Side s;
        s.vertices = {p, q};
        s.elements = {t, -1};
        sides_.push_back(s);
      }
      else
      {
        Side& s = sides_[it->second];
        if (s.elements[1] >= 0)
          throw std::invalid_argument("Mesh: side shared by more than two elements");
        s.elements[1] = t;
      }
      e.sides[i] = it->second;
    }
  }

  dirichlet_vertex_.assign(nv, 0);
  for (int s = 0; s < num_sides(); ++s)
  {
    Side& sd = sides_[s];
    const Vec2 &p = vertices_[sd.vertices[0]], &q = vertices_[sd.vertices[1]];
    const Vec2 d = q - p;
    sd.length = norm(d);
    sd.midpoint = 0.5 * (p + q);
    // Counter-clockwise traversal in T_-, so (dy, -dx) points out of it.
    sd.normal = Vec2{d.y, -d.x} / sd.length;
    if (sd.is_boundary())
    {
      sd.label = labeller(s, sd.midpoint);
      if (sd.label == BoundaryLabel::Interior)
        throw std::invalid_argument("Mesh: boundary side labelled interior");
      if (sd.label == BoundaryLabel::Dirichlet)
        dirichlet_vertex_[sd.vertices[0]] = dirichlet_vertex_[sd.vertices[1]] = 1;
    }
  }

  v2e_off_.assign(nv + 1, 0);
  for (const auto& e : elements_)
    for (int v : e.vertices)
      ++v2e_off_[v + 1];
  for (int v = 0; v < nv; ++v)
    v2e_off_[v + 1] += v2e_off_[v];
  v2e_idx_.resize(v2e_off_[nv]);
  std::vector<int> fill(v2e_off_.begin(), v2e_off_.end() - 1);
  for (int t = 0; t < num_elements(); ++t)
    for (int v : elements_[t].vertices)
      v2e_idx_[fill[v]++] = t;

  parents_.assign(elements_.size(), -1);
  kinds_.assign(elements_.size(), RefineKind::Initial);
}
//-----------------------------------------------------------------------------
void Mesh::set_history(std::vector<int> parents, std::vector<RefineKind> kinds)
{
  if (parents.size() != elements_.size() || kinds.size() != elements_.size())
    throw std::invalid_argument("Mesh::set_history: size mismatch");
  parents_ = std::move(parents);
  kinds_ = std::move(kinds);
}
//-----------------------------------------------------------------------------
std::array<Vec2, 3> Mesh::coords(int t) const
{
  const auto& v = elements_[t].vertices;
  return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
}
//-----------------------------------------------------------------------------
std::array<Vec2, 3> Mesh::barycentric_gradients(int t) const
{
  const auto c = coords(t);
  const double two_area = 2.0 * elements_[t].area;
  std::array<Vec2, 3> g;
  for (int i = 0; i < 3; ++i)
  {
    const Vec2 e = c[(i + 2) % 3] - c[(i + 1) % 3];
    g[i] = Vec2{-e.y, e.x} / two_area;
  }
  return g;
}
//-----------------------------------------------------------------------------
std::array<double, 3> Mesh::barycentric(int t, const Vec2& x) const
{
  const auto c = coords(t);
  const double a = elements_[t].area;
  return {signed_area(x, c[1], c[2]) / a, signed_area(c[0], x, c[2]) / a,
          signed_area(c[0], c[1], x) / a};
}
//-----------------------------------------------------------------------------
std::vector<int> Mesh::vertex_elements(int v) const
{
  return {v2e_idx_.begin() + v2e_off_[v], v2e_idx_.begin() + v2e_off_[v + 1]};
}
//-----------------------------------------------------------------------------
double Mesh::total_area() const
{
  double s = 0.0;
  for (const auto& e : elements_)
    s += e.area;
  return s;
}
//-----------------------------------------------------------------------------
double Mesh::h_max() const
{
  double h = 0.0;
  for (const auto& e : elements_)
    h = std::max(h, e.diameter);
  return h;
}
//-----------------------------------------------------------------------------
double Mesh::h_min() const
{
  double h = std::numeric_limits<double>::max();
  for (const auto& e : elements_)
    h = std::min(h, e.diameter);
  return h;
}
//-----------------------------------------------------------------------------
double Mesh::min_angle() const
{
  double m = std::numbers::pi;
  for (int t = 0; t < num_elements(); ++t)
  {
    const auto c = coords(t);
    for (int i = 0; i < 3; ++i)
    {
      const Vec2 u = c[(i + 1) % 3] - c[i], w = c[(i + 2) % 3] - c[i];
      m = std::min(m, std::atan2(std::abs(cross(u, w)), dot(u, w)));
    }
  }
  return m;
}
//-----------------------------------------------------------------------------
double Mesh::chunkiness() const
{
  double m = 0.0;
  for (const auto& e : elements_)
  {
    double perim = 0.0;
    for (int s : e.sides)
      perim += sides_[s].length;
    const double rho = 2.0 * e.area / perim;
    m = std::max(m, e.diameter / rho);
  }
  return m;
}
//-----------------------------------------------------------------------------
int Mesh::num_boundary_sides() const
{
  return static_cast<int>(std::count_if(sides_.begin(), sides_.end(),
                                        [](const Side& s) { return s.is_boundary(); }));
}
//-----------------------------------------------------------------------------
int Mesh::num_sides_with(BoundaryLabel label) const
{
  return static_cast<int>(std::count_if(sides_.begin(), sides_.end(),
                                        [label](const Side& s) { return s.label == label; }));
}
//-----------------------------------------------------------------------------
int Mesh::local_side(int t, int s) const
{
  for (int i = 0; i < 3; ++i)
    if (elements_[t].sides[i] == s)
      return i;
  return -1;
}
//-----------------------------------------------------------------------------
bool Mesh::is_conforming() const
{
  for (int s = 0; s < num_sides(); ++s)
  {
    const Side& sd = sides_[s];
    int orient[2] = {0, 0};
    for (int k = 0; k < 2; ++k)
    {
      const int t = sd.elements[k];
      if (t < 0)
        continue;
      const int i = local_side(t, s);
      if (i < 0)
        return false;
      const auto& v = elements_[t].vertices;
      const int p = v[(i + 1) % 3], q = v[(i + 2) % 3];
      if (p == sd.vertices[0] && q == sd.vertices[1])
        orient[k] = 1;
      else if (p == sd.vertices[1] && q == sd.vertices[0])
        orient[k] = -1;
      else
        return false;
    }
    if (sd.elements[1] >= 0 && orient[0] != -orient[1])
      return false;
    if (orient[0] != 1)
      return false;
  }
  return hanging_nodes().empty();
}
//-----------------------------------------------------------------------------
std::vector<int> Mesh::hanging_nodes() const
{
  // A hanging node sits on a side that has only one neighbour.
  std::vector<int> order(vertices_.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [this](int a, int b) {
    return vertices_[a].x < vertices_[b].x;
  });
  std::vector<int> hanging;
  for (const Side& sd : sides_)
  {
    if (!sd.is_boundary())
      continue;
    const Vec2 &p = vertices_[sd.vertices[0]], &q = vertices_[sd.vertices[1]];
    const double tol = 1e-12 * sd.length;
    const double xlo = std::min(p.x, q.x) - tol, xhi = std::max(p.x, q.x) + tol;
    auto lo = std::lower_bound(order.begin(), order.end(), xlo,
                               [this](int a, double x) { return vertices_[a].x < x; });
    for (auto it = lo; it != order.end() && vertices_[*it].x <= xhi; ++it)
    {
      const int v = *it;
      if (v == sd.vertices[0] || v == sd.vertices[1])
        continue;
      const Vec2 x = vertices_[v];
      const Vec2 d = q - p;
      if (std::abs(cross(d, x - p)) > tol * sd.length)
        continue;
      const double s = dot(x - p, d) / (sd.length * sd.length);
      if (s > 1e-12 && s < 1.0 - 1e-12)
        hanging.push_back(v);
    }
  }
  std::sort(hanging.begin(), hanging.end());
  hanging.erase(std::unique(hanging.begin(), hanging.end()), hanging.end());
  return hanging;
}

//-----------------------------------------------------------------------------
Domain Domain::rectangle(double x0, double x1, double y0, double y1)
{
  Domain d;
  d.x0 = x0;
  d.x1 = x1;
  d.y0 = y0;
  d.y1 = y1;
  return d;
}
//-----------------------------------------------------------------------------
Domain Domain::l_shape(double a)
{
  Domain d = rectangle(-a, a, -a, a);
  d.removed = std::array<double, 4>{0.0, a, -a, 0.0};
  return d;
}
//-----------------------------------------------------------------------------
double Domain::area() const
{
  double a = (x1 - x0) * (y1 - y0);
  if (removed)
  {
    const auto& r = *removed;
    const double w = std::max(0.0, std::min(r[1], x1) - std::max(r[0], x0));
    const double h = std::max(0.0, std::min(r[3], y1) - std::max(r[2], y0));
    a -= w * h;
  }
  return a;
}
//-----------------------------------------------------------------------------
bool Domain::contains(const Vec2& p, double tol) const
{
  if (p.x < x0 - tol || p.x > x1 + tol || p.y < y0 - tol || p.y > y1 + tol)
    return false;
  if (removed)
  {
    const auto& r = *removed;
    if (p.x > r[0] + tol && p.x < r[1] - tol && p.y > r[2] + tol && p.y < r[3] - tol)
      return false;
  }
  return true;
}
//-----------------------------------------------------------------------------
double Domain::boundary_distance(const Vec2& p) const
{
  double d = std::min({p.x - x0, x1 - p.x, p.y - y0, y1 - p.y});
  if (removed)
  {
    const auto& r = *removed;
    const double dx = std::max({r[0] - p.x, 0.0, p.x - r[1]});
    const double dy = std::max({r[2] - p.y, 0.0, p.y - r[3]});
    d = std::min(d, std::hypot(dx, dy));
  }
  return std::max(d, 0.0);
}
//-----------------------------------------------------------------------------
DiagonalPattern parse_pattern(const std::string& name)
{
  if (name == "alternating")
    return DiagonalPattern::Alternating;
  if (name == "criss_cross")
    return DiagonalPattern::CrissCross;
  if (name == "uniform")
    return DiagonalPattern::Uniform;
  throw std::invalid_argument("unknown diagonal pattern '" + name + "'");
}
//-----------------------------------------------------------------------------
std::string to_string(DiagonalPattern p)
{
  switch (p)
  {
  case DiagonalPattern::Alternating:
    return "alternating";
  case DiagonalPattern::CrissCross:
    return "criss_cross";
  case DiagonalPattern::Uniform:
    return "uniform";
  }
  return "alternating";
}
//-----------------------------------------------------------------------------
Mesh build_structured(const Domain& domain, int n, const BoundaryRule& rule,
                      DiagonalPattern pattern)
{
  if (n < 1)
    throw std::invalid_argument("build_structured: n must be positive");
  if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0) || !(domain.area() > 0.0))
    throw std::invalid_argument("build_structured: degenerate domain");

  const double hx = (domain.x1 - domain.x0) / n, hy = (domain.y1 - domain.y0) / n;
  auto grid = [&](int i, int j) {
    return Vec2{domain.x0 + i * hx, domain.y0 + j * hy};
  };

  std::vector<int> id((n + 1) * (n + 1), -1);
  std::vector<Vec2> verts;
  std::vector<std::array<int, 3>> tris;
  auto node = [&](int i, int j) {
    int& k = id[j * (n + 1) + i];
    if (k < 0)
    {
      k = static_cast<int>(verts.size());
      verts.push_back(grid(i, j));
    }
    return k;
  };

  for (int j = 0; j < n; ++j)
  {
    for (int i = 0; i < n; ++i)
    {
      const Vec2 c = grid(i, j) + Vec2{0.5 * hx, 0.5 * hy};
      if (!domain.contains(c, 0.0))
        continue;
      const int a = node(i, j), b = node(i + 1, j), cc = node(i + 1, j + 1),
                d = node(i, j + 1);
      switch (pattern)
      {
      case DiagonalPattern::Uniform:
        tris.push_back({a, b, cc});
        tris.push_back({a, cc, d});
        break;
      case DiagonalPattern::Alternating:
        if ((i + j) % 2 == 0)
        {
          tris.push_back({a, b, cc});
          tris.push_back({a, cc, d});
        }
        else
        {
          tris.push_back({a, b, d});
          tris.push_back({b, cc, d});
        }
        break;
      case DiagonalPattern::CrissCross:
      {
        const int m = static_cast<int>(verts.size());
        verts.push_back(c);
        tris.push_back({a, b, m});
        tris.push_back({b, cc, m});
        tris.push_back({cc, d, m});
        tris.push_back({d, a, m});
        break;
      }
      }
    }
  }
  if (tris.empty())
    throw std::invalid_argument("build_structured: domain contains no cells");
  return Mesh(std::move(verts), std::move(tris), rule);
}
//-----------------------------------------------------------------------------
Patches patches(const Mesh& mesh)
{
  Patches p;
  p.element.resize(mesh.num_elements());
  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    auto& w = p.element[t];
    for (int v : mesh.element(t).vertices)
    {
      auto ve = mesh.vertex_elements(v);
      w.insert(w.end(), ve.begin(), ve.end());
    }
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
  }
  p.side.resize(mesh.num_sides());
  for (int s = 0; s < mesh.num_sides(); ++s)
  {
    const auto& e = mesh.side(s).elements;
    p.side[s].push_back(e[0]);
    if (e[1] >= 0)
      p.side[s].push_back(e[1]);
    std::sort(p.side[s].begin(), p.side[s].end());
  }
  return p;
}

} // namespace obstacle
