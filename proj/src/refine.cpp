#include "obstacle/mesh.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace obstacle
{

namespace
{

// Core of both refinement routines. `edge_marked` must already be closed,
// i.e. every element with a marked edge has its reference edge marked.
Mesh split(const Mesh& mesh, const std::vector<char>& edge_marked,
           const std::vector<int>& ref)
{
  std::vector<Vec2> verts = mesh.vertices();
  std::vector<int> midpoint(mesh.num_sides(), -1);
  for (int s = 0; s < mesh.num_sides(); ++s)
  {
    if (!edge_marked[s])
      continue;
    midpoint[s] = static_cast<int>(verts.size());
    verts.push_back(mesh.side(s).midpoint);
  }

  EdgeLabelMap labels;
  for (int s = 0; s < mesh.num_sides(); ++s)
  {
    const Side& sd = mesh.side(s);
    if (!sd.is_boundary())
      continue;
    if (edge_marked[s])
    {
      labels[edge_key(sd.vertices[0], midpoint[s])] = sd.label;
      labels[edge_key(midpoint[s], sd.vertices[1])] = sd.label;
    }
    else
      labels[edge_key(sd.vertices[0], sd.vertices[1])] = sd.label;
  }

  std::vector<std::array<int, 3>> tris;
  std::vector<int> parents;
  std::vector<RefineKind> kinds;
  tris.reserve(mesh.num_elements() * 2);
  auto emit = [&](int parent, RefineKind kind, std::array<int, 3> t) {
    tris.push_back(t);
    parents.push_back(parent);
    kinds.push_back(kind);
  };

  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    const Element& e = mesh.element(t);
    int count = 0;
    for (int s : e.sides)
      count += edge_marked[s] ? 1 : 0;

    if (count == 0)
    {
      emit(t, RefineKind::Unrefined, e.vertices);
      continue;
    }
    if (count == 3)
    {
      const auto& v = e.vertices;
      // sides[i] is opposite vertex i.
      const int m01 = midpoint[e.sides[2]], m12 = midpoint[e.sides[0]],
                m20 = midpoint[e.sides[1]];
      emit(t, RefineKind::Red, {v[0], m01, m20});
      emit(t, RefineKind::Red, {m01, v[1], m12});
      emit(t, RefineKind::Red, {m20, m12, v[2]});
      emit(t, RefineKind::Red, {m01, m12, m20});
      continue;
    }

    // Rotate so that the reference edge is (a, b) and c is opposite.
    const int r = mesh.local_side(t, ref[t]);
    if (!edge_marked[ref[t]])
      throw std::logic_error("refine: closure violated");
    const int c = e.vertices[r], a = e.vertices[(r + 1) % 3],
              b = e.vertices[(r + 2) % 3];
    const int m = midpoint[ref[t]];
    const int s_bc = e.sides[(r + 1) % 3]; // opposite a
    const int s_ca = e.sides[(r + 2) % 3]; // opposite b
    if (count == 1)
    {
      emit(t, RefineKind::Green, {a, m, c});
      emit(t, RefineKind::Green, {m, b, c});
    }
    else if (edge_marked[s_ca])
    {
      const int q = midpoint[s_ca];
      emit(t, RefineKind::Blue, {a, m, q});
      emit(t, RefineKind::Blue, {q, m, c});
      emit(t, RefineKind::Blue, {m, b, c});
    }
    else
    {
      const int p = midpoint[s_bc];
      emit(t, RefineKind::Blue, {a, m, c});
      emit(t, RefineKind::Blue, {m, b, p});
      emit(t, RefineKind::Blue, {m, p, c});
    }
  }

  Mesh out(std::move(verts), std::move(tris), labels);
  out.set_history(std::move(parents), std::move(kinds));
  return out;
}

std::vector<char> mark_all_edges(const Mesh& mesh, const std::vector<int>& marked)
{
  std::vector<char> edge(mesh.num_sides(), 0);
  for (int t : marked)
  {
    if (t < 0 || t >= mesh.num_elements())
      throw std::out_of_range("refine: marked element out of range");
    for (int s : mesh.element(t).sides)
      edge[s] = 1;
  }
  return edge;
}

} // namespace

//-----------------------------------------------------------------------------
std::vector<int> reference_edges(const Mesh& mesh)
{
  std::vector<int> ref(mesh.num_elements());
  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    const auto& e = mesh.element(t);
    int best = e.sides[0];
    for (int i = 1; i < 3; ++i)
    {
      const int s = e.sides[i];
      const double ls = mesh.side(s).length, lb = mesh.side(best).length;
      const double tol = 1e-12 * std::max(ls, lb);
      if (ls > lb + tol || (std::abs(ls - lb) <= tol && s < best))
        best = s;
    }
    ref[t] = best;
  }
  return ref;
}
//-----------------------------------------------------------------------------
Mesh refine_red(const Mesh& mesh, const std::vector<int>& marked)
{
  const std::vector<char> edge = mark_all_edges(mesh, marked);
  std::vector<char> is_marked(mesh.num_elements(), 0);
  for (int t : marked)
    is_marked[t] = 1;
  for (int t = 0; t < mesh.num_elements(); ++t)
  {
    if (is_marked[t])
      continue;
    for (int s : mesh.element(t).sides)
      if (edge[s])
        throw std::invalid_argument(
            "refine_red: partial marking leaves hanging nodes; use refine_rgb");
  }
  return split(mesh, edge, reference_edges(mesh));
}
//-----------------------------------------------------------------------------
Mesh refine_uniform(const Mesh& mesh, int times)
{
  Mesh m = mesh;
  for (int k = 0; k < times; ++k)
  {
    std::vector<int> all(m.num_elements());
    for (int t = 0; t < m.num_elements(); ++t)
      all[t] = t;
    m = refine_red(m, all);
  }
  return m;
}
//-----------------------------------------------------------------------------
Mesh refine_rgb(const Mesh& mesh, const std::vector<int>& marked)
{
  std::vector<char> edge = mark_all_edges(mesh, marked);
  const std::vector<int> ref = reference_edges(mesh);

  std::deque<int> queue;
  for (int s = 0; s < mesh.num_sides(); ++s)
    if (edge[s])
      queue.push_back(s);
  while (!queue.empty())
  {
    const int s = queue.front();
    queue.pop_front();
    for (int t : mesh.side(s).elements)
    {
      if (t < 0 || edge[ref[t]])
        continue;
      edge[ref[t]] = 1;
      queue.push_back(ref[t]);
    }
  }
  return split(mesh, edge, ref);
}

} // namespace obstacle
