#include "obstacle/io.hpp"

#include "json.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace obstacle
{

//-----------------------------------------------------------------------------
void write_vtk(const Mesh& mesh, const VtkFields& fields, std::ostream& os,
               const std::string& title)
{
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_elements();
  for (const auto& [name, v] : fields.cell_scalars)
    if (static_cast<int>(v.size()) != ne)
      throw std::invalid_argument("write_vtk: cell field '" + name + "' has wrong size");
  for (const auto& [name, v] : fields.cell_vectors)
    if (static_cast<int>(v.size()) != ne)
      throw std::invalid_argument("write_vtk: cell field '" + name + "' has wrong size");
  for (const auto& [name, v] : fields.point_scalars)
    if (static_cast<int>(v.size()) != nv)
      throw std::invalid_argument("write_vtk: point field '" + name + "' has wrong size");

  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << std::setprecision(16);
  os << "POINTS " << nv << " double\n";
  for (int i = 0; i < nv; ++i)
    os << mesh.vertex(i).x << ' ' << mesh.vertex(i).y << " 0\n";
  os << "CELLS " << ne << ' ' << 4 * ne << '\n';
  for (int t = 0; t < ne; ++t)
  {
    const auto& v = mesh.element(t).vertices;
    os << "3 " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  }
  os << "CELL_TYPES " << ne << '\n';
  for (int t = 0; t < ne; ++t)
    os << "5\n";

  if (!fields.cell_scalars.empty() || !fields.cell_vectors.empty())
  {
    os << "CELL_DATA " << ne << '\n';
    for (const auto& [name, v] : fields.cell_scalars)
    {
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double x : v)
        os << x << '\n';
    }
    for (const auto& [name, v] : fields.cell_vectors)
    {
      os << "VECTORS " << name << " double\n";
      for (const Vec2& x : v)
        os << x.x << ' ' << x.y << " 0\n";
    }
  }
  if (!fields.point_scalars.empty())
  {
    os << "POINT_DATA " << nv << '\n';
    for (const auto& [name, v] : fields.point_scalars)
    {
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double x : v)
        os << x << '\n';
    }
  }
}
//-----------------------------------------------------------------------------
VtkFields level_fields(const LevelState& s)
{
  const Mesh& mesh = *s.mesh;
  const int ne = mesh.num_elements();
  VtkFields f;
  std::vector<double> u(ne), lambda(ne), contact(ne), chi(ne);
  std::vector<Vec2> z(ne), grad(ne);
  for (int t = 0; t < ne; ++t)
  {
    u[t] = s.solution->u.mean(t);
    lambda[t] = s.solution->lambda.values[t];
    contact[t] = lambda[t] < 0.0 ? 1.0 : 0.0;
    chi[t] = s.problem->obstacle.chi_h.values[t];
    z[t] = s.dual->rt.value(t, mesh.element(t).barycenter);
    grad[t] = s.solution->u.gradient(t);
  }
  f.cell_scalars = {{"u_mean", u},
                    {"lambda", lambda},
                    {"contact", contact},
                    {"chi_mean", chi},
                    {"eta_A", s.estimator->eta_A},
                    {"eta_B", s.estimator->eta_B},
                    {"eta_C", s.estimator->eta_C},
                    {"eta", s.estimator->indicators()}};
  f.cell_vectors = {{"z", z}, {"grad_u", grad}};
  f.point_scalars = {{"I_av_u", s.post->averaged.values}};
  return f;
}
//-----------------------------------------------------------------------------
std::string mesh_statistics_json(const Mesh& mesh)
{
  nlohmann::json j;
  j["vertices"] = mesh.num_vertices();
  j["elements"] = mesh.num_elements();
  j["sides"] = mesh.num_sides();
  j["boundary_sides"] = mesh.num_boundary_sides();
  j["dirichlet_sides"] = mesh.num_sides_with(BoundaryLabel::Dirichlet);
  j["neumann_sides"] = mesh.num_sides_with(BoundaryLabel::Neumann);
  j["free_dofs"] = mesh.num_sides() - mesh.num_sides_with(BoundaryLabel::Dirichlet);
  j["area"] = mesh.total_area();
  j["h_max"] = mesh.h_max();
  j["h_min"] = mesh.h_min();
  j["min_angle_deg"] = mesh.min_angle() * 180.0 / std::numbers::pi;
  j["chunkiness"] = mesh.chunkiness();
  j["conforming"] = mesh.is_conforming();
  return j.dump(2) + "\n";
}
//-----------------------------------------------------------------------------
int CsvTable::column(const std::string& name) const
{
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name)
      return static_cast<int>(i);
  return -1;
}
//-----------------------------------------------------------------------------
std::vector<double> CsvTable::values(const std::string& name) const
{
  const int c = column(name);
  if (c < 0)
    throw std::invalid_argument("CsvTable: no column '" + name + "'");
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows)
    v.push_back(r[c]);
  return v;
}
//-----------------------------------------------------------------------------
CsvTable read_csv(std::istream& is)
{
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      out.push_back(cell);
    if (!line.empty() && line.back() == ',')
      out.emplace_back();
    return out;
  };
  CsvTable t;
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("read_csv: empty input");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  t.header = split(line);
  int lineno = 1;
  while (std::getline(is, line))
  {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size())
      throw std::runtime_error("read_csv: line " + std::to_string(lineno)
                               + " has the wrong number of cells");
    std::vector<double> row;
    for (const auto& c : cells)
    {
      if (c == "nan" || c.empty())
      {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      std::size_t used = 0;
      double v = 0.0;
      try
      {
        v = std::stod(c, &used);
      }
      catch (const std::exception&)
      {
        used = 0;
      }
      if (used != c.size())
        throw std::runtime_error("read_csv: line " + std::to_string(lineno)
                                 + ": not a number '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}
//-----------------------------------------------------------------------------
std::string render_eoc_table(const std::vector<double>& h, const std::vector<EocColumn>& columns,
                             TableFormat format, int precision, int first_index)
{
  const std::size_t n = h.size();
  for (const auto& c : columns)
    if (c.values.size() != n)
      throw std::invalid_argument("render_eoc_table: column '" + c.name + "' has wrong length");

  auto fmt = [precision](double v) {
    if (std::isnan(v))
      return std::string("nan");
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    return os.str();
  };
  auto rate = [&](const std::vector<double>& e, std::size_t k) {
    if (k == 0)
      return std::string("---");
    const double r = std::log(e[k] / e[k - 1]) / std::log(h[k] / h[k - 1]);
    if (!std::isfinite(r))
      return std::string("nan");
    return fmt(r);
  };

  std::vector<std::string> head{"k"};
  for (const auto& c : columns)
  {
    head.push_back(c.name);
    head.push_back("EOC");
  }
  std::vector<std::vector<std::string>> body;
  for (std::size_t k = 0; k < n; ++k)
  {
    std::vector<std::string> row{std::to_string(static_cast<int>(k) + first_index)};
    for (const auto& c : columns)
    {
      const double v = c.values[k];
      if (v != 0.0 && std::abs(v) < 0.01)
      {
        std::ostringstream os;
        os << std::scientific << std::setprecision(precision - 1) << v;
        row.push_back(os.str());
      }
      else
        row.push_back(fmt(v));
      row.push_back(rate(c.values, k));
    }
    body.push_back(std::move(row));
  }

  std::ostringstream os;
  if (format == TableFormat::Csv)
  {
    auto line = [&os](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i)
        os << (i ? "," : "") << cells[i];
      os << '\n';
    };
    line(head);
    for (const auto& r : body)
      line(r);
    return os.str();
  }

  std::vector<std::size_t> width(head.size());
  for (std::size_t i = 0; i < head.size(); ++i)
  {
    width[i] = head[i].size();
    for (const auto& r : body)
      width[i] = std::max(width[i], r[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      os << (i ? " | " : "") << std::setw(static_cast<int>(width[i])) << cells[i];
    os << '\n';
  };
  line(head);
  std::size_t total = 0;
  for (std::size_t w : width)
    total += w;
  os << std::string(total + 3 * (width.size() - 1), '-') << '\n';
  for (const auto& r : body)
    line(r);
  return os.str();
}
//-----------------------------------------------------------------------------
void write_plot_data(const AfemHistory& history, std::ostream& os)
{
  os << "# dofs eta2 rho2 I_v D_z eta_A eta_B eta_C\n" << std::setprecision(12);
  for (const auto& r : history.levels)
    os << r.dofs << ' ' << r.eta2 << ' ' << r.rho2 << ' ' << r.I_v << ' ' << r.D_z << ' '
       << r.eta_A << ' ' << r.eta_B << ' ' << r.eta_C << '\n';
}

} // namespace obstacle
