#pragma once

#include "obstacle/adaptivity.hpp"
#include "obstacle/mesh.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace obstacle
{

struct VtkFields
{
  std::vector<std::pair<std::string, std::vector<double>>> cell_scalars;
  std::vector<std::pair<std::string, std::vector<Vec2>>> cell_vectors;
  std::vector<std::pair<std::string, std::vector<double>>> point_scalars;
};

/// Legacy ASCII unstructured grid. Sizes of the fields are checked.
void write_vtk(const Mesh& mesh, const VtkFields& fields, std::ostream& os,
               const std::string& title = "obstacle");

/// Fields of one solved level: u and lambda per element, flux at the
/// barycenter, contact mask, estimator contributions and I_av u at vertices.
VtkFields level_fields(const LevelState& state);

/// Element count, dofs, h, angles, chunkiness and boundary counts as JSON.
std::string mesh_statistics_json(const Mesh& mesh);

/// Header plus numeric rows; "nan" cells are NaN.
struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const; // -1 when absent
  std::vector<double> values(const std::string& name) const;
};
CsvTable read_csv(std::istream& is);

struct EocColumn
{
  std::string name;
  std::vector<double> values;
};

enum class TableFormat
{
  Text,
  Csv
};

/// Error table with an EOC column after every quantity, computed against h.
/// Values below 0.01 are printed in scientific notation. The first row shows
/// "---" in place of the rate; rows are numbered from `first_index`.
std::string render_eoc_table(const std::vector<double>& h, const std::vector<EocColumn>& columns,
                             TableFormat format, int precision = 3, int first_index = 0);

/// Columns dofs, eta2, rho2, I_v, D_z, eta_A, eta_B, eta_C, one level per line.
void write_plot_data(const AfemHistory& history, std::ostream& os);

} // namespace obstacle
