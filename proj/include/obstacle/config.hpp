#pragma once

#include "obstacle/adaptivity.hpp"
#include "obstacle/benchmarks.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

namespace obstacle
{

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// User-defined problem. Functions are expressions in x, y, r, phi and dist().
struct CustomProblem
{
  std::string name = "custom";
  /// "rectangle" or "l_shape".
  std::string domain = "rectangle";
  /// x0, x1, y0, y1 of the rectangle.
  std::array<double, 4> bounds{0.0, 1.0, 0.0, 1.0};
  /// Half width of the L-shaped domain.
  double size = 1.0;
  int cells = 4;
  std::string pattern = "alternating";
  std::string f = "0";
  std::string chi = "0";
  std::string g = "0";
  /// Sides whose midpoint makes this nonzero are Neumann; empty means none.
  std::string neumann;
  bool chi_affine = false;
  /// Optional exact solution u with gradient (ux, uy).
  std::optional<std::array<std::string, 3>> exact;

  bool operator==(const CustomProblem&) const = default;
};

struct ExperimentConfig
{
  /// "ring", "corner", "pyramid" or "custom".
  std::string benchmark = "ring";
  std::optional<CustomProblem> problem;
  /// "uniform" or "adaptive"; set by the subcommand and recorded in config.json.
  std::string mode = "uniform";
  int levels = 5;
  double theta = 0.5;
  double alpha = 1.0;
  double eps_stop = 0.0;
  int max_elements = 100000;
  int max_pdas_iterations = 200;
  int triangle_order = 6;
  int line_order = 4;
  std::string output_dir = "results";
  bool write_vtk = false;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates a JSON document. Unknown keys, wrong types and
/// out-of-range values raise ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
/// Pretty-printed JSON with every field present.
std::string serialize_config(const ExperimentConfig& config);

/// Problem data, domain and initial mesh described by the configuration.
Benchmark make_problem(const ExperimentConfig& config);
AfemConfig make_afem_config(const ExperimentConfig& config);

} // namespace obstacle
