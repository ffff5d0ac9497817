#include "obstacle/config.hpp"
#include "obstacle/expression.hpp"
#include "obstacle/io.hpp"
#include "obstacle/sparse.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace obstacle;

namespace
{

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Overrides
{
  std::string config_path;
  std::optional<std::string> benchmark, output_dir;
  std::optional<int> levels, max_elements, max_pdas_iterations, triangle_order, line_order;
  std::optional<double> theta, alpha, eps_stop;
  bool vtk = false;
};

void add_config_options(CLI::App* app, Overrides& o)
{
  app->add_option("-c,--config", o.config_path, "JSON experiment configuration");
  app->add_option("-b,--benchmark", o.benchmark, "ring, corner, pyramid or custom");
  app->add_option("-l,--levels", o.levels, "Number of levels");
  app->add_option("--theta", o.theta, "Doerfler parameter");
  app->add_option("--alpha", o.alpha, "Active-set parameter");
  app->add_option("--eps-stop", o.eps_stop, "Stop when eta^2 falls below this value");
  app->add_option("--max-elements", o.max_elements, "Element limit");
  app->add_option("--max-pdas-iterations", o.max_pdas_iterations, "Active-set iteration limit");
  app->add_option("--triangle-order", o.triangle_order, "Conical product points per direction");
  app->add_option("--line-order", o.line_order, "Gauss points per side");
  app->add_option("-o,--output-dir", o.output_dir, "Output directory");
  app->add_flag("--vtk", o.vtk, "Write a VTK file per level");
}

// Applies command line overrides and validates the result through the parser.
ExperimentConfig resolve(const Overrides& o)
{
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.benchmark)
    c.benchmark = *o.benchmark;
  if (o.output_dir)
    c.output_dir = *o.output_dir;
  if (o.levels)
    c.levels = *o.levels;
  if (o.max_elements)
    c.max_elements = *o.max_elements;
  if (o.max_pdas_iterations)
    c.max_pdas_iterations = *o.max_pdas_iterations;
  if (o.triangle_order)
    c.triangle_order = *o.triangle_order;
  if (o.line_order)
    c.line_order = *o.line_order;
  if (o.theta)
    c.theta = *o.theta;
  if (o.alpha)
    c.alpha = *o.alpha;
  if (o.eps_stop)
    c.eps_stop = *o.eps_stop;
  if (o.vtk)
    c.write_vtk = true;
  return parse_config(serialize_config(c));
}

std::ofstream open_output(const fs::path& path)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void write_tables(const AfemHistory& h, const fs::path& dir)
{
  if (h.levels.empty() || !h.levels.front().has_exact)
    return;
  std::vector<double> hs;
  std::vector<EocColumn> t1{{"e_u", {}}, {"e_Icru", {}}, {"e_z", {}}, {"e_Irtz", {}}};
  std::vector<EocColumn> t2{
      {"e_lambda_u", {}}, {"e_lambda_Icru", {}}, {"tot_u", {}}, {"tot_Icru", {}}};
  for (const auto& r : h.levels)
  {
    hs.push_back(r.h);
    const auto& e = r.errors;
    t1[0].values.push_back(e.e_u);
    t1[1].values.push_back(e.e_Icru);
    t1[2].values.push_back(e.e_z);
    t1[3].values.push_back(e.e_Irtz);
    t2[0].values.push_back(e.e_lambda_u);
    t2[1].values.push_back(e.e_lambda_Icru);
    t2[2].values.push_back(e.tot_u);
    t2[3].values.push_back(e.tot_Icru);
  }
  open_output(dir / "errors_table.txt") << render_eoc_table(hs, t1, TableFormat::Text);
  open_output(dir / "multiplier_table.txt") << render_eoc_table(hs, t2, TableFormat::Text);
  std::cout << render_eoc_table(hs, t1, TableFormat::Text) << '\n'
            << render_eoc_table(hs, t2, TableFormat::Text);
}

void print_history(const AfemHistory& h)
{
  for (const auto& r : h.levels)
    std::cout << "level " << r.level << ": elements " << r.elements << ", dofs " << r.dofs
              << ", pdas " << r.pdas_iterations << ", eta2 " << r.eta2 << ", I(v) " << r.I_v
              << ", gap " << r.discrete_gap << '\n';
  std::cout << "stop: " << h.stop_reason << '\n';
  if (h.aitken_energy)
    std::cout << "Aitken estimate of I(u): " << *h.aitken_energy << '\n';
}

int run_study(ExperimentConfig c, bool adaptive)
{
  c.mode = adaptive ? "adaptive" : "uniform";
  const Benchmark b = make_problem(c);
  AfemConfig a = make_afem_config(c);
  a.adaptive = adaptive;
  const fs::path dir = c.output_dir;
  fs::create_directories(dir);
  open_output(dir / "config.json") << serialize_config(c);

  LevelCallback cb;
  if (c.write_vtk)
    cb = [&](const LevelState& s) {
      std::ostringstream name;
      name << "level_" << std::setw(3) << std::setfill('0') << s.record->level << ".vtk";
      auto out = open_output(dir / name.str());
      write_vtk(*s.mesh, level_fields(s), out, b.id);
    };
  const AfemHistory h = afem_run(b.data, a, b.initial_mesh(), cb);
  {
    auto csv = open_output(dir / "history.csv");
    write_history_csv(h, csv);
    auto plot = open_output(dir / "plot.dat");
    write_plot_data(h, plot);
  }
  print_history(h);
  if (!adaptive)
    write_tables(h, dir);
  return 0;
}

int run_solve(const ExperimentConfig& c, int refinements, bool vtk_only)
{
  const Benchmark b = make_problem(c);
  Mesh mesh = refine_uniform(b.initial_mesh(), refinements);
  const AfemConfig a = make_afem_config(c);
  const fs::path dir = c.output_dir;
  fs::create_directories(dir);

  AfemHistory h;
  auto cb = [&](const LevelState& s) {
    if (vtk_only || c.write_vtk)
    {
      auto out = open_output(dir / "solution.vtk");
      write_vtk(*s.mesh, level_fields(s), out, b.id);
    }
    if (!vtk_only)
    {
      auto log = open_output(dir / "pdas.csv");
      write_iteration_log(*s.solution, log);
    }
  };
  h.levels.push_back(solve_level(mesh, b.data, a, refinements, cb));
  h.stop_reason = "single level";
  if (!vtk_only)
  {
    open_output(dir / "mesh.json") << mesh_statistics_json(mesh);
    auto csv = open_output(dir / "history.csv");
    write_history_csv(h, csv);
  }
  print_history(h);
  return 0;
}

int run_table(const std::string& path, const std::string& format, const std::string& which,
              int first_index)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open '" + path + "'");
  const CsvTable t = read_csv(in);
  if (t.rows.empty())
    throw ConfigError("'" + path + "' has no rows");
  std::vector<std::string> names;
  if (which == "errors")
    names = {"e_u", "e_Icru", "e_z", "e_Irtz"};
  else if (which == "multiplier")
    names = {"e_lambda_u", "e_lambda_Icru", "tot_u", "tot_Icru"};
  else if (which == "estimator")
    names = {"eta2", "rho2"};
  else
  {
    std::stringstream ss(which);
    std::string n;
    while (std::getline(ss, n, ','))
      names.push_back(n);
  }
  std::vector<EocColumn> cols;
  for (const auto& n : names)
  {
    if (t.column(n) < 0)
      throw ConfigError("column '" + n + "' not found in '" + path + "'");
    cols.push_back({n, t.values(n)});
  }
  if (t.column("h") < 0)
    throw ConfigError("'" + path + "' has no 'h' column");
  std::cout << render_eoc_table(t.values("h"), cols,
                                format == "csv" ? TableFormat::Csv : TableFormat::Text, 3,
                                first_index);
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Crouzeix-Raviart obstacle problem solver with primal-dual error estimation"};
  app.require_subcommand(1);

  Overrides solve_o, converge_o, afem_o, vtk_o;
  int solve_refine = 0, vtk_refine = 0;
  auto* solve = app.add_subcommand("solve", "Solve on one mesh and write the solution");
  add_config_options(solve, solve_o);
  solve->add_option("-r,--refine", solve_refine, "Uniform refinements of the initial mesh")
      ->check(CLI::NonNegativeNumber);

  auto* converge = app.add_subcommand("converge", "Uniform refinement study with EOC tables");
  add_config_options(converge, converge_o);

  auto* afem = app.add_subcommand("afem", "Adaptive refinement loop");
  add_config_options(afem, afem_o);

  auto* vtk = app.add_subcommand("export-vtk", "Solve on one mesh and write only a VTK file");
  add_config_options(vtk, vtk_o);
  vtk->add_option("-r,--refine", vtk_refine, "Uniform refinements of the initial mesh")
      ->check(CLI::NonNegativeNumber);

  std::string table_path, table_format = "text", table_columns = "errors";
  int first_index = 0;
  auto* table = app.add_subcommand("table", "Render an EOC table from a history CSV");
  table->add_option("history", table_path, "history.csv written by converge or afem")
      ->required();
  table->add_option("-f,--format", table_format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}));
  table->add_option("--columns", table_columns,
                    "errors, multiplier, estimator or a comma-separated list of columns");
  table->add_option("--first-index", first_index, "Label of the first row");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try
  {
    if (*solve)
      return run_solve(resolve(solve_o), solve_refine, false);
    if (*converge)
      return run_study(resolve(converge_o), false);
    if (*afem)
      return run_study(resolve(afem_o), true);
    if (*vtk)
      return run_solve(resolve(vtk_o), vtk_refine, true);
    if (*table)
      return run_table(table_path, table_format, table_columns, first_index);
  }
  catch (const ConfigError& e)
  {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  }
  catch (const std::exception& e)
  {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  }
  return 0;
}
