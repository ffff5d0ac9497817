#include "obstacle/config.hpp"

#include "obstacle/expression.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace obstacle
{

namespace
{

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
  if (!j.is_object())
    throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
  if (!j.contains(key))
    return;
  const json& v = j.at(key);
  try
  {
    if constexpr (std::is_same_v<T, int>)
    {
      if (!v.is_number_integer())
        throw ConfigError("");
    }
    else if constexpr (std::is_same_v<T, double>)
    {
      if (!v.is_number())
        throw ConfigError("");
    }
    else if constexpr (std::is_same_v<T, bool>)
    {
      if (!v.is_boolean())
        throw ConfigError("");
    }
    else if constexpr (std::is_same_v<T, std::string>)
    {
      if (!v.is_string())
        throw ConfigError("");
    }
    out = v.get<T>();
  }
  catch (const std::exception&)
  {
    throw ConfigError(where + ": key '" + key + "' has the wrong type");
  }
}

void check_expression(const std::string& text, const std::string& key, bool allow_dist)
{
  try
  {
    std::optional<Domain> dom;
    if (allow_dist)
      dom = Domain{};
    Expression::parse(text, dom);
  }
  catch (const ExpressionError& e)
  {
    throw ConfigError("problem." + key + ": " + e.what());
  }
}

CustomProblem parse_problem(const json& j)
{
  reject_unknown(j,
                 {"name", "domain", "bounds", "size", "cells", "pattern", "f", "chi", "g",
                  "neumann", "chi_affine", "exact"},
                 "problem");
  CustomProblem p;
  read(j, "name", p.name, "problem");
  read(j, "domain", p.domain, "problem");
  read(j, "size", p.size, "problem");
  read(j, "cells", p.cells, "problem");
  read(j, "pattern", p.pattern, "problem");
  read(j, "f", p.f, "problem");
  read(j, "chi", p.chi, "problem");
  read(j, "g", p.g, "problem");
  read(j, "neumann", p.neumann, "problem");
  read(j, "chi_affine", p.chi_affine, "problem");
  if (j.contains("bounds"))
  {
    const json& b = j.at("bounds");
    if (!b.is_array() || b.size() != 4)
      throw ConfigError("problem: 'bounds' must be an array of four numbers");
    for (int i = 0; i < 4; ++i)
    {
      if (!b[i].is_number())
        throw ConfigError("problem: 'bounds' must be an array of four numbers");
      p.bounds[i] = b[i].get<double>();
    }
  }
  if (j.contains("exact"))
  {
    const json& e = j.at("exact");
    reject_unknown(e, {"u", "ux", "uy"}, "problem.exact");
    std::array<std::string, 3> ex;
    const char* keys[] = {"u", "ux", "uy"};
    for (int i = 0; i < 3; ++i)
    {
      if (!e.contains(keys[i]))
        throw ConfigError(std::string("problem.exact: missing '") + keys[i] + "'");
      read(e, keys[i], ex[i], "problem.exact");
    }
    p.exact = ex;
  }

  if (p.domain != "rectangle" && p.domain != "l_shape")
    throw ConfigError("problem.domain must be 'rectangle' or 'l_shape'");
  if (p.domain == "rectangle" && !(p.bounds[1] > p.bounds[0] && p.bounds[3] > p.bounds[2]))
    throw ConfigError("problem.bounds must satisfy x0 < x1 and y0 < y1");
  if (p.domain == "l_shape" && !(p.size > 0.0))
    throw ConfigError("problem.size must be positive");
  if (p.cells < 1)
    throw ConfigError("problem.cells must be at least 1");
  try
  {
    parse_pattern(p.pattern);
  }
  catch (const std::exception& e)
  {
    throw ConfigError(std::string("problem.pattern: ") + e.what());
  }
  check_expression(p.f, "f", true);
  check_expression(p.chi, "chi", true);
  check_expression(p.g, "g", true);
  if (!p.neumann.empty())
    check_expression(p.neumann, "neumann", true);
  if (p.exact)
    for (const auto& s : *p.exact)
      check_expression(s, "exact", true);
  return p;
}

json problem_to_json(const CustomProblem& p)
{
  json j;
  j["name"] = p.name;
  j["domain"] = p.domain;
  j["bounds"] = p.bounds;
  j["size"] = p.size;
  j["cells"] = p.cells;
  j["pattern"] = p.pattern;
  j["f"] = p.f;
  j["chi"] = p.chi;
  j["g"] = p.g;
  j["neumann"] = p.neumann;
  j["chi_affine"] = p.chi_affine;
  if (p.exact)
    j["exact"] = {{"u", (*p.exact)[0]}, {"ux", (*p.exact)[1]}, {"uy", (*p.exact)[2]}};
  return j;
}

} // namespace

//-----------------------------------------------------------------------------
ExperimentConfig parse_config(const std::string& json_text)
{
  json j;
  try
  {
    j = json::parse(json_text);
  }
  catch (const json::parse_error& e)
  {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"benchmark", "problem", "mode", "levels", "theta", "alpha", "eps_stop",
                  "max_elements", "max_pdas_iterations", "quadrature", "output_dir",
                  "write_vtk"},
                 "config");
  ExperimentConfig c;
  read(j, "benchmark", c.benchmark, "config");
  read(j, "mode", c.mode, "config");
  read(j, "levels", c.levels, "config");
  read(j, "theta", c.theta, "config");
  read(j, "alpha", c.alpha, "config");
  read(j, "eps_stop", c.eps_stop, "config");
  read(j, "max_elements", c.max_elements, "config");
  read(j, "max_pdas_iterations", c.max_pdas_iterations, "config");
  read(j, "output_dir", c.output_dir, "config");
  read(j, "write_vtk", c.write_vtk, "config");
  if (j.contains("quadrature"))
  {
    const json& q = j.at("quadrature");
    reject_unknown(q, {"triangle", "line"}, "quadrature");
    read(q, "triangle", c.triangle_order, "quadrature");
    read(q, "line", c.line_order, "quadrature");
  }
  if (j.contains("problem"))
    c.problem = parse_problem(j.at("problem"));

  const std::set<std::string> ids{"ring", "corner", "pyramid", "custom"};
  if (!ids.count(c.benchmark))
    throw ConfigError("benchmark must be one of ring, corner, pyramid, custom");
  if (c.benchmark == "custom" && !c.problem)
    throw ConfigError("benchmark 'custom' needs a 'problem' section");
  if (c.benchmark != "custom" && c.problem)
    throw ConfigError("'problem' is only allowed with benchmark 'custom'");
  if (c.mode != "uniform" && c.mode != "adaptive")
    throw ConfigError("mode must be 'uniform' or 'adaptive'");
  if (c.levels < 1)
    throw ConfigError("levels must be at least 1");
  if (!(c.theta > 0.0 && c.theta < 1.0))
    throw ConfigError("theta must lie in (0, 1)");
  if (!(c.alpha > 0.0))
    throw ConfigError("alpha must be positive");
  if (!(c.eps_stop >= 0.0))
    throw ConfigError("eps_stop must be nonnegative");
  if (c.max_elements < 1 || c.max_pdas_iterations < 1)
    throw ConfigError("max_elements and max_pdas_iterations must be positive");
  if (c.triangle_order < 1 || c.triangle_order > 20 || c.line_order < 1 || c.line_order > 20)
    throw ConfigError("quadrature orders must lie in [1, 20]");
  if (c.output_dir.empty())
    throw ConfigError("output_dir must not be empty");
  return c;
}
//-----------------------------------------------------------------------------
ExperimentConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}
//-----------------------------------------------------------------------------
std::string serialize_config(const ExperimentConfig& c)
{
  json j;
  j["benchmark"] = c.benchmark;
  if (c.problem)
    j["problem"] = problem_to_json(*c.problem);
  j["mode"] = c.mode;
  j["levels"] = c.levels;
  j["theta"] = c.theta;
  j["alpha"] = c.alpha;
  j["eps_stop"] = c.eps_stop;
  j["max_elements"] = c.max_elements;
  j["max_pdas_iterations"] = c.max_pdas_iterations;
  j["quadrature"] = {{"triangle", c.triangle_order}, {"line", c.line_order}};
  j["output_dir"] = c.output_dir;
  j["write_vtk"] = c.write_vtk;
  return j.dump(2) + "\n";
}
//-----------------------------------------------------------------------------
Benchmark make_problem(const ExperimentConfig& config)
{
  if (config.benchmark != "custom")
    return make_benchmark(config.benchmark);
  if (!config.problem)
    throw ConfigError("benchmark 'custom' needs a 'problem' section");
  const CustomProblem& p = *config.problem;

  Benchmark b;
  b.id = p.name;
  b.domain = p.domain == "l_shape"
                 ? Domain::l_shape(p.size)
                 : Domain::rectangle(p.bounds[0], p.bounds[1], p.bounds[2], p.bounds[3]);
  b.cells = p.cells;
  b.pattern = parse_pattern(p.pattern);

  const Expression f = Expression::parse(p.f, b.domain);
  const Expression chi = Expression::parse(p.chi, b.domain);
  const Expression g = Expression::parse(p.g, b.domain);
  ProblemData& d = b.data;
  d.name = p.name;
  d.f = f.field();
  d.chi = chi.field();
  d.dirichlet = g.field();
  d.f_piecewise_constant = f.is_constant();
  d.chi_piecewise_affine = p.chi_affine || chi.is_constant();
  if (!p.neumann.empty())
  {
    const Expression n = Expression::parse(p.neumann, b.domain);
    d.boundary = [n](const Vec2& x) {
      return n(x) != 0.0 ? BoundaryLabel::Neumann : BoundaryLabel::Dirichlet;
    };
  }
  if (p.exact)
  {
    const Expression u = Expression::parse((*p.exact)[0], b.domain);
    const Expression ux = Expression::parse((*p.exact)[1], b.domain);
    const Expression uy = Expression::parse((*p.exact)[2], b.domain);
    ExactSolution ex;
    ex.u = u.field();
    ex.grad_u = [ux, uy](const Vec2& x) { return Vec2{ux(x), uy(x)}; };
    d.exact = ex;
  }
  return b;
}
//-----------------------------------------------------------------------------
AfemConfig make_afem_config(const ExperimentConfig& config)
{
  AfemConfig a;
  a.theta = config.theta;
  a.eps_stop = config.eps_stop;
  a.max_levels = config.levels;
  a.adaptive = config.mode == "adaptive";
  a.max_elements = config.max_elements;
  a.pdas.alpha = config.alpha;
  a.pdas.eps_stop = 0.0;
  a.pdas.max_iter = config.max_pdas_iterations;
  a.triangle_order = config.triangle_order;
  a.line_order = config.line_order;
  return a;
}

} // namespace obstacle
