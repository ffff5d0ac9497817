#pragma once

#include "obstacle/assembly.hpp"
#include "obstacle/duality.hpp"

#include <vector>

namespace obstacle
{

/// v = max{I_av u, chi} together with the node-averaged function.
struct PostProcessed
{
  NodalP1 averaged;
  ConformingField v;
};

/// Elements are split along the zero line of I_av u minus the vertex
/// interpolant of chi; integration is exact for element-wise affine chi.
PostProcessed postprocess_conforming(const CrFunction& u, const ProblemData& data);

/// ||grad v - grad_h u||_T^2.
std::vector<double> eta_A(const ConformingField& v, const CrFunction& u,
                          const TriangleRule& rule = high_order_rule());
/// (-lambda_T) int_T (v - chi). Throws std::runtime_error below -1e-12.
std::vector<double> eta_B(const ConformingField& v, const P0Function& lambda,
                          const ProblemData& data,
                          const TriangleRule& rule = high_order_rule());
/// h_T^2 (f_h - lambda)^2 |T| / 4.
std::vector<double> eta_C(const P0Function& lambda, const P0Function& f_h);

struct EstimatorBreakdown
{
  std::vector<double> eta_A, eta_B, eta_C, osc;
  double total_A = 0.0, total_B = 0.0, total_C = 0.0, total_osc = 0.0;
  double eta2 = 0.0;

  /// eta_A + eta_B + eta_C per element.
  std::vector<double> indicators() const;
};

EstimatorBreakdown estimate(const ConformingField& v, const CrFunction& u,
                            const P0Function& lambda, const P0Function& f_h,
                            const ProblemData& data,
                            const TriangleRule& rule = high_order_rule());

/// Reduced error measure. `full` adds ||grad u - grad_h u_h||^2 and
/// (-lambda, Pi_h (u - chi)); both need the exact solution.
double rho_reduced(const ConformingField& v, const CrFunction& u, const P0Function& lambda,
                   const ProblemData& data, double exact_energy, bool full = true,
                   const TriangleRule& rule = high_order_rule());

struct ExactErrors
{
  double e_u = 0.0;
  double e_Icru = 0.0;
  double e_z = 0.0;
  double e_Irtz = 0.0;
  double e_lambda_u = 0.0;
  double e_lambda_Icru = 0.0;
  double tot_u = 0.0;    // e_lambda_u + e_u
  double tot_Icru = 0.0; // e_lambda_Icru + e_Icru
};

ExactErrors exact_errors(const CrFunction& u, const DualField& z, const P0Function& lambda,
                         const ExactSolution& exact,
                         const TriangleRule& rule = high_order_rule(),
                         const LineRule& line = gauss_line(4));

/// log(e_k / e_{k-1}) / log(h_k / h_{k-1}).
std::vector<double> eoc(const std::vector<double>& e, const std::vector<double>& h);

/// Aitken delta-squared extrapolation from the last three entries.
double aitken(const std::vector<double>& seq);
/// All extrapolants eps_k, k >= 2.
std::vector<double> aitken_sequence(const std::vector<double>& seq);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace obstacle
