#pragma once

#include "obstacle/assembly.hpp"

#include <iosfwd>
#include <vector>

namespace obstacle
{

/// Real number or one of the two infinities, kept as tags.
class ExtendedReal
{
public:
  enum class Kind
  {
    Finite,
    PlusInfinity,
    MinusInfinity
  };

  ExtendedReal() = default;
  ExtendedReal(double v) : value_(v) {} // NOLINT(google-explicit-constructor)
  static ExtendedReal plus_infinity() { return ExtendedReal(Kind::PlusInfinity); }
  static ExtendedReal minus_infinity() { return ExtendedReal(Kind::MinusInfinity); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_plus_infinity() const { return kind_ == Kind::PlusInfinity; }
  bool is_minus_infinity() const { return kind_ == Kind::MinusInfinity; }
  /// Throws std::domain_error on infinities.
  double value() const;

  friend ExtendedReal operator-(const ExtendedReal& a, const ExtendedReal& b);
  friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b);
  friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x);

private:
  explicit ExtendedReal(Kind k) : kind_(k) {}
  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
};

struct DualField
{
  Rt0Function rt;
  P0Function div;
  std::vector<Vec2> pi0;
  /// Largest normal-flux jump seen while building rt.
  double max_jump = 0.0;
};

/// z = grad_h u + (lambda - f_h)/2 (x - x_T), converted to RT0.
/// Throws std::runtime_error when normal fluxes disagree across a side.
DualField marini_flux(const CrFunction& u, const P0Function& lambda, const P0Function& f_h);

/// 1/2 ||grad_h v||^2 - (f_h, Pi_h v), or +inf when Pi_h v < chi_h somewhere.
ExtendedReal energy_primal_discrete(const CrFunction& v, const P0Function& f_h,
                                    const P0Function& chi_h, double tol = 1e-10);

/// -1/2 ||Pi_h y||^2 - (div y + f_h, chi_h) + sum_{S on Gamma_D} y_S |S| g_S,
/// or -inf when div y + f_h > 0 somewhere. `dirichlet` carries g_S; zero data
/// when null.
ExtendedReal energy_dual_discrete(const Rt0Function& y, const P0Function& f_h,
                                  const P0Function& chi_h,
                                  const CrFunction* dirichlet = nullptr);

/// 1/2 ||grad v||^2 - (f, v).
double energy_primal_continuous(const ConformingField& v, const ProblemData& data,
                                const TriangleRule& rule = high_order_rule());

/// Same for an analytic function.
double energy_primal_continuous(const Mesh& mesh, const ScalarField& u, const VectorField& grad_u,
                                const ProblemData& data,
                                const TriangleRule& rule = high_order_rule());

/// -1/2 ||y||^2 - (div y + f, chi) + int_{Gamma_D} y.n g, or -inf when
/// div y + f_h > 0 somewhere.
ExtendedReal energy_dual_continuous(const DualField& y, const ProblemData& data,
                                    const P0Function& f_h,
                                    const TriangleRule& rule = high_order_rule(),
                                    const LineRule& line = gauss_line(6));

} // namespace obstacle
