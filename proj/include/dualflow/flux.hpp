#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dualflow {

enum class FluxKind { QuadraticAttractive, QuadraticRepulsive, Polynomial, PiecewiseLinearA };

std::string_view to_string(FluxKind kind);
/// Throws InputError for unknown names.
FluxKind parse_flux_kind(std::string_view name);

/// Breakpoint (u, a(u)) of a piecewise-linear velocity.
struct Knot {
  double u = 0.0;
  double a = 0.0;
};

/// Interaction velocity a and its antiderivative A with A(0) = 0.
///
/// Polynomial models store a(u) = sum c_k u^k. Piecewise-linear models interpolate between knots
/// and extend the first and last segments linearly, so every model is defined on the whole line.
/// The real roots of a (critical points of A) and the extremum candidates of a are located once at
/// construction; interval extremum queries then reduce to comparing a handful of values.
class FluxModel {
 public:
  static FluxModel quadratic_attractive();
  static FluxModel quadratic_repulsive();
  static FluxModel polynomial(std::vector<double> a_coeffs);
  static FluxModel piecewise_linear(std::vector<Knot> knots);

  FluxKind kind() const { return kind_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::vector<Knot>& knots() const { return knots_; }

  double a(double u) const;
  double A(double u) const;

  double min_A(double lo, double hi) const;
  double max_A(double lo, double hi) const;
  double min_a(double lo, double hi) const;
  double max_a(double lo, double hi) const;
  double max_abs_a(double lo, double hi) const;

  /// Monotonicity of a on [lo, hi]. Attractive models are the non-increasing ones (A concave).
  bool is_nonincreasing(double lo, double hi) const;
  bool is_strictly_decreasing(double lo, double hi) const;
  bool is_nondecreasing(double lo, double hi) const;
  bool is_strictly_increasing(double lo, double hi) const;
  bool is_constant(double lo, double hi) const;

  /// Real zeros of a, sorted. For polynomials only those within the Cauchy root bound exist.
  const std::vector<double>& a_roots() const { return a_roots_; }

 private:
  FluxModel() = default;
  void prepare();
  // lo, hi, and every stored point strictly between them, sorted.
  std::vector<double> sample_points(const std::vector<double>& interior, double lo, double hi) const;
  std::vector<double> a_profile(double lo, double hi) const;

  FluxKind kind_ = FluxKind::Polynomial;
  std::vector<double> coeffs_;
  std::vector<Knot> knots_;
  std::vector<double> knot_integrals_;  // integral of a from knots_[0].u to knots_[k].u
  double integral_at_zero_ = 0.0;
  std::vector<double> a_roots_;
  std::vector<double> a_critical_;  // where a may attain an interior extremum
};

double eval_a(const FluxModel& model, double u);
double eval_A(const FluxModel& model, double u);

/// Exact Godunov flux of du/dt + dA(u)/dx = 0: min of A over [ul, ur] when ul <= ur, max of A over
/// [ur, ul] otherwise.
double godunov_flux(const FluxModel& model, double u_left, double u_right);

}  // namespace dualflow
