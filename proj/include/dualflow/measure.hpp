#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace dualflow {

struct Atom {
  double x = 0.0;
  double m = 0.0;
};

/// Finite nonnegative combination of Dirac masses with strictly increasing positions.
class AtomicMeasure {
 public:
  /// Sorts, coalesces atoms sharing a position, and rejects non-positive masses, non-finite data and
  /// empty input (total mass must be positive).
  static AtomicMeasure from_atoms(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double total_mass() const { return total_mass_; }

 private:
  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
};

/// Right-continuous step function: levels[0] left of breakpoints[0], levels[k] on
/// [breakpoints[k-1], breakpoints[k]).
struct StepFunction {
  std::vector<double> breakpoints;
  std::vector<double> levels;
};

StepFunction primitive_of_atomic(const AtomicMeasure& mu);

struct UniformDensity {
  double lo = 0.0;
  double hi = 1.0;
  double mass = 1.0;
};

/// Hat-shaped density centred at `center`, vanishing outside center +- half_width.
struct TriangularDensity {
  double center = 0.0;
  double half_width = 1.0;
  double mass = 1.0;
};

using InitialData = std::variant<AtomicMeasure, UniformDensity, TriangularDensity>;

double total_mass(const InitialData& data);

struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n_cells = 100;

  double dx() const { return (x_max - x_min) / static_cast<double>(n_cells); }
  double face(std::size_t i) const;
  double center(std::size_t cell) const { return face(cell) + 0.5 * dx(); }
  void validate() const;
};

/// The primitive u sampled at the n_cells + 1 cell faces; cell masses are differences of
/// consecutive face values.
class GridField {
 public:
  /// Checks u_faces[0] = 0 and u_faces.back() = total_mass to 1e-12 and that cell masses are
  /// >= -1e-14. The boundary values are then pinned exactly.
  static GridField from_faces(GridSpec grid, std::vector<double> u_faces, double total_mass);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> u_faces() const { return u_; }
  double total_mass() const { return total_mass_; }
  std::size_t n_cells() const { return grid_.n_cells; }
  double dx() const { return grid_.dx(); }

  double cell_mass(std::size_t cell) const { return u_[cell + 1] - u_[cell]; }
  double cell_density(std::size_t cell) const { return cell_mass(cell) / grid_.dx(); }
  std::vector<double> cell_masses() const;

 private:
  GridSpec grid_;
  std::vector<double> u_;
  double total_mass_ = 0.0;
};

/// u(face) = mass on (-inf, face]. Atoms must lie strictly inside (x_min, x_max); closed-form
/// densities must be supported inside the domain.
GridField sample_to_grid(const InitialData& data, const GridSpec& grid);

/// Primitive of a measure as a piecewise-linear function with jumps: linear between nodes, value
/// `left` just before a node and `right` at and after it. 0 before the first node and the total
/// mass after the last. Atomic measures and grid fields both convert implicitly.
class Primitive {
 public:
  struct Node {
    double x;
    double left;
    double right;
  };

  Primitive(const AtomicMeasure& mu);  // NOLINT(google-explicit-constructor)
  Primitive(const GridField& field);   // NOLINT(google-explicit-constructor)
  /// Nodes sorted by x; the last right value is the total mass.
  static Primitive from_nodes(std::vector<Node> nodes);

  double total_mass() const { return total_mass_; }
  const std::vector<Node>& nodes() const { return nodes_; }

  /// U(x), right-continuous.
  double operator()(double x) const;
  /// U(x-).
  double left_limit(double x) const;

 private:
  Primitive() = default;

  std::vector<Node> nodes_;
  double total_mass_ = 0.0;
};

/// Integral of |U_mu - U_nu|. Masses must agree to 1e-10.
double wasserstein1(const Primitive& mu, const Primitive& nu);

/// inf { x : U(x) >= q } for 0 < q < total mass.
double quantile(const Primitive& mu, double q);

/// Compact group of cells carrying a concentrated mass.
struct Cluster {
  std::size_t first_cell = 0;
  std::size_t last_cell = 0;  // inclusive
  double mass = 0.0;
  double position = 0.0;  // mass-weighted centroid of cell centres
};

struct ExtractionParams {
  double mass_fraction = 0.05;  // threshold as a fraction of the total mass
  std::size_t width_cells = 5;
};

/// Greedy window search: repeatedly take the heaviest run of at most `width_cells` unclaimed cells
/// and keep it while it holds at least `mass_threshold`. Result sorted by position.
std::vector<Cluster> extract_clusters(const GridField& field, double mass_threshold,
                                      std::size_t width_cells);

/// Atoms of the clusters above; may be empty.
std::vector<Atom> extract_atoms(const GridField& field, double mass_threshold,
                                std::size_t width_cells);
std::vector<Atom> extract_atoms(const GridField& field, const ExtractionParams& params = {});

}  // namespace dualflow
