#include "dualflow/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dualflow/errors.hpp"

namespace dualflow {
namespace {

double uniform_cdf(const UniformDensity& d, double x) {
  if (x <= d.lo) return 0.0;
  if (x >= d.hi) return d.mass;
  return d.mass * (x - d.lo) / (d.hi - d.lo);
}

double triangular_cdf(const TriangularDensity& d, double x) {
  const double lo = d.center - d.half_width;
  const double hi = d.center + d.half_width;
  const double h2 = 2.0 * d.half_width * d.half_width;
  if (x <= lo) return 0.0;
  if (x >= hi) return d.mass;
  if (x <= d.center) return d.mass * (x - lo) * (x - lo) / h2;
  return d.mass * (1.0 - (hi - x) * (hi - x) / h2);
}

void require_inside(double lo, double hi, const GridSpec& grid, const char* what) {
  if (!(lo > grid.x_min && hi < grid.x_max)) {
    throw DomainError(std::string(what) + " support [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "] must lie strictly inside the grid (" +
                      std::to_string(grid.x_min) + ", " + std::to_string(grid.x_max) + ")");
  }
}

// Integral over an interval of length len of |f| where f is linear from fa to fb.
double abs_linear_integral(double fa, double fb, double len) {
  if ((fa >= 0.0) == (fb >= 0.0)) return 0.5 * (std::abs(fa) + std::abs(fb)) * len;
  const double s = std::abs(fa) + std::abs(fb);
  return 0.5 * (fa * fa + fb * fb) / s * len;
}

}  // namespace

AtomicMeasure AtomicMeasure::from_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw InputError("atomic measure: no atoms (total mass must be positive)");
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.x) || !std::isfinite(a.m)) throw InputError("atomic measure: non-finite atom");
    if (!(a.m > 0.0)) throw InputError("atomic measure: atom masses must be positive");
  }
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& p, const Atom& q) { return p.x < q.x; });
  AtomicMeasure mu;
  for (const Atom& a : atoms) {
    if (!mu.atoms_.empty() && mu.atoms_.back().x == a.x) {
      mu.atoms_.back().m += a.m;
    } else {
      mu.atoms_.push_back(a);
    }
    mu.total_mass_ += a.m;
  }
  return mu;
}

StepFunction primitive_of_atomic(const AtomicMeasure& mu) {
  StepFunction f;
  f.levels.push_back(0.0);
  double acc = 0.0;
  for (const Atom& a : mu.atoms()) {
    acc += a.m;
    f.breakpoints.push_back(a.x);
    f.levels.push_back(acc);
  }
  return f;
}

double total_mass(const InitialData& data) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          return d.total_mass();
        } else {
          return d.mass;
        }
      },
      data);
}

double GridSpec::face(std::size_t i) const {
  if (i == n_cells) return x_max;
  return x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(n_cells);
}

void GridSpec::validate() const {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw InputError("grid: need finite x_min < x_max");
  }
  if (n_cells == 0) throw InputError("grid: n_cells must be positive");
}

GridField GridField::from_faces(GridSpec grid, std::vector<double> u_faces, double total_mass) {
  grid.validate();
  if (u_faces.size() != grid.n_cells + 1) throw InputError("grid field: need n_cells + 1 face values");
  if (!std::isfinite(total_mass) || !(total_mass > 0.0)) {
    throw InputError("grid field: total mass must be positive");
  }
  for (double v : u_faces) {
    if (!std::isfinite(v)) throw NumericalError("grid field: non-finite face value");
  }
  if (std::abs(u_faces.front()) > 1e-12) throw InputError("grid field: u at the left face must be 0");
  if (std::abs(u_faces.back() - total_mass) > 1e-12) {
    throw InputError("grid field: u at the right face must equal the total mass");
  }
  for (std::size_t i = 0; i + 1 < u_faces.size(); ++i) {
    if (u_faces[i + 1] - u_faces[i] < -1e-14) {
      throw InputError("grid field: u must be nondecreasing (negative mass in cell " +
                       std::to_string(i) + ")");
    }
  }
  u_faces.front() = 0.0;
  u_faces.back() = total_mass;
  GridField f;
  f.grid_ = grid;
  f.u_ = std::move(u_faces);
  f.total_mass_ = total_mass;
  return f;
}

std::vector<double> GridField::cell_masses() const {
  std::vector<double> m(n_cells());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = cell_mass(i);
  return m;
}

GridField sample_to_grid(const InitialData& data, const GridSpec& grid) {
  grid.validate();
  std::vector<double> u(grid.n_cells + 1, 0.0);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          require_inside(d.atoms().front().x, d.atoms().back().x, grid, "atoms");
          std::size_t next = 0;
          double acc = 0.0;
          for (std::size_t i = 0; i <= grid.n_cells; ++i) {
            const double f = grid.face(i);
            while (next < d.size() && d.atoms()[next].x <= f) acc += d.atoms()[next++].m;
            u[i] = acc;
          }
        } else if constexpr (std::is_same_v<T, UniformDensity>) {
          if (!(d.hi > d.lo) || !(d.mass > 0.0)) throw InputError("uniform density: need lo < hi, mass > 0");
          require_inside(d.lo, d.hi, grid, "uniform density");
          for (std::size_t i = 0; i <= grid.n_cells; ++i) u[i] = uniform_cdf(d, grid.face(i));
        } else {
          if (!(d.half_width > 0.0) || !(d.mass > 0.0)) {
            throw InputError("triangular density: need half_width > 0, mass > 0");
          }
          require_inside(d.center - d.half_width, d.center + d.half_width, grid, "triangular density");
          for (std::size_t i = 0; i <= grid.n_cells; ++i) u[i] = triangular_cdf(d, grid.face(i));
        }
      },
      data);
  return GridField::from_faces(grid, std::move(u), total_mass(data));
}

Primitive::Primitive(const AtomicMeasure& mu) : total_mass_(mu.total_mass()) {
  double acc = 0.0;
  for (const Atom& a : mu.atoms()) {
    nodes_.push_back({a.x, acc, acc + a.m});
    acc += a.m;
  }
  nodes_.back().right = total_mass_;
}

Primitive::Primitive(const GridField& field) : total_mass_(field.total_mass()) {
  const auto u = field.u_faces();
  nodes_.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) nodes_.push_back({field.grid().face(i), u[i], u[i]});
}

Primitive Primitive::from_nodes(std::vector<Node> nodes) {
  if (nodes.empty()) throw InputError("primitive: no nodes");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i].x > nodes[i - 1].x)) throw InputError("primitive: node positions must increase");
    if (nodes[i].left < nodes[i - 1].right || nodes[i].right < nodes[i].left) {
      throw InputError("primitive: values must be nondecreasing");
    }
  }
  if (nodes.front().left != 0.0 || !(nodes.back().right > 0.0)) {
    throw InputError("primitive: must rise from 0 to a positive total mass");
  }
  Primitive p;
  p.total_mass_ = nodes.back().right;
  p.nodes_ = std::move(nodes);
  return p;
}

double Primitive::operator()(double x) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x,
                             [](double v, const Node& n) { return v < n.x; });
  if (it == nodes_.begin()) return 0.0;
  const Node& p = *(it - 1);
  if (it == nodes_.end()) return p.right;
  const Node& q = *it;
  return p.right + (q.left - p.right) * (x - p.x) / (q.x - p.x);
}

double Primitive::left_limit(double x) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x,
                             [](const Node& n, double v) { return n.x < v; });
  if (it != nodes_.end() && it->x == x) return it->left;
  if (it == nodes_.begin()) return 0.0;
  const Node& p = *(it - 1);
  if (it == nodes_.end()) return p.right;
  const Node& q = *it;
  return p.right + (q.left - p.right) * (x - p.x) / (q.x - p.x);
}

double wasserstein1(const Primitive& mu, const Primitive& nu) {
  if (std::abs(mu.total_mass() - nu.total_mass()) > 1e-10) {
    throw InputError("wasserstein1: total masses differ (" + std::to_string(mu.total_mass()) +
                     " vs " + std::to_string(nu.total_mass()) + ")");
  }
  std::vector<double> xs;
  xs.reserve(mu.nodes().size() + nu.nodes().size());
  for (const auto& n : mu.nodes()) xs.push_back(n.x);
  for (const auto& n : nu.nodes()) xs.push_back(n.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double fa = mu(xs[k]) - nu(xs[k]);
    const double fb = mu.left_limit(xs[k + 1]) - nu.left_limit(xs[k + 1]);
    total += abs_linear_integral(fa, fb, xs[k + 1] - xs[k]);
  }
  return total;
}

double quantile(const Primitive& mu, double q) {
  if (!(q > 0.0 && q < mu.total_mass())) {
    throw InputError("quantile: level must lie strictly between 0 and the total mass");
  }
  const auto& nodes = mu.nodes();
  double prev_x = nodes.front().x;
  double prev_value = 0.0;
  for (const auto& n : nodes) {
    if (n.left >= q) {
      if (n.left == prev_value) return n.x;
      return prev_x + (n.x - prev_x) * (q - prev_value) / (n.left - prev_value);
    }
    if (n.right >= q) return n.x;
    prev_x = n.x;
    prev_value = n.right;
  }
  return nodes.back().x;
}

std::vector<Cluster> extract_clusters(const GridField& field, double mass_threshold,
                                      std::size_t width_cells) {
  const std::size_t n = field.n_cells();
  if (width_cells == 0) throw InputError("extract_atoms: width_cells must be positive");
  const auto mass = field.cell_masses();
  std::vector<bool> claimed(n, false);
  std::vector<Cluster> out;

  while (true) {
    double best = -1.0;
    std::size_t best_start = 0;
    std::size_t best_end = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (claimed[s]) continue;
      double acc = 0.0;
      std::size_t e = s;
      while (e < n && e < s + width_cells && !claimed[e]) acc += mass[e++];
      if (acc > best) {
        best = acc;
        best_start = s;
        best_end = e;
      }
    }
    if (best < mass_threshold || best <= 0.0) break;

    while (best_start + 1 < best_end && mass[best_start] <= 0.0) ++best_start;
    while (best_end - 1 > best_start && mass[best_end - 1] <= 0.0) --best_end;
    Cluster c;
    c.first_cell = best_start;
    c.last_cell = best_end - 1;
    double moment = 0.0;
    for (std::size_t i = best_start; i < best_end; ++i) {
      claimed[i] = true;
      c.mass += mass[i];
      moment += mass[i] * field.grid().center(i);
    }
    c.position = moment / c.mass;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(),
            [](const Cluster& p, const Cluster& q) { return p.first_cell < q.first_cell; });
  return out;
}

std::vector<Atom> extract_atoms(const GridField& field, double mass_threshold,
                                std::size_t width_cells) {
  std::vector<Atom> atoms;
  for (const Cluster& c : extract_clusters(field, mass_threshold, width_cells)) {
    atoms.push_back({c.position, c.mass});
  }
  return atoms;
}

std::vector<Atom> extract_atoms(const GridField& field, const ExtractionParams& params) {
  return extract_atoms(field, params.mass_fraction * field.total_mass(), params.width_cells);
}

}  // namespace dualflow
