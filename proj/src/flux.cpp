#include "dualflow/flux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dualflow/errors.hpp"

namespace dualflow {
namespace {

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<double> trimmed(std::vector<double> c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  return c;
}

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  return trimmed(std::move(d));
}

// Root of p on [lo, hi] given p(lo) and p(hi) of opposite sign (or one of them zero).
double bisect(const std::vector<double>& p, double lo, double hi) {
  double plo = horner(p, lo);
  if (plo == 0.0) return lo;
  if (horner(p, hi) == 0.0) return hi;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= 1e-14 * std::max(1.0, std::abs(mid))) break;
    const double pm = horner(p, mid);
    if (pm == 0.0) return mid;
    if ((pm < 0.0) == (plo < 0.0)) {
      lo = mid;
      plo = pm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Real roots of p in [lo, hi], sorted. p is split into monotone pieces at the roots of p', each
// piece holds at most one root.
std::vector<double> real_roots(const std::vector<double>& p, double lo, double hi) {
  if (p.size() <= 1) return {};
  if (p.size() == 2) {
    const double r = -p[0] / p[1];
    if (r >= lo && r <= hi) return {r};
    return {};
  }
  std::vector<double> breaks{lo};
  for (double c : real_roots(derivative(p), lo, hi)) breaks.push_back(c);
  breaks.push_back(hi);

  std::vector<double> roots;
  const double scale = std::accumulate(p.begin(), p.end(), 0.0,
                                       [](double s, double c) { return s + std::abs(c); });
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double l = breaks[k];
    const double r = breaks[k + 1];
    const double pl = horner(p, l);
    const double pr = horner(p, r);
    if (std::abs(pl) <= 1e-15 * scale) {
      roots.push_back(l);
    } else if ((pl < 0.0) != (pr < 0.0) && std::abs(pr) > 1e-15 * scale) {
      roots.push_back(bisect(p, l, r));
    }
  }
  if (std::abs(horner(p, hi)) <= 1e-15 * scale) roots.push_back(hi);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

double cauchy_bound(const std::vector<double>& p) {
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) m = std::max(m, std::abs(p[k] / p.back()));
  return 1.0 + m;
}

void require_finite(double u, const char* what) {
  if (!std::isfinite(u)) throw InputError(std::string(what) + ": non-finite argument");
}

}  // namespace

std::string_view to_string(FluxKind kind) {
  switch (kind) {
    case FluxKind::QuadraticAttractive:
      return "quadratic-attractive";
    case FluxKind::QuadraticRepulsive:
      return "quadratic-repulsive";
    case FluxKind::Polynomial:
      return "polynomial";
    case FluxKind::PiecewiseLinearA:
      return "piecewise-linear-a";
  }
  return "unknown";
}

FluxKind parse_flux_kind(std::string_view name) {
  for (auto k : {FluxKind::QuadraticAttractive, FluxKind::QuadraticRepulsive, FluxKind::Polynomial,
                 FluxKind::PiecewiseLinearA}) {
    if (to_string(k) == name) return k;
  }
  throw InputError("unknown flux kind '" + std::string(name) + "'");
}

FluxModel FluxModel::quadratic_attractive() {
  FluxModel m;
  m.kind_ = FluxKind::QuadraticAttractive;
  m.coeffs_ = {0.0, -1.0};
  m.prepare();
  return m;
}

FluxModel FluxModel::quadratic_repulsive() {
  FluxModel m;
  m.kind_ = FluxKind::QuadraticRepulsive;
  m.coeffs_ = {0.0, 1.0};
  m.prepare();
  return m;
}

FluxModel FluxModel::polynomial(std::vector<double> a_coeffs) {
  for (double c : a_coeffs) {
    if (!std::isfinite(c)) throw InputError("polynomial flux: non-finite coefficient");
  }
  FluxModel m;
  m.kind_ = FluxKind::Polynomial;
  m.coeffs_ = trimmed(std::move(a_coeffs));
  m.prepare();
  return m;
}

FluxModel FluxModel::piecewise_linear(std::vector<Knot> knots) {
  if (knots.size() < 2) throw InputError("piecewise-linear flux: need at least two knots");
  for (std::size_t k = 0; k < knots.size(); ++k) {
    if (!std::isfinite(knots[k].u) || !std::isfinite(knots[k].a)) {
      throw InputError("piecewise-linear flux: non-finite knot");
    }
    if (k > 0 && !(knots[k].u > knots[k - 1].u)) {
      throw InputError("piecewise-linear flux: knot abscissae must be strictly increasing");
    }
  }
  FluxModel m;
  m.kind_ = FluxKind::PiecewiseLinearA;
  m.knots_ = std::move(knots);
  m.prepare();
  return m;
}

void FluxModel::prepare() {
  if (kind_ != FluxKind::PiecewiseLinearA) {
    if (coeffs_.size() >= 2) a_roots_ = real_roots(coeffs_, -cauchy_bound(coeffs_), cauchy_bound(coeffs_));
    const auto da = derivative(coeffs_);
    if (da.size() >= 2) a_critical_ = real_roots(da, -cauchy_bound(da), cauchy_bound(da));
    return;
  }

  knot_integrals_.assign(knots_.size(), 0.0);
  for (std::size_t k = 1; k < knots_.size(); ++k) {
    const double h = knots_[k].u - knots_[k - 1].u;
    knot_integrals_[k] = knot_integrals_[k - 1] + 0.5 * h * (knots_[k].a + knots_[k - 1].a);
  }
  integral_at_zero_ = 0.0;
  integral_at_zero_ = A(0.0);

  const std::size_t last = knots_.size() - 1;
  for (std::size_t k = 0; k < last; ++k) {
    const Knot& p = knots_[k];
    const Knot& q = knots_[k + 1];
    const double lo = k == 0 ? -std::numeric_limits<double>::infinity() : p.u;
    const double hi = k + 1 == last ? std::numeric_limits<double>::infinity() : q.u;
    if (p.a == q.a) {
      if (p.a == 0.0) {
        // a vanishes on a whole segment; the knots bound the flat piece of A.
        a_roots_.push_back(p.u);
        a_roots_.push_back(q.u);
      }
      continue;
    }
    const double r = p.u - p.a * (q.u - p.u) / (q.a - p.a);
    if (r >= lo && r <= hi) a_roots_.push_back(r);
  }
  std::sort(a_roots_.begin(), a_roots_.end());
  a_roots_.erase(std::unique(a_roots_.begin(), a_roots_.end()), a_roots_.end());
  for (std::size_t k = 1; k < last; ++k) a_critical_.push_back(knots_[k].u);
}

double FluxModel::a(double u) const {
  if (kind_ != FluxKind::PiecewiseLinearA) return horner(coeffs_, u);
  const auto it = std::upper_bound(knots_.begin() + 1, knots_.end() - 1, u,
                                   [](double v, const Knot& k) { return v < k.u; });
  const Knot& q = *it;
  const Knot& p = *(it - 1);
  return p.a + (q.a - p.a) * (u - p.u) / (q.u - p.u);
}

double FluxModel::A(double u) const {
  if (kind_ != FluxKind::PiecewiseLinearA) {
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * u + coeffs_[k] / static_cast<double>(k + 1);
    return acc * u;
  }
  const auto it = std::upper_bound(knots_.begin() + 1, knots_.end() - 1, u,
                                   [](double v, const Knot& k) { return v < k.u; });
  const std::size_t s = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const Knot& p = knots_[s];
  const Knot& q = knots_[s + 1];
  const double slope = (q.a - p.a) / (q.u - p.u);
  const double d = u - p.u;
  return knot_integrals_[s] + p.a * d + 0.5 * slope * d * d - integral_at_zero_;
}

std::vector<double> FluxModel::sample_points(const std::vector<double>& interior, double lo,
                                             double hi) const {
  std::vector<double> pts{lo};
  auto first = std::upper_bound(interior.begin(), interior.end(), lo);
  for (auto it = first; it != interior.end() && *it < hi; ++it) pts.push_back(*it);
  pts.push_back(hi);
  return pts;
}

std::vector<double> FluxModel::a_profile(double lo, double hi) const {
  auto pts = sample_points(a_critical_, lo, hi);
  for (double& p : pts) p = a(p);
  return pts;
}

double FluxModel::min_A(double lo, double hi) const {
  double best = std::min(A(lo), A(hi));
  for (auto it = std::upper_bound(a_roots_.begin(), a_roots_.end(), lo);
       it != a_roots_.end() && *it < hi; ++it) {
    best = std::min(best, A(*it));
  }
  return best;
}

double FluxModel::max_A(double lo, double hi) const {
  double best = std::max(A(lo), A(hi));
  for (auto it = std::upper_bound(a_roots_.begin(), a_roots_.end(), lo);
       it != a_roots_.end() && *it < hi; ++it) {
    best = std::max(best, A(*it));
  }
  return best;
}

double FluxModel::min_a(double lo, double hi) const {
  const auto v = a_profile(lo, hi);
  return *std::min_element(v.begin(), v.end());
}

double FluxModel::max_a(double lo, double hi) const {
  const auto v = a_profile(lo, hi);
  return *std::max_element(v.begin(), v.end());
}

double FluxModel::max_abs_a(double lo, double hi) const {
  return std::max(std::abs(min_a(lo, hi)), std::abs(max_a(lo, hi)));
}

// Between consecutive profile points a is monotone, so comparing neighbours decides the question.
bool FluxModel::is_nonincreasing(double lo, double hi) const {
  const auto v = a_profile(lo, hi);
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] > v[k - 1] + 1e-13 * std::max(1.0, std::abs(v[k - 1]))) return false;
  }
  return true;
}

bool FluxModel::is_strictly_decreasing(double lo, double hi) const {
  const auto v = a_profile(lo, hi);
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] < v[k - 1])) return false;
  }
  return true;
}

bool FluxModel::is_nondecreasing(double lo, double hi) const {
  const auto v = a_profile(lo, hi);
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] < v[k - 1] - 1e-13 * std::max(1.0, std::abs(v[k - 1]))) return false;
  }
  return true;
}

bool FluxModel::is_strictly_increasing(double lo, double hi) const {
  const auto v = a_profile(lo, hi);
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] > v[k - 1])) return false;
  }
  return true;
}

bool FluxModel::is_constant(double lo, double hi) const {
  return is_nonincreasing(lo, hi) && is_nondecreasing(lo, hi);
}

double eval_a(const FluxModel& model, double u) {
  require_finite(u, "eval_a");
  return model.a(u);
}

double eval_A(const FluxModel& model, double u) {
  require_finite(u, "eval_A");
  return model.A(u);
}

double godunov_flux(const FluxModel& model, double u_left, double u_right) {
  require_finite(u_left, "godunov_flux");
  require_finite(u_right, "godunov_flux");
  if (u_left == u_right) return model.A(u_left);
  if (u_left < u_right) return model.min_A(u_left, u_right);
  return model.max_A(u_right, u_left);
}

}  // namespace dualflow
