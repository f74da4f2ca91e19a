#include "dualflow/particle_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dualflow/errors.hpp"

namespace dualflow {
namespace {

constexpr double kGapTol = 1e-12;

void require_attractive(const FluxModel& model, double total_mass) {
  if (!model.is_nonincreasing(0.0, total_mass)) {
    throw RefusedError("aggregate dynamics need a non-increasing velocity a on [0, total mass]; " +
                       std::string(to_string(model.kind())) + " model is not");
  }
}

std::vector<double> mean_velocities(const std::vector<double>& masses, const FluxModel& model) {
  std::vector<double> v(masses.size());
  double cum = 0.0;
  double a_prev = model.A(0.0);
  for (std::size_t i = 0; i < masses.size(); ++i) {
    cum += masses[i];
    const double a_next = model.A(cum);
    v[i] = (a_next - a_prev) / masses[i];
    a_prev = a_next;
  }
  return v;
}

}  // namespace

struct AggregateAccess {
  static void drift(AggregateSystem& s, double t) {
    const double dt = t - s.t_;
    for (std::size_t i = 0; i < s.x_.size(); ++i) s.x_[i] += s.v_[i] * dt;
    s.t_ = t;
  }

  // Merges every run of atoms joined by a marked gap; returns the resulting groups.
  static std::vector<MergeGroup> merge(AggregateSystem& s, const std::vector<bool>& joined) {
    std::vector<MergeGroup> groups;
    std::vector<double> x, m;
    std::vector<std::size_t> ids;
    std::size_t i = 0;
    const std::size_t n = s.x_.size();
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && joined[j]) ++j;
      double mass = 0.0;
      double moment = 0.0;
      std::size_t id = s.ids_[i];
      MergeGroup g;
      for (std::size_t k = i; k <= j; ++k) {
        mass += s.m_[k];
        moment += s.m_[k] * s.x_[k];
        id = std::min(id, s.ids_[k]);
        g.ids.push_back(s.ids_[k]);
      }
      x.push_back(j == i ? s.x_[i] : moment / mass);
      m.push_back(mass);
      ids.push_back(id);
      if (j > i) {
        g.x = x.back();
        g.m = mass;
        groups.push_back(std::move(g));
      }
      i = j + 1;
    }
    s.x_ = std::move(x);
    s.m_ = std::move(m);
    s.ids_ = std::move(ids);
    s.recompute_velocities();
    return groups;
  }
};

std::vector<double> velocities(const AtomicMeasure& atoms, const FluxModel& model) {
  require_attractive(model, atoms.total_mass());
  std::vector<double> masses;
  for (const Atom& a : atoms.atoms()) masses.push_back(a.m);
  return mean_velocities(masses, model);
}

AggregateSystem::AggregateSystem(const AtomicMeasure& atoms, FluxModel model, double t0)
    : model_(std::move(model)), t_(t0), total_mass_(atoms.total_mass()) {
  require_attractive(model_, total_mass_);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    x_.push_back(atoms.atoms()[i].x);
    m_.push_back(atoms.atoms()[i].m);
    ids_.push_back(i);
  }
  recompute_velocities();
}

void AggregateSystem::recompute_velocities() { v_ = mean_velocities(m_, model_); }

AtomicMeasure AggregateSystem::measure() const {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < x_.size(); ++i) atoms.push_back({x_[i], m_[i]});
  return AtomicMeasure::from_atoms(std::move(atoms));
}

double AggregateSystem::center_of_mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) s += m_[i] * x_[i];
  return s;
}

std::optional<CollisionEvent> next_event(const AggregateSystem& system) {
  const auto& x = system.positions();
  const auto& v = system.velocities();
  const double t0 = system.time();
  double t_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double gap = x[i + 1] - x[i];
    if (gap <= kGapTol) {
      t_min = t0;
      break;
    }
    const double closing = v[i] - v[i + 1];
    if (closing > 0.0) t_min = std::min(t_min, t0 + gap / closing);
  }
  if (!std::isfinite(t_min)) return std::nullopt;

  CollisionEvent ev{t_min, {}};
  const double dt = t_min - t0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double gap = (x[i + 1] + v[i + 1] * dt) - (x[i] + v[i] * dt);
    if (gap <= kGapTol) ev.pairs.push_back(i);
  }
  return ev;
}

EventLog advance(AggregateSystem& system, double t_target) {
  if (!(t_target >= system.time())) throw InputError("advance: target time precedes current time");
  EventLog log;
  for (std::size_t count = 0;; ++count) {
    if (count > 1'000'000) throw NumericalError("advance: event cap exceeded");
    const auto ev = next_event(system);
    if (!ev || ev->t > t_target) break;
    AggregateAccess::drift(system, ev->t);
    std::vector<bool> joined(system.size(), false);
    for (std::size_t i : ev->pairs) joined[i] = true;
    const auto& x = system.positions();
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      if (x[i + 1] - x[i] <= kGapTol) joined[i] = true;
    }
    EventRecord rec{ev->t, AggregateAccess::merge(system, joined)};
    if (!log.empty() && log.back().t == rec.t) {
      for (auto& g : rec.groups) log.back().groups.push_back(std::move(g));
    } else if (!rec.groups.empty()) {
      log.push_back(std::move(rec));
    }
  }
  AggregateAccess::drift(system, t_target);
  return log;
}

double collapse_time(const AggregateSystem& system, std::size_t max_events) {
  AggregateSystem s = system;
  for (std::size_t count = 0; s.size() > 1; ++count) {
    if (count >= max_events) throw NumericalError("collapse_time: event cap exceeded");
    const auto ev = next_event(s);
    if (!ev) return std::numeric_limits<double>::infinity();
    advance(s, ev->t);
  }
  return s.time();
}

}  // namespace dualflow
