#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dualflow/flux.hpp"
#include "dualflow/measure.hpp"

namespace dualflow {

/// Dirac aggregates drifting at the velocities induced by the flux, merging on contact.
/// Atom ids are the initial indices; a merged atom keeps the smallest id of its group.
class AggregateSystem {
 public:
  /// Refuses models whose velocity a is not non-increasing on [0, total mass].
  AggregateSystem(const AtomicMeasure& atoms, FluxModel model, double t0 = 0.0);

  double time() const { return t_; }
  const FluxModel& model() const { return model_; }
  std::size_t size() const { return x_.size(); }
  const std::vector<double>& positions() const { return x_; }
  const std::vector<double>& masses() const { return m_; }
  const std::vector<double>& velocities() const { return v_; }
  const std::vector<std::size_t>& ids() const { return ids_; }
  double total_mass() const { return total_mass_; }

  AtomicMeasure measure() const;
  double center_of_mass() const;  // sum m_i x_i, not normalized

 private:
  friend struct AggregateAccess;
  void recompute_velocities();

  FluxModel model_;
  double t_ = 0.0;
  std::vector<double> x_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::vector<std::size_t> ids_;
  double total_mass_ = 0.0;
};

/// v_i = (A(M_i) - A(M_{i-1})) / m_i with M_i the cumulative mass up to atom i.
std::vector<double> velocities(const AtomicMeasure& atoms, const FluxModel& model);

struct CollisionEvent {
  double t = 0.0;
  /// Indices i of the adjacent pairs (i, i + 1) that close at time t.
  std::vector<std::size_t> pairs;
};

/// Earliest future closing of an adjacent gap, with every pair closing at that instant. Gaps
/// already below 1e-12 close immediately.
std::optional<CollisionEvent> next_event(const AggregateSystem& system);

struct MergeGroup {
  std::vector<std::size_t> ids;
  double x = 0.0;
  double m = 0.0;
};

struct EventRecord {
  double t = 0.0;
  std::vector<MergeGroup> groups;
};

using EventLog = std::vector<EventRecord>;

/// Drifts and merges until t_target; appends one record per event instant.
EventLog advance(AggregateSystem& system, double t_target);

/// Absolute time at which a single aggregate remains (the current time when there is only one
/// atom); +infinity when some gap never closes. Throws NumericalError after `max_events` events.
double collapse_time(const AggregateSystem& system, std::size_t max_events = 1'000'000);

}  // namespace dualflow
