#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gct/trajectory.hpp"

namespace gct {

class ScenarioModel;

/// No actions ever.
struct NeverTreat {
  friend bool operator==(const NeverTreat&, const NeverTreat&) = default;
};

/// Actions at fixed times whatever the longitudinal history.
struct FixedTimes {
  std::vector<double> times;
  friend bool operator==(const FixedTimes&, const FixedTimes&) = default;
};

/// After each longitudinal event (and after time zero) act at
/// anchor + delay, anchor + delay + period, ... until the next longitudinal
/// event restarts the schedule.
struct PeriodicAfterL {
  double delay = 0.0;
  double period = 0.0;
  friend bool operator==(const PeriodicAfterL&, const PeriodicAfterL&) = default;
};

/// Deterministic treatment plan.
///
/// A plan is a family of sub-plans: given the longitudinal event times
/// 0 = t_0 < t_1 < ... < t_j seen so far, the sub-plan for j prescribes the
/// action times after t_j that apply until the next longitudinal event.
class Plan {
 public:
  using Rule = std::variant<NeverTreat, FixedTimes, PeriodicAfterL>;

  Plan() = default;
  explicit Plan(Rule rule);

  static Plan never() { return Plan(NeverTreat{}); }
  static Plan fixed(std::vector<double> times) { return Plan(FixedTimes{std::move(times)}); }
  static Plan periodic_after_l(double delay, double period) {
    return Plan(PeriodicAfterL{delay, period});
  }

  [[nodiscard]] const Rule& rule() const { return rule_; }
  [[nodiscard]] std::string_view kind_name() const;

  /// Appends to `out` the actions the current sub-plan schedules in
  /// (after, until], assuming no further longitudinal event. The sub-plan is
  /// the one anchored at the last entry of `l_history` (or at zero).
  void segment_actions(std::span<const double> l_history, double after, double until,
                       std::vector<double>& out) const;

  friend bool operator==(const Plan&, const Plan&) = default;

 private:
  Rule rule_ = NeverTreat{};
};

/// Planned action times for a full longitudinal sequence, truncated at the
/// horizon. Throws TieError if an action would coincide with an l time.
std::vector<double> planned_actions(const Plan& g, std::span<const double> l_times,
                                    double horizon);

/// The plan-consistent trajectory built from the longitudinal times.
Trajectory apply_plan(const Plan& g, std::span<const double> l_times, double horizon);

/// Smallest planned action time strictly after t, or nothing if the current
/// sub-plan has no further action before the horizon. `a_done` must be the
/// plan's own output up to t, otherwise PlanStateError.
std::optional<double> next_planned_action(const Plan& g, std::span<const double> l_history,
                                          std::span<const double> a_done, double t,
                                          double horizon);

/// True iff the trajectory's actions are exactly those the plan prescribes
/// for its longitudinal times.
bool is_consistent(const Trajectory& traj, const Plan& g);

struct EvaluabilityReport {
  bool ok = true;
  std::optional<double> first_violation;
  std::optional<Mark> violating_mark;
};

/// Walks the plan-consistent trajectory and flags the first event whose
/// observational marginal intensity is zero, i.e. a planned action outside the
/// support of the observed action process.
EvaluabilityReport evaluability_check(const ScenarioModel& model, const Plan& g,
                                      std::span<const double> l_times);

nlohmann::json to_json(const Plan& g);
Plan plan_from_json(const nlohmann::json& j);

}  // namespace gct
