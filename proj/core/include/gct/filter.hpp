#pragma once

#include <span>
#include <vector>

#include "gct/hazards.hpp"
#include "gct/outcome.hpp"
#include "gct/plans.hpp"
#include "gct/scenario.hpp"
#include "gct/trajectory.hpp"

namespace gct {

/// Posterior over the latent support given an event history.
///
/// Weights are held as normalized logarithms (log-sum-exp equal to zero) so
/// long histories and extreme rates cannot underflow them.
struct PosteriorState {
  std::vector<double> log_weights;
  double at_time = 0.0;
  /// True for a left limit taken just before a possible event.
  bool left_limit = false;

  static PosteriorState from_weights(std::span<const double> weights, double at_time = 0.0);
  [[nodiscard]] std::vector<double> weights() const;
};

/// Posterior plus the event counts at the same instant.
struct FilterCheckpoint {
  PosteriorState posterior;
  EventCounts counts;
};

PosteriorState prior_state(const ScenarioModel& model);

/// Survival tilt over an event-free interval: w(u) * exp(-R(u) dt).
PosteriorState filter_interval(const PosteriorState& state, std::span<const double> total_rates,
                               double dt);

/// Bayes update for an event whose mark has the given per-state rates.
/// Throws SupportError if no state with positive weight can produce it.
PosteriorState filter_event(const PosteriorState& state, std::span<const double> mark_rates);

/// In-place form of filter_event for hot loops.
void apply_event(PosteriorState& state, std::span<const double> mark_rates);

/// Filters the events of `traj` in (0, upto]; optionally tilts on to `upto`.
PosteriorState run_filter(const ScenarioModel& model, const Trajectory& traj, double upto,
                          bool include_final_survival);

/// run_filter plus the counts of the filtered events.
FilterCheckpoint filter_checkpoint(const ScenarioModel& model, const Trajectory& traj,
                                   double upto, bool include_final_survival);

/// Observational intensity of `mark` at s, marginalized over u, given the
/// checkpoint and no event in (checkpoint time, s).
double marginal_intensity(const ScenarioModel& model, const FilterCheckpoint& at_cut, double s,
                          Mark mark);

/// Law(Y | mu = traj): the terminal posterior mixed over the outcome rows
/// at the final counts.
OutcomeDist conditional_law_y(const ScenarioModel& model, const Trajectory& traj);

/// Law(Y | mu) given the terminal checkpoint at the horizon.
void mix_outcome_rows(const ScenarioModel& model, const FilterCheckpoint& terminal,
                      std::span<double> out);

/// exp(-integral of the marginal longitudinal intensity over `window`) along
/// the plan-consistent history built from `l_history`. Planned actions inside
/// the window update the posterior. The window must not contain a
/// longitudinal time.
double marginal_l_survival(const ScenarioModel& model, const Plan& g,
                           std::span<const double> l_history, Interval window,
                           double abs_tol = 1e-9);

/// Integrates the marginal longitudinal intensity forward from a checkpoint
/// along a fixed action schedule, assuming no longitudinal event occurs.
///
/// Queries must be made at nondecreasing times. The walker keeps the
/// posterior at the last action as a checkpoint, so posterior and cumulative
/// hazard at any later time cost O(|u|) plus the quadrature.
class LongitudinalHazardWalker {
 public:
  explicit LongitudinalHazardWalker(const ScenarioModel& model, double tol_per_unit_time = 1e-9);

  /// Restart from `start` (taken at start.posterior.at_time) with the given
  /// planned actions, all strictly after the start time and sorted.
  void reset(const FilterCheckpoint& start, std::span<const double> actions);

  /// When false, actions only advance the counts and leave the posterior
  /// alone. Used for per-state continuations where u is known.
  void set_condition_on_actions(bool on) { condition_on_actions_ = on; }

  /// Moves to x, integrating the hazard and applying actions strictly before x.
  void advance_to(double x);

  /// Applies an action scheduled exactly at the current time, if any.
  void absorb_action_at_current();

  /// Whether an unprocessed action sits exactly at the current time.
  [[nodiscard]] bool action_at_current() const;

  [[nodiscard]] double time() const { return now_; }
  [[nodiscard]] double cumulative_hazard() const { return hazard_; }
  [[nodiscard]] EventCounts counts() const { return counts_; }

  /// Posterior log-weights at the current time, as a left limit.
  void current_log_weights(std::vector<double>& out) const;

  /// Current posterior and counts.
  void checkpoint_into(FilterCheckpoint& out) const;

  /// Marginal longitudinal intensity at the current time.
  [[nodiscard]] double current_intensity() const;

 private:
  void load_rates();
  [[nodiscard]] double intensity_after(double dt) const;
  [[nodiscard]] double log_partition(double dt) const;
  void integrate_to(double x);
  void apply_action(double at);

  const ScenarioModel* model_;
  double tol_per_unit_;
  std::vector<double> actions_;
  std::size_t next_action_ = 0;
  std::vector<double> anchor_log_w_;   // posterior at anchor_time_
  double anchor_time_ = 0.0;
  double now_ = 0.0;
  double hazard_ = 0.0;
  EventCounts counts_;
  std::vector<double> totals_;
  std::span<const double> l_rates_;
  bool condition_on_actions_ = true;
  bool constant_intensity_ = false;
  double constant_value_ = 0.0;
  double shared_action_rate_ = 0.0;
  double cached_log_z_ = 0.0;
  double cached_log_z_at_ = 0.0;
  mutable std::vector<double> scratch_;
};

}  // namespace gct
