#include "gct/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gct/errors.hpp"
#include "gct/quadrature.hpp"

namespace gct {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Shifts log-weights so that their log-sum-exp is zero.
void normalize_log(std::span<double> lw) {
  double top = kNegInf;
  for (double v : lw) top = std::max(top, v);
  if (!(top > kNegInf) || !std::isfinite(top)) {
    throw NumericalUnderflow("posterior weights vanished");
  }
  double sum = 0.0;
  for (double v : lw) sum += std::exp(v - top);
  const double shift = top + std::log(sum);
  for (double& v : lw) v -= shift;
}

void tilt(std::span<double> lw, std::span<const double> rates, double dt) {
  if (dt == 0.0) return;
  for (std::size_t u = 0; u < lw.size(); ++u) {
    if (rates[u] != 0.0) lw[u] -= rates[u] * dt;
  }
}

/// Returns false when no state can produce the event.
bool weigh_event(std::span<double> lw, std::span<const double> rates) {
  bool any = false;
  for (std::size_t u = 0; u < lw.size(); ++u) {
    lw[u] = rates[u] > 0.0 ? lw[u] + std::log(rates[u]) : kNegInf;
    any = any || lw[u] > kNegInf;
  }
  return any;
}

void total_rates_into(const ScenarioModel& model, EventCounts c, std::vector<double>& out) {
  auto a = model.action_rates(c);
  auto l = model.longitudinal_rates(c);
  out.resize(a.size());
  for (std::size_t u = 0; u < a.size(); ++u) out[u] = a[u] + l[u];
}

void check_sizes(const PosteriorState& s, std::span<const double> rates) {
  if (rates.size() != s.log_weights.size()) {
    throw DomainError("rate vector length does not match the latent support");
  }
}

void increment(EventCounts& c, Mark mark) {
  if (mark == Mark::Action) {
    ++c.actions;
  } else {
    ++c.longitudinal;
  }
}

}  // namespace

PosteriorState PosteriorState::from_weights(std::span<const double> weights, double at_time) {
  PosteriorState s;
  s.at_time = at_time;
  s.log_weights.reserve(weights.size());
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("posterior weights must be nonnegative");
    s.log_weights.push_back(w > 0.0 ? std::log(w) : kNegInf);
  }
  normalize_log(s.log_weights);
  return s;
}

std::vector<double> PosteriorState::weights() const {
  std::vector<double> w;
  w.reserve(log_weights.size());
  for (double v : log_weights) w.push_back(std::exp(v));
  return w;
}

PosteriorState prior_state(const ScenarioModel& model) {
  return PosteriorState::from_weights(model.prior(), 0.0);
}

PosteriorState filter_interval(const PosteriorState& state, std::span<const double> total_rates,
                               double dt) {
  check_sizes(state, total_rates);
  if (!(dt >= 0.0)) throw DomainError("filter interval must be nonnegative");
  PosteriorState next = state;
  next.at_time = state.at_time + dt;
  next.left_limit = true;
  if (dt == 0.0) return next;
  tilt(next.log_weights, total_rates, dt);
  normalize_log(next.log_weights);
  return next;
}

void apply_event(PosteriorState& state, std::span<const double> mark_rates) {
  check_sizes(state, mark_rates);
  state.left_limit = false;
  if (!weigh_event(state.log_weights, mark_rates)) {
    throw SupportError("event has zero probability under every latent state with positive weight");
  }
  normalize_log(state.log_weights);
}

PosteriorState filter_event(const PosteriorState& state, std::span<const double> mark_rates) {
  PosteriorState next = state;
  apply_event(next, mark_rates);
  return next;
}

FilterCheckpoint filter_checkpoint(const ScenarioModel& model, const Trajectory& traj, double upto,
                                   bool include_final_survival) {
  if (!(upto >= 0.0) || upto > traj.horizon() || upto > model.horizon) {
    throw DomainError("filter time outside [0, horizon]");
  }
  FilterCheckpoint cp{prior_state(model), {}};
  std::vector<double> totals;
  for (const Event& e : traj.events()) {
    if (e.time > upto) break;
    total_rates_into(model, cp.counts, totals);
    cp.posterior = filter_interval(cp.posterior, totals, e.time - cp.posterior.at_time);
    cp.posterior = filter_event(cp.posterior, model.mark_rates(cp.counts, e.mark));
    increment(cp.counts, e.mark);
  }
  if (include_final_survival && upto > cp.posterior.at_time) {
    total_rates_into(model, cp.counts, totals);
    cp.posterior = filter_interval(cp.posterior, totals, upto - cp.posterior.at_time);
  }
  return cp;
}

PosteriorState run_filter(const ScenarioModel& model, const Trajectory& traj, double upto,
                          bool include_final_survival) {
  return filter_checkpoint(model, traj, upto, include_final_survival).posterior;
}

double marginal_intensity(const ScenarioModel& model, const FilterCheckpoint& at_cut, double s,
                          Mark mark) {
  const double dt = s - at_cut.posterior.at_time;
  if (!(dt >= 0.0)) throw DomainError("intensity time precedes the history cut");
  std::vector<double> totals;
  total_rates_into(model, at_cut.counts, totals);
  const PosteriorState left = filter_interval(at_cut.posterior, totals, dt);
  const auto rates = model.mark_rates(at_cut.counts, mark);
  double total = 0.0;
  for (std::size_t u = 0; u < rates.size(); ++u) total += std::exp(left.log_weights[u]) * rates[u];
  return total;
}

void mix_outcome_rows(const ScenarioModel& model, const FilterCheckpoint& terminal,
                      std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t u = 0; u < model.n_states(); ++u) {
    const double w = std::exp(terminal.posterior.log_weights[u]);
    if (w == 0.0) continue;
    auto row = model.outcome_row(u, terminal.counts);
    for (std::size_t k = 0; k < row.size(); ++k) out[k] += w * row[k];
  }
}

OutcomeDist conditional_law_y(const ScenarioModel& model, const Trajectory& traj) {
  const FilterCheckpoint terminal = filter_checkpoint(model, traj, model.horizon, true);
  OutcomeDist dist{model.y_support, std::vector<double>(model.n_outcomes()), 0.0};
  mix_outcome_rows(model, terminal, dist.probs);
  return dist;
}

double marginal_l_survival(const ScenarioModel& model, const Plan& g,
                           std::span<const double> l_history, Interval window, double abs_tol) {
  if (!(window.lower >= 0.0) || !(window.lower < window.upper) || window.upper > model.horizon) {
    throw DomainError("survival window must satisfy 0 <= lower < upper <= tau");
  }
  std::vector<double> prefix;
  for (double t : l_history) {
    if (t <= window.lower) {
      prefix.push_back(t);
    } else if (t < window.upper) {
      throw DomainError("survival window contains a longitudinal event");
    }
  }
  const Trajectory mu_g = apply_plan(g, prefix, model.horizon);
  const FilterCheckpoint start = filter_checkpoint(model, mu_g, window.lower, true);
  std::vector<double> actions;
  for (const Event& e : mu_g.events()) {
    if (e.mark == Mark::Action && e.time > window.lower && e.time < window.upper) {
      actions.push_back(e.time);
    }
  }
  LongitudinalHazardWalker walker(model, abs_tol / window.length());
  walker.reset(start, actions);
  walker.advance_to(window.upper);
  return std::exp(-walker.cumulative_hazard());
}

// --- LongitudinalHazardWalker ----------------------------------------------

LongitudinalHazardWalker::LongitudinalHazardWalker(const ScenarioModel& model, double tol_per_unit_time)
    : model_(&model), tol_per_unit_(tol_per_unit_time) {
  anchor_log_w_.reserve(model.n_states());
  scratch_.resize(model.n_states());
  totals_.reserve(model.n_states());
}

void LongitudinalHazardWalker::reset(const FilterCheckpoint& start, std::span<const double> actions) {
  actions_.assign(actions.begin(), actions.end());
  next_action_ = 0;
  anchor_log_w_.assign(start.posterior.log_weights.begin(), start.posterior.log_weights.end());
  anchor_time_ = start.posterior.at_time;
  now_ = anchor_time_;
  hazard_ = 0.0;
  counts_ = start.counts;
  if (!actions_.empty() && !(actions_.front() > now_)) {
    throw DomainError("walker actions must lie after the start time");
  }
  load_rates();
}

void LongitudinalHazardWalker::load_rates() {
  total_rates_into(*model_, counts_, totals_);
  l_rates_ = model_->longitudinal_rates(counts_);
  // The posterior only moves if states with positive weight differ in their
  // total rate; otherwise the marginal intensity is constant.
  constant_intensity_ = true;
  double common = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t u = 0; u < totals_.size(); ++u) {
    if (anchor_log_w_[u] == kNegInf) continue;
    if (std::isnan(common)) {
      common = totals_[u];
    } else if (totals_[u] != common) {
      constant_intensity_ = false;
      break;
    }
  }
  // With a common action rate A across supported states, the l-hazard is
  // log Z(t1) - log Z(t2) - A (t2 - t1) for Z(t) = sum_u w_u exp(-R_u t).
  shared_action_rate_ = std::numeric_limits<double>::quiet_NaN();
  cached_log_z_at_ = std::numeric_limits<double>::quiet_NaN();
  if (!constant_intensity_) {
    const auto a_rates = model_->action_rates(counts_);
    for (std::size_t u = 0; u < totals_.size(); ++u) {
      if (anchor_log_w_[u] == kNegInf) continue;
      if (std::isnan(shared_action_rate_)) {
        shared_action_rate_ = a_rates[u];
      } else if (a_rates[u] != shared_action_rate_) {
        shared_action_rate_ = std::numeric_limits<double>::quiet_NaN();
        break;
      }
    }
  }
  if (constant_intensity_) {
    constant_value_ = 0.0;
    for (std::size_t u = 0; u < totals_.size(); ++u) {
      if (anchor_log_w_[u] != kNegInf) constant_value_ += std::exp(anchor_log_w_[u]) * l_rates_[u];
    }
  }
}

double LongitudinalHazardWalker::intensity_after(double dt) const {
  if (constant_intensity_) return constant_value_;
  double top = kNegInf;
  const std::size_t n = totals_.size();
  for (std::size_t u = 0; u < n; ++u) {
    const double v = anchor_log_w_[u] - totals_[u] * dt;
    scratch_[u] = v;
    top = std::max(top, v);
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    const double e = std::exp(scratch_[u] - top);
    num += e * l_rates_[u];
    den += e;
  }
  return num / den;
}

double LongitudinalHazardWalker::log_partition(double dt) const {
  double top = kNegInf;
  const std::size_t n = totals_.size();
  for (std::size_t u = 0; u < n; ++u) {
    scratch_[u] = anchor_log_w_[u] - totals_[u] * dt;
    top = std::max(top, scratch_[u]);
  }
  double sum = 0.0;
  for (std::size_t u = 0; u < n; ++u) sum += std::exp(scratch_[u] - top);
  return top + std::log(sum);
}

void LongitudinalHazardWalker::integrate_to(double x) {
  if (!(x > now_)) return;
  if (constant_intensity_) {
    hazard_ += constant_value_ * (x - now_);
  } else if (!std::isnan(shared_action_rate_)) {
    const double lo = now_ - anchor_time_;
    const double hi = x - anchor_time_;
    const double z_lo = cached_log_z_at_ == lo ? cached_log_z_ : log_partition(lo);
    const double z_hi = log_partition(hi);
    cached_log_z_at_ = hi;
    cached_log_z_ = z_hi;
    hazard_ += std::max(0.0, z_lo - z_hi - shared_action_rate_ * (hi - lo));
  } else {
    const double tol = std::max(tol_per_unit_ * (x - now_), 1e-18);
    hazard_ += adaptive_simpson([this](double dt) { return intensity_after(dt); },
                                now_ - anchor_time_, x - anchor_time_, tol);
  }
  now_ = x;
}

void LongitudinalHazardWalker::apply_action(double at) {
  tilt(anchor_log_w_, totals_, at - anchor_time_);
  if (condition_on_actions_ && !weigh_event(anchor_log_w_, model_->action_rates(counts_))) {
    throw SupportError("planned action at " + std::to_string(at) +
                       " lies outside the support of the observed action process");
  }
  normalize_log(anchor_log_w_);
  anchor_time_ = at;
  ++counts_.actions;
  ++next_action_;
  load_rates();
}

void LongitudinalHazardWalker::advance_to(double x) {
  if (x < now_) throw DomainError("walker queries must be nondecreasing in time");
  while (next_action_ < actions_.size() && actions_[next_action_] < x) {
    const double a = actions_[next_action_];
    integrate_to(a);
    apply_action(a);
  }
  integrate_to(x);
}

bool LongitudinalHazardWalker::action_at_current() const {
  return next_action_ < actions_.size() && actions_[next_action_] == now_;
}

void LongitudinalHazardWalker::absorb_action_at_current() {
  while (action_at_current()) apply_action(now_);
}

void LongitudinalHazardWalker::current_log_weights(std::vector<double>& out) const {
  out.assign(anchor_log_w_.begin(), anchor_log_w_.end());
  if (now_ > anchor_time_) {
    tilt(out, totals_, now_ - anchor_time_);
    normalize_log(out);
  }
}

void LongitudinalHazardWalker::checkpoint_into(FilterCheckpoint& out) const {
  current_log_weights(out.posterior.log_weights);
  out.posterior.at_time = now_;
  out.posterior.left_limit = now_ > anchor_time_;
  out.counts = counts_;
}

double LongitudinalHazardWalker::current_intensity() const {
  return intensity_after(now_ - anchor_time_);
}

}  // namespace gct
