#include "gct/plans.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "gct/errors.hpp"
#include "gct/filter.hpp"
#include "gct/scenario.hpp"

namespace gct {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_increasing(std::span<const double> times, const char* what) {
  double prev = 0.0;
  for (double t : times) {
    if (!std::isfinite(t) || !(t > prev)) {
      throw DomainError(std::string(what) + " must be positive and strictly increasing");
    }
    prev = t;
  }
}

}  // namespace

Plan::Plan(Rule rule) : rule_(std::move(rule)) {
  std::visit(overloaded{
                 [](const NeverTreat&) {},
                 [](const FixedTimes& f) { check_increasing(f.times, "fixed action times"); },
                 [](const PeriodicAfterL& p) {
                   if (!(p.delay > 0.0) || !std::isfinite(p.delay) || !(p.period > 0.0) ||
                       !std::isfinite(p.period)) {
                     throw DomainError("periodic plan needs positive finite delay and period");
                   }
                 },
             },
             rule_);
}

std::string_view Plan::kind_name() const {
  return std::visit(overloaded{
                        [](const NeverTreat&) { return std::string_view("never"); },
                        [](const FixedTimes&) { return std::string_view("fixed"); },
                        [](const PeriodicAfterL&) { return std::string_view("periodic_after_l"); },
                    },
                    rule_);
}

void Plan::segment_actions(std::span<const double> l_history, double after, double until,
                           std::vector<double>& out) const {
  std::visit(overloaded{
                 [](const NeverTreat&) {},
                 [&](const FixedTimes& f) {
                   auto it = std::upper_bound(f.times.begin(), f.times.end(), after);
                   for (; it != f.times.end() && *it <= until; ++it) out.push_back(*it);
                 },
                 [&](const PeriodicAfterL& p) {
                   const double anchor = l_history.empty() ? 0.0 : l_history.back();
                   const double first = anchor + p.delay;
                   double k = first > after ? 0.0 : std::floor((after - first) / p.period);
                   // Step past `after` exactly; the floor above may land one short.
                   while (first + k * p.period <= after) k += 1.0;
                   for (double t = first + k * p.period; t <= until; t = first + (k += 1.0) * p.period) {
                     out.push_back(t);
                   }
                 },
             },
             rule_);
}

std::vector<double> planned_actions(const Plan& g, std::span<const double> l_times, double horizon) {
  check_increasing(l_times, "longitudinal times");
  if (!l_times.empty() && l_times.back() > horizon) {
    throw DomainError("longitudinal time beyond the horizon");
  }
  std::vector<double> actions;
  for (std::size_t j = 0; j <= l_times.size(); ++j) {
    const double start = j == 0 ? 0.0 : l_times[j - 1];
    const double stop = j < l_times.size() ? l_times[j] : horizon;
    const std::size_t before = actions.size();
    g.segment_actions(l_times.first(j), start, stop, actions);
    if (j < l_times.size() && actions.size() > before && actions.back() == stop) {
      throw TieError("planned action coincides with the longitudinal event at " + std::to_string(stop));
    }
  }
  return actions;
}

Trajectory apply_plan(const Plan& g, std::span<const double> l_times, double horizon) {
  const std::vector<double> actions = planned_actions(g, l_times, horizon);
  return merge(l_times, actions, horizon);
}

std::optional<double> next_planned_action(const Plan& g, std::span<const double> l_history,
                                          std::span<const double> a_done, double t, double horizon) {
  if (!(t >= 0.0) || t > horizon) throw DomainError("plan query time outside [0, horizon]");
  if ((!l_history.empty() && l_history.back() > t) || (!a_done.empty() && a_done.back() > t)) {
    throw DomainError("histories must not extend past the query time");
  }
  const std::vector<double> expected =
      t > 0.0 ? planned_actions(g, l_history, t) : std::vector<double>{};
  if (!std::equal(expected.begin(), expected.end(), a_done.begin(), a_done.end())) {
    throw PlanStateError("actions taken so far differ from the plan's prescription");
  }
  std::vector<double> upcoming;
  g.segment_actions(l_history, t, horizon, upcoming);
  if (upcoming.empty()) return std::nullopt;
  return upcoming.front();
}

bool is_consistent(const Trajectory& traj, const Plan& g) {
  const std::vector<double> l_times = traj.times(Mark::Longitudinal);
  std::vector<double> expected;
  try {
    expected = planned_actions(g, l_times, traj.horizon());
  } catch (const TieError&) {
    return false;
  }
  return expected == traj.times(Mark::Action);
}

EvaluabilityReport evaluability_check(const ScenarioModel& model, const Plan& g,
                                      std::span<const double> l_times) {
  const Trajectory mu_g = apply_plan(g, l_times, model.horizon);
  FilterCheckpoint cp{prior_state(model), {}};
  for (const Event& e : mu_g.events()) {
    if (!(marginal_intensity(model, cp, e.time, e.mark) > 0.0)) {
      return {false, e.time, e.mark};
    }
    std::vector<double> totals(model.n_states());
    auto a = model.action_rates(cp.counts);
    auto l = model.longitudinal_rates(cp.counts);
    for (std::size_t u = 0; u < totals.size(); ++u) totals[u] = a[u] + l[u];
    cp.posterior = filter_interval(cp.posterior, totals, e.time - cp.posterior.at_time);
    cp.posterior = filter_event(cp.posterior, model.mark_rates(cp.counts, e.mark));
    if (e.mark == Mark::Action) {
      ++cp.counts.actions;
    } else {
      ++cp.counts.longitudinal;
    }
  }
  return {};
}

nlohmann::json to_json(const Plan& g) {
  return std::visit(overloaded{
                        [](const NeverTreat&) { return nlohmann::json{{"kind", "never"}}; },
                        [](const FixedTimes& f) { return nlohmann::json{{"kind", "fixed"}, {"times", f.times}}; },
                        [](const PeriodicAfterL& p) {
                          return nlohmann::json{{"kind", "periodic_after_l"}, {"delay", p.delay}, {"period", p.period}};
                        },
                    },
                    g.rule());
}

Plan plan_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
      throw ValidationError("plan must be an object with a string \"kind\"");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "never") return Plan::never();
    if (kind == "fixed") return Plan::fixed(j.at("times").get<std::vector<double>>());
    if (kind == "periodic_after_l") {
      return Plan::periodic_after_l(j.at("delay").get<double>(), j.at("period").get<double>());
    }
    throw ValidationError("unknown plan kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed plan: ") + e.what());
  } catch (const DomainError& e) {
    throw ValidationError(std::string("invalid plan: ") + e.what());
  }
}

}  // namespace gct
