#include "gct/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "gct/errors.hpp"

namespace gct {

std::string_view to_string(Mark mark) {
  return mark == Mark::Action ? "a" : "l";
}

Mark mark_from_string(std::string_view text) {
  if (text == "a") return Mark::Action;
  if (text == "l") return Mark::Longitudinal;
  throw ValidationError("unknown mark '" + std::string(text) + "'");
}

Trajectory::Trajectory(double horizon) : horizon_(horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("trajectory horizon must be positive and finite");
  }
}

Trajectory::Trajectory(std::vector<Event> events, double horizon)
    : events_(std::move(events)), horizon_(horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("trajectory horizon must be positive and finite");
  }
  double prev = 0.0;
  for (const Event& e : events_) {
    if (!(e.time > 0.0) || e.time > horizon_) {
      throw DomainError("event time " + std::to_string(e.time) + " outside (0, horizon]");
    }
    if (e.time == prev) throw TieError("two events at time " + std::to_string(e.time));
    if (e.time < prev) throw DomainError("event times must be increasing");
    prev = e.time;
  }
}

std::vector<double> Trajectory::times(Mark mark) const {
  std::vector<double> out;
  for (const Event& e : events_) {
    if (e.mark == mark) out.push_back(e.time);
  }
  return out;
}

namespace {

EventCounts count_marks(std::span<const Event> events) {
  EventCounts c;
  for (const Event& e : events) {
    if (e.mark == Mark::Action) {
      ++c.actions;
    } else {
      ++c.longitudinal;
    }
  }
  return c;
}

}  // namespace

EventCounts Trajectory::counts() const { return count_marks(events_); }

EventCounts History::counts() const { return count_marks(events); }

History restrict(const Trajectory& traj, double t) {
  if (!(t >= 0.0) || t > traj.horizon()) {
    throw DomainError("restriction time outside [0, horizon]");
  }
  auto events = traj.events();
  auto end = std::upper_bound(events.begin(), events.end(), t,
                              [](double v, const Event& e) { return v < e.time; });
  return History{events.first(static_cast<std::size_t>(end - events.begin())), t};
}

Trajectory merge(std::span<const double> l_times, std::span<const double> a_times,
                 double horizon) {
  std::vector<Event> events;
  events.reserve(l_times.size() + a_times.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < l_times.size() || j < a_times.size()) {
    if (j == a_times.size() || (i < l_times.size() && l_times[i] < a_times[j])) {
      events.push_back({l_times[i++], Mark::Longitudinal});
    } else if (i == l_times.size() || a_times[j] < l_times[i]) {
      events.push_back({a_times[j++], Mark::Action});
    } else {
      throw TieError("longitudinal and action events coincide at " + std::to_string(l_times[i]));
    }
  }
  // Strict ordering within each list is checked by the constructor.
  return Trajectory(std::move(events), horizon);
}

EventCounts counts_before(const Trajectory& traj, double s) {
  if (!(s >= 0.0) || s > traj.horizon()) {
    throw DomainError("count time outside [0, horizon]");
  }
  auto events = traj.events();
  auto end = std::lower_bound(events.begin(), events.end(), s,
                              [](const Event& e, double v) { return e.time < v; });
  return count_marks(events.first(static_cast<std::size_t>(end - events.begin())));
}

nlohmann::json to_json(const Trajectory& traj) {
  auto arr = nlohmann::json::array();
  for (const Event& e : traj.events()) {
    arr.push_back({{"t", e.time}, {"mark", to_string(e.mark)}});
  }
  return arr;
}

Trajectory trajectory_from_json(const nlohmann::json& j, double horizon) {
  if (!j.is_array()) throw ValidationError("trajectory must be a JSON array");
  std::vector<Event> events;
  events.reserve(j.size());
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("t") || !item.contains("mark") ||
        !item["t"].is_number() || !item["mark"].is_string()) {
      throw ValidationError("trajectory entries must be {\"t\": number, \"mark\": \"a\"|\"l\"}");
    }
    events.push_back({item["t"].get<double>(), mark_from_string(item["mark"].get<std::string>())});
  }
  return Trajectory(std::move(events), horizon);
}

}  // namespace gct
