#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace gct {

/// Event type. The enumerator order fixes the serialization order.
enum class Mark : unsigned char { Action = 0, Longitudinal = 1 };

std::string_view to_string(Mark mark);
Mark mark_from_string(std::string_view text);

struct Event {
  double time = 0.0;
  Mark mark = Mark::Longitudinal;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Number of events of each mark seen so far.
struct EventCounts {
  int actions = 0;
  int longitudinal = 0;

  friend bool operator==(const EventCounts&, const EventCounts&) = default;
};

/// A realization of the marked point process on (0, horizon].
///
/// Event times are strictly increasing and lie in (0, horizon]. Two events
/// never share a time, whatever their marks.
class Trajectory {
 public:
  explicit Trajectory(double horizon);
  Trajectory(std::vector<Event> events, double horizon);

  [[nodiscard]] std::span<const Event> events() const { return events_; }
  [[nodiscard]] double horizon() const { return horizon_; }
  [[nodiscard]] std::size_t size() const { return events_.size(); }
  [[nodiscard]] bool empty() const { return events_.empty(); }

  [[nodiscard]] std::vector<double> times(Mark mark) const;
  [[nodiscard]] EventCounts counts() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::vector<Event> events_;
  double horizon_;
};

/// The restriction of a trajectory to (0, cut]. A view: the trajectory must
/// outlive it.
struct History {
  std::span<const Event> events;
  double cut = 0.0;

  [[nodiscard]] EventCounts counts() const;
};

History restrict(const Trajectory& traj, double t);
History restrict(Trajectory&&, double) = delete;

/// Interleaves longitudinal and action times into one trajectory.
/// Throws TieError if any longitudinal time equals an action time.
Trajectory merge(std::span<const double> l_times, std::span<const double> a_times,
                 double horizon);

/// Counts of each mark with time strictly less than s.
EventCounts counts_before(const Trajectory& traj, double s);

nlohmann::json to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j, double horizon);

}  // namespace gct
