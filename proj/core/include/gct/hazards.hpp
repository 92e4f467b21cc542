#pragma once

#include <optional>
#include <vector>

#include "gct/random.hpp"
#include "gct/trajectory.hpp"

namespace gct {

/// Half-open window (lower, upper].
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  [[nodiscard]] double length() const { return upper - lower; }
};

/// Constant hazard rate on (start, end].
struct HazardSegment {
  double start = 0.0;
  double end = 0.0;
  double rate = 0.0;
};

/// Discrete hazard mass at a single time.
struct HazardAtom {
  double time = 0.0;
  double mass = 0.0;
};

/// Hazard measure with a piecewise-constant density plus finitely many atoms.
///
/// Segments are contiguous and sorted; the measure is defined on
/// (segments.front().start, segments.back().end].
class HazardMeasure {
 public:
  HazardMeasure(std::vector<HazardSegment> segments, std::vector<HazardAtom> atoms = {});

  static HazardMeasure constant(double rate, Interval domain);

  [[nodiscard]] const std::vector<HazardSegment>& segments() const { return segments_; }
  [[nodiscard]] const std::vector<HazardAtom>& atoms() const { return atoms_; }
  [[nodiscard]] Interval domain() const;

 private:
  std::vector<HazardSegment> segments_;
  std::vector<HazardAtom> atoms_;
};

/// Continuous part plus atom masses over the window.
double cumulative_hazard(const HazardMeasure& h, Interval window);

/// Product integral of (1 - dH) over the window.
double product_integral(const HazardMeasure& h, Interval window);

struct TimedMark {
  double time = 0.0;
  Mark mark = Mark::Longitudinal;
};

/// Next event of two competing constant-rate processes started at t.
/// Returns nothing when the combined rate is zero or the draw lands after
/// the deadline. Consumes one uniform for the waiting time and, when an
/// event is returned, one for the mark.
std::optional<TimedMark> sample_next_event(double rate_a, double rate_l, double t,
                                           double deadline, Rng& rng);

}  // namespace gct
