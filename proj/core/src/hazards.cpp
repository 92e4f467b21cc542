#include "gct/hazards.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gct/errors.hpp"

namespace gct {

HazardMeasure::HazardMeasure(std::vector<HazardSegment> segments, std::vector<HazardAtom> atoms)
    : segments_(std::move(segments)), atoms_(std::move(atoms)) {
  if (segments_.empty()) throw DomainError("hazard measure needs at least one segment");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!(s.start < s.end)) throw DomainError("hazard segment must have start < end");
    if (!(s.rate >= 0.0) || !std::isfinite(s.rate)) {
      throw DomainError("hazard rate must be finite and nonnegative");
    }
    if (i > 0 && segments_[i - 1].end != s.start) {
      throw DomainError("hazard segments must be contiguous");
    }
  }
  std::sort(atoms_.begin(), atoms_.end(),
            [](const HazardAtom& a, const HazardAtom& b) { return a.time < b.time; });
  const Interval dom = domain();
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& a = atoms_[i];
    if (!(a.mass >= 0.0 && a.mass <= 1.0)) throw DomainError("atom mass must lie in [0, 1]");
    if (a.time < dom.lower || a.time > dom.upper) {
      throw DomainError("atom at " + std::to_string(a.time) + " outside hazard domain");
    }
    if (i > 0 && atoms_[i - 1].time == a.time) throw DomainError("atom times must be distinct");
  }
}

HazardMeasure HazardMeasure::constant(double rate, Interval domain) {
  return HazardMeasure({{domain.lower, domain.upper, rate}});
}

Interval HazardMeasure::domain() const {
  return {segments_.front().start, segments_.back().end};
}

namespace {

void check_window(const HazardMeasure& h, Interval w) {
  const Interval dom = h.domain();
  if (!(w.lower < w.upper)) throw DomainError("hazard window must satisfy lower < upper");
  if (w.lower < dom.lower || w.upper > dom.upper) {
    throw DomainError("hazard window outside the measure's domain");
  }
}

double continuous_part(const HazardMeasure& h, Interval w) {
  double total = 0.0;
  for (const auto& s : h.segments()) {
    const double lo = std::max(s.start, w.lower);
    const double hi = std::min(s.end, w.upper);
    if (hi > lo) total += s.rate * (hi - lo);
  }
  return total;
}

}  // namespace

double cumulative_hazard(const HazardMeasure& h, Interval window) {
  check_window(h, window);
  double total = continuous_part(h, window);
  for (const auto& a : h.atoms()) {
    if (a.time > window.lower && a.time <= window.upper) total += a.mass;
  }
  return total;
}

double product_integral(const HazardMeasure& h, Interval window) {
  check_window(h, window);
  double survival = std::exp(-continuous_part(h, window));
  for (const auto& a : h.atoms()) {
    if (a.time > window.lower && a.time <= window.upper) survival *= 1.0 - a.mass;
  }
  return survival;
}

std::optional<TimedMark> sample_next_event(double rate_a, double rate_l, double t,
                                           double deadline, Rng& rng) {
  if (!(rate_a >= 0.0) || !(rate_l >= 0.0)) throw DomainError("event rates must be nonnegative");
  if (!(t < deadline)) throw DomainError("sample_next_event needs t < deadline");
  const double total = rate_a + rate_l;
  if (total == 0.0) return std::nullopt;
  const double when = t + rng.exponential(total);
  if (when > deadline) return std::nullopt;
  const Mark mark = rng.uniform() * total < rate_a ? Mark::Action : Mark::Longitudinal;
  return TimedMark{when, mark};
}

}  // namespace gct
