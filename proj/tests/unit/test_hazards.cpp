#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fixtures.hpp"

using namespace gct;
using doctest::Approx;

TEST_CASE("cumulative hazard of simple measures") {
  CHECK(cumulative_hazard(HazardMeasure::constant(1.0, {0.0, 2.0}), {0.0, 2.0}) == Approx(2.0).epsilon(1e-15));
  const HazardMeasure step({{0.0, 1.0, 1.0}, {1.0, 2.0, 2.0}});
  CHECK(cumulative_hazard(step, {0.0, 2.0}) == Approx(3.0).epsilon(1e-15));
  const HazardMeasure atom({{0.0, 2.0, 0.0}}, {{1.0, 0.5}});
  CHECK(cumulative_hazard(atom, {0.0, 2.0}) == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("product integral of simple measures") {
  CHECK(product_integral(HazardMeasure::constant(1.0, {0.0, 2.0}), {0.0, 2.0}) ==
        Approx(0.1353352832366127).epsilon(1e-14));
  const HazardMeasure step({{0.0, 1.0, 1.0}, {1.0, 2.0, 2.0}});
  CHECK(std::abs(product_integral(step, {0.0, 2.0}) - std::exp(-3.0)) < 1e-15);
  const HazardMeasure atom({{0.0, 2.0, 0.0}}, {{1.0, 0.5}});
  CHECK(product_integral(atom, {0.0, 2.0}) == 0.5);
  // Atoms at the left end of the window are excluded, at the right end included.
  CHECK(product_integral(atom, {1.0, 2.0}) == 1.0);
  CHECK(product_integral(atom, {0.0, 1.0}) == 0.5);
}

TEST_CASE("hazard measure validation") {
  CHECK_THROWS_AS(HazardMeasure({{0.0, 1.0, -1.0}}), DomainError);
  CHECK_THROWS_AS(HazardMeasure({{0.0, 1.0, 1.0}, {1.5, 2.0, 1.0}}), DomainError);
  CHECK_THROWS_AS(HazardMeasure({{1.0, 1.0, 1.0}}), DomainError);
  CHECK_THROWS_AS(HazardMeasure({{0.0, 1.0, 1.0}}, {{0.5, 1.5}}), DomainError);
  CHECK_THROWS_AS(HazardMeasure({{0.0, 1.0, 1.0}}, {{0.5, 0.1}, {0.5, 0.2}}), DomainError);
  CHECK_THROWS_AS(HazardMeasure({{0.0, 1.0, 1.0}}, {{3.0, 0.1}}), DomainError);
  CHECK_THROWS_AS((void)cumulative_hazard(HazardMeasure::constant(1.0, {0.0, 1.0}), {0.0, 2.0}), DomainError);
}

TEST_CASE("property: closed forms and interval multiplicativity") {
  Rng rng(99);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<HazardSegment> segs;
    double t = 0.0;
    const int n = 1 + static_cast<int>(rng.uniform() * 5);
    for (int i = 0; i < n; ++i) {
      const double len = 0.1 + rng.uniform();
      segs.push_back({t, t + len, 3.0 * rng.uniform()});
      t += len;
    }
    std::vector<HazardAtom> atoms;
    if (rng.uniform() < 0.5) atoms.push_back({t * (0.05 + 0.9 * rng.uniform()), 0.9 * rng.uniform()});
    const HazardMeasure h(segs, atoms);
    double a = t * rng.uniform();
    double c = t * rng.uniform();
    if (a > c) std::swap(a, c);
    const double b = a + (c - a) * rng.uniform();

    CHECK(std::abs(product_integral(h, {a, c}) -
                   product_integral(h, {a, b}) * product_integral(h, {b, c})) < 1e-12);
    CHECK(std::abs(cumulative_hazard(h, {a, c}) -
                   cumulative_hazard(h, {a, b}) - cumulative_hazard(h, {b, c})) < 1e-12);

    const double rate = 3.0 * rng.uniform();
    const HazardMeasure flat = HazardMeasure::constant(rate, {0.0, t});
    CHECK(std::abs(product_integral(flat, {a, c}) - std::exp(-rate * (c - a))) < 1e-12);
  }
}

TEST_CASE("sample_next_event edge cases") {
  Rng rng(1);
  CHECK_FALSE(sample_next_event(0.0, 0.0, 0.0, 1e9, rng).has_value());
  for (int i = 0; i < 1000; ++i) {
    const auto ev = sample_next_event(1.0, 0.0, 0.0, 1e9, rng);
    REQUIRE(ev.has_value());
    CHECK(ev->mark == Mark::Action);
  }
  for (int i = 0; i < 1000; ++i) {
    const auto ev = sample_next_event(2.0, 3.0, 0.4, 0.5, rng);
    if (ev) CHECK((ev->time > 0.4 && ev->time <= 0.5));
  }
}

TEST_CASE("exponential waiting time has mean 1/(rate_a + rate_l)") {
  Rng rng(7);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_next_event(1.0, 1.0, 0.0, INFINITY, rng)->time;
  CHECK(std::abs(sum / n - 0.5) < 0.002);
}

TEST_CASE("sampled survival curve lies in the DKW band") {
  // P(sup |F_n - F| > eps) <= 2 exp(-2 n eps^2); eps chosen for 1e-6.
  const int n = 100000;
  const double eps = std::sqrt(std::log(2.0 / 1e-6) / (2.0 * n));
  Rng rng(11);
  const double ra = 0.7;
  const double rl = 1.6;
  std::vector<double> times;
  times.reserve(n);
  for (int i = 0; i < n; ++i) times.push_back(sample_next_event(ra, rl, 0.0, INFINITY, rng)->time);
  std::sort(times.begin(), times.end());
  const HazardMeasure h = HazardMeasure::constant(ra + rl, {0.0, times.back()});
  double worst = 0.0;
  for (int i = 0; i < n; i += 97) {
    const double s_true = product_integral(h, {0.0, times[static_cast<std::size_t>(i)]});
    const double s_emp_hi = 1.0 - static_cast<double>(i) / n;
    const double s_emp_lo = 1.0 - static_cast<double>(i + 1) / n;
    worst = std::max({worst, std::abs(s_true - s_emp_hi), std::abs(s_true - s_emp_lo)});
  }
  CHECK(worst < eps);
}
