// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"

using namespace gct;
using gct::testing::scenario_path;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const Plan kPeriodic = Plan::periodic_after_l(0.23371, 0.41173);
const Plan kFixed = Plan::fixed({0.1531, 0.4879, 0.8217});

// Oracle-vs-quadrature gap of the confounded scenario under kPeriodic at the
// default verification parameters, frozen after tuning.
constexpr double kGoldenConfoundingGap = 0.1873;
constexpr double kGoldenDrift = 0.01;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome formula_verification() {
  const ScenarioModel s1 = load_scenario(scenario_path("s1.json"));
  Outcome out{true, ""};
  for (const auto& [name, g] : {std::pair{"S1", kPeriodic}, std::pair{"S1b", kFixed}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const VerifyReport r = verify(s1, g, VerifyParams{});
    const double secs = seconds_since(t0);
    const bool ok = r.error.empty() && r.tv_oracle_quad <= 0.02 && r.tv_oracle_mc <= 0.015 && secs < 120.0;
    out.pass = out.pass && ok;
    out.detail += std::string(name) + ": tv(oracle,quad)=" + fmt(r.tv_oracle_quad) + " tv(oracle,mc)=" +
                  fmt(r.tv_oracle_mc) + " time=" + fmt(secs) + "s" + (r.error.empty() ? "" : " error=" + r.error) + "; ";
  }
  return out;
}

Outcome confounding_control() {
  const ScenarioModel s2 = load_scenario(scenario_path("s2.json"));
  const VerifyReport r = verify(s2, kPeriodic, VerifyParams{});
  const double gap = r.tv_oracle_quad;
  const bool ok = r.error.empty() && !r.nuc_flag && gap >= 0.06 &&
                  std::abs(gap - kGoldenConfoundingGap) <= kGoldenDrift;
  return {ok, "S2: tv(oracle,quad)=" + fmt(gap) + " tv(oracle,mc)=" + fmt(r.tv_oracle_mc) + " golden=" +
                  fmt(kGoldenConfoundingGap) + " floor=0.06"};
}

Outcome no_explosion() {
  const ScenarioModel s1 = load_scenario(scenario_path("s1.json"));
  const MassResult r = no_explosion_mass(s1, kPeriodic, {16, 8, 1e-9, 1});
  const double bound = poisson_tail(s1.max_longitudinal_rate() * s1.horizon, 8);
  const bool ok = r.mass >= 0.999 && r.leftover <= 2e-4 && bound <= 2e-4;
  return {ok, "S1 n_max=8: mass=" + fmt(r.mass) + " leftover=" + fmt(r.leftover) + " poisson_bound=" + fmt(bound)};
}

Outcome b_constancy() {
  const ScenarioModel s1 = load_scenario(scenario_path("s1.json"));
  const std::vector<double> sigmas{0.25, 0.5, 0.75, 1.0};
  const auto curve = b_curve(s1, kPeriodic, sigmas, {200, 4, 1e-9, 1});
  double worst = 0.0;
  for (const auto& d : curve) worst = std::max(worst, tv_distance(d, curve.back()));

  const ScenarioModel s2 = load_scenario(scenario_path("s2.json"));
  const auto confounded = b_curve(s2, kPeriodic, sigmas, {60, 4, 1e-9, 1});
  double s2_spread = 0.0;
  for (const auto& d : confounded) s2_spread = std::max(s2_spread, tv_distance(d, confounded.back()));
  return {worst <= 0.02, "S1 max tv(b(sigma),b(tau))=" + fmt(worst) + " (S2, not gated: " + fmt(s2_spread) + ")"};
}

Outcome filter_equivalence() {
  Rng rng(20240601);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const ScenarioModel m = gct::testing::random_model(rng);
    const Trajectory traj = gct::testing::random_trajectory(rng, m.horizon, 6);
    const auto got = run_filter(m, traj, m.horizon, true).weights();
    const auto want = gct::testing::brute_force_posterior(m, traj.events(), m.horizon, true);
    for (std::size_t u = 0; u < got.size(); ++u) worst = std::max(worst, std::abs(got[u] - want[u]));
  }
  return {worst <= 1e-12, "100 scenarios, max |diff|=" + fmt(worst)};
}

Outcome product_integrals() {
  Rng rng(77);
  double worst_closed = 0.0;
  double worst_mult = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const double rate = 4.0 * rng.uniform();
    const double t = 3.0 * rng.uniform();
    const HazardMeasure flat = HazardMeasure::constant(rate, {0.0, 3.0});
    worst_closed = std::max(worst_closed, std::abs(product_integral(flat, {0.0, t}) - std::exp(-rate * t)));

    std::vector<HazardSegment> segs;
    double edge = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double len = 0.2 + rng.uniform();
      segs.push_back({edge, edge + len, 3.0 * rng.uniform()});
      edge += len;
    }
    const HazardMeasure h(segs, {{edge * (0.1 + 0.8 * rng.uniform()), 0.5 * rng.uniform()}});
    double a = edge * rng.uniform();
    double c = edge * rng.uniform();
    if (a > c) std::swap(a, c);
    const double b = a + (c - a) * rng.uniform();
    worst_mult = std::max(worst_mult, std::abs(product_integral(h, {a, c}) -
                                               product_integral(h, {a, b}) * product_integral(h, {b, c})));
  }

  // DKW band for sampled waiting times at 1e5 draws, failure probability 1e-6.
  const int n = 100000;
  const double eps = std::sqrt(std::log(2.0 / 1e-6) / (2.0 * n));
  Rng draws(78);
  std::vector<double> times;
  times.reserve(n);
  for (int i = 0; i < n; ++i) times.push_back(sample_next_event(0.9, 1.4, 0.0, INFINITY, draws)->time);
  std::sort(times.begin(), times.end());
  const HazardMeasure h = HazardMeasure::constant(2.3, {0.0, times.back()});
  double dkw = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = product_integral(h, {0.0, times[static_cast<std::size_t>(i)]});
    dkw = std::max({dkw, std::abs(s - (1.0 - static_cast<double>(i) / n)),
                    std::abs(s - (1.0 - static_cast<double>(i + 1) / n))});
  }
  const bool ok = worst_closed <= 1e-12 && worst_mult <= 1e-12 && dkw < eps;
  return {ok, "closed-form err=" + fmt(worst_closed) + " multiplicativity err=" + fmt(worst_mult) +
                  " DKW sup=" + fmt(dkw) + " band=" + fmt(eps)};
}

Outcome plan_adaptivity() {
  Rng rng(4242);
  int checked = 0;
  int violations = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    const double pick = rng.uniform();
    Plan g;
    if (pick < 0.2) {
      g = Plan::never();
    } else if (pick < 0.5) {
      std::vector<double> times{0.05 + 0.3 * rng.uniform(), 0.4 + 0.3 * rng.uniform(), 0.75 + 0.4 * rng.uniform()};
      g = Plan::fixed(times);
    } else {
      g = Plan::periodic_after_l(0.01 + 0.4 * rng.uniform(), 0.01 + 0.4 * rng.uniform());
    }
    std::vector<double> l;
    const int n_l = static_cast<int>(rng.uniform() * 5);
    for (int i = 0; i < n_l; ++i) l.push_back(1.0 - rng.uniform());
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    const double t = rng.uniform();
    try {
      const Trajectory full = apply_plan(g, l, 1.0);
      std::vector<double> prefix;
      std::copy_if(l.begin(), l.end(), std::back_inserter(prefix), [&](double x) { return x <= t; });
      const auto a = restrict(full, t);
      const Trajectory from_prefix = apply_plan(g, prefix, 1.0);
      const auto b = restrict(from_prefix, t);
      const bool same = a.events.size() == b.events.size() && std::equal(a.events.begin(), a.events.end(), b.events.begin());
      if (!same || !is_consistent(full, g)) ++violations;
      ++checked;
    } catch (const TieError&) {
    }
  }
  return {violations == 0 && checked >= 9900,
          std::to_string(checked) + " triples, " + std::to_string(violations) + " violations"};
}

Outcome degenerate_equality() {
  const ScenarioModel deg = load_scenario(scenario_path("degenerate.json"));
  std::ostringstream detail;
  bool ok = true;
  for (const auto& [name, g] : {std::pair{"never", Plan::never()}, std::pair{"fixed", kFixed},
                                std::pair{"periodic", kPeriodic}}) {
    const VerifyReport r = verify(deg, g, VerifyParams{});
    const bool same = r.error.empty() && r.oracle_dist.probs == r.mc_dist.probs &&
                      r.mc_dist.probs == r.quad.dist.probs && r.quad.leftover_mass == 0.0;
    ok = ok && same;
    detail << name << ":" << (same ? "exact" : "differs") << " ";
  }

  ScenarioModel flat = gct::testing::make_model({0.2, 0.5, 0.3}, 1.0, 1.0);
  gct::testing::fill(flat, flat.rate_a, [](std::size_t, int ca, int cl) { return 0.5 + ca + 0.3 * cl; });
  gct::testing::fill(flat, flat.rate_l, [](std::size_t, int ca, int cl) { return 1.5 - 0.2 * ca + 0.1 * cl; });
  Rng rng(55);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Trajectory traj = gct::testing::random_trajectory(rng, 1.0, 8);
    const double t = rng.uniform();
    const auto w = run_filter(flat, traj, t, rng.uniform() < 0.5).weights();
    for (std::size_t u = 0; u < w.size(); ++u) worst = std::max(worst, std::abs(w[u] - flat.prior()[u]));
  }
  ok = ok && worst <= 1e-14;
  detail << "u-independent filter max |w - prior|=" << fmt(worst);
  return {ok, detail.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 formula verification", formula_verification},
      {"AC2 confounding positive control", confounding_control},
      {"AC3 no-explosion mass", no_explosion},
      {"AC4 b(sigma) constancy", b_constancy},
      {"AC5 filter oracle equivalence", filter_equivalence},
      {"AC6 product-integral identities", product_integrals},
      {"AC7 plan adaptivity", plan_adaptivity},
      {"AC8 degenerate equality", degenerate_equality},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s [%s] (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
