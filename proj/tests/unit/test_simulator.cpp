#include <doctest.h>

#include <map>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"

using namespace gct;
using gct::testing::make_model;

namespace {

ScenarioModel outcome_by_counts(std::vector<double> prior, double rate_a, double rate_l) {
  ScenarioModel m = make_model(std::move(prior), rate_a, rate_l, 2, 2, 3);
  gct::testing::fill_rows(m, [](std::size_t u, int ca, int cl) {
    const double s = 0.1 + 0.3 * static_cast<double>(u) + 0.1 * ca + 0.05 * cl;
    return std::vector<double>{s, 0.5 - 0.5 * s, 0.5 - 0.5 * s};
  });
  return m;
}

std::map<std::pair<int, int>, double> count_law(const std::vector<WorldSample>& xs) {
  std::map<std::pair<int, int>, double> law;
  for (const auto& s : xs) {
    const auto c = s.traj.counts();
    law[{c.actions, c.longitudinal}] += 1.0 / static_cast<double>(xs.size());
  }
  return law;
}

double tv_maps(const std::map<std::pair<int, int>, double>& p, const std::map<std::pair<int, int>, double>& q) {
  std::map<std::pair<int, int>, double> diff = p;
  for (const auto& [k, v] : q) diff[k] -= v;
  double s = 0.0;
  for (const auto& [k, v] : diff) s += std::abs(v);
  return 0.5 * s;
}

}  // namespace

TEST_CASE("zero rates give empty trajectories and y from the (0, 0) row") {
  ScenarioModel m = outcome_by_counts({0.5, 0.5}, 0.0, 0.0);
  std::vector<double> freq(3);
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const WorldSample s = simulate_factual(m, static_cast<std::uint64_t>(i));
    CHECK(s.traj.empty());
    freq[s.y] += 1.0 / n;
  }
  const double expected0 = 0.5 * 0.1 + 0.5 * 0.4;
  CHECK(std::abs(freq[0] - expected0) < 0.015);
}

TEST_CASE("longitudinal counts are Poisson(2) when rate_l = 2") {
  const ScenarioModel m = make_model({1.0}, 0.0, 2.0);
  const auto xs = simulate_factual_batch(m, 100000, 3);
  double mean = 0.0;
  for (const auto& s : xs) mean += s.traj.counts().longitudinal;
  CHECK(std::abs(mean / 1e5 - 2.0) < 0.03);
}

TEST_CASE("competing marks with equal rates") {
  const ScenarioModel m = make_model({1.0}, 1.0, 1.0);
  const auto xs = simulate_factual_batch(m, 100000, 4);
  double first_a = 0.0;
  double any = 0.0;
  for (const auto& s : xs) {
    if (s.traj.empty()) continue;
    any += 1.0;
    first_a += s.traj.events()[0].mark == Mark::Action ? 1.0 : 0.0;
  }
  CHECK(std::abs(first_a / any - 0.5) < 0.01);
}

TEST_CASE("explosion guard") {
  ScenarioModel m = make_model({1.0}, 50.0, 50.0);
  m.n_max = 5;
  CHECK_THROWS_AS((void)simulate_factual(m, 1), ExplosionError);
  CHECK_THROWS_AS((void)simulate_counterfactual(m, Plan::never(), 1), ExplosionError);
}

TEST_CASE("counterfactual samples follow the plan") {
  const ScenarioModel quiet = outcome_by_counts({1.0}, 1.0, 0.0);
  CHECK(simulate_counterfactual(quiet, Plan::never(), 9).traj.empty());
  const WorldSample s = simulate_counterfactual(quiet, Plan::fixed({0.5}), 9);
  CHECK(s.traj == Trajectory({{0.5, Mark::Action}}, 1.0));

  const ScenarioModel busy = outcome_by_counts({0.3, 0.7}, 1.0, 2.5);
  const Plan g = Plan::periodic_after_l(0.23371, 0.41173);
  const auto xs = simulate_counterfactual_batch(busy, g, 10000, 10);
  for (const auto& x : xs) REQUIRE(is_consistent(x.traj, g));
}

TEST_CASE("counterfactual outcome law with no longitudinal events is the mixed row") {
  const ScenarioModel m = outcome_by_counts({0.3, 0.7}, 1.0, 0.0);
  const auto xs = simulate_counterfactual_batch(m, Plan::fixed({0.5}), 100000, 12);
  const OutcomeDist d = empirical_outcome_dist(m, xs);
  for (std::size_t y = 0; y < 3; ++y) {
    const double expected = 0.3 * m.outcome_row(0, {1, 0})[y] + 0.7 * m.outcome_row(1, {1, 0})[y];
    CHECK(std::abs(d.probs[y] - expected) < 0.005);
  }
}

TEST_CASE("empirical_outcome_dist") {
  const ScenarioModel m = make_model({1.0}, 0.0, 0.0, 0, 0, 2);
  std::vector<WorldSample> xs(4);
  xs[2].y = 1;
  xs[3].y = 1;
  CHECK(empirical_outcome_dist(m, xs).probs == std::vector<double>{0.5, 0.5});
  std::vector<WorldSample> one(1);
  one[0].y = 1;
  CHECK(empirical_outcome_dist(m, one).probs == std::vector<double>{0.0, 1.0});
  CHECK_THROWS_AS((void)empirical_outcome_dist(m, std::vector<WorldSample>{}), DomainError);
}

TEST_CASE("reproducibility across calls and thread counts") {
  const ScenarioModel m = load_scenario(gct::testing::scenario_path("s1.json"));
  const Plan g = Plan::periodic_after_l(0.23371, 0.41173);
  const WorldSample a = simulate_counterfactual(m, g, 77);
  const WorldSample b = simulate_counterfactual(m, g, 77);
  CHECK(a.traj == b.traj);
  CHECK(a.u == b.u);
  CHECK(a.y == b.y);
  const auto one = simulate_factual_batch(m, 500, 5, 1);
  const auto four = simulate_factual_batch(m, 500, 5, 4);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].traj == four[i].traj);
    CHECK(one[i].y == four[i].y);
    CHECK(simulate_factual(m, derive_seed(5, i)).traj == one[i].traj);
  }
}

TEST_CASE("without actions the factual and counterfactual worlds coincide in law") {
  const ScenarioModel m = outcome_by_counts({0.4, 0.6}, 0.0, 1.3);
  const auto f = simulate_factual_batch(m, 100000, 21);
  const auto c = simulate_counterfactual_batch(m, Plan::never(), 100000, 22);
  CHECK(gct::testing::tv(empirical_outcome_dist(m, f).probs, empirical_outcome_dist(m, c).probs) <= 0.01);
  CHECK(tv_maps(count_law(f), count_law(c)) <= 0.01);
}

TEST_CASE("sample json") {
  const ScenarioModel m = load_scenario(gct::testing::scenario_path("s1.json"));
  const WorldSample s = simulate_factual(m, 3);
  const auto j = to_json(m, s);
  CHECK(j.contains("u"));
  CHECK(j.contains("y"));
  CHECK(j["traj"].size() == s.traj.size());
}
