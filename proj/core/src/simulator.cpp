#include "gct/simulator.hpp"

#include <string>

#include <nlohmann/json.hpp>

#include "gct/errors.hpp"
#include "gct/hazards.hpp"
#include "gct/parallel.hpp"
#include "gct/random.hpp"

namespace gct {

namespace {

std::size_t draw_categorical(std::span<const double> probs, double uniform) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    cumulative += probs[k];
    last_positive = k;
    if (uniform < cumulative) return k;
  }
  // Rounding left the cumulative sum a hair below one.
  return last_positive;
}

void check_explosion(const ScenarioModel& model, std::size_t n_events) {
  if (n_events >= static_cast<std::size_t>(model.n_max)) {
    throw ExplosionError("more than n_max = " + std::to_string(model.n_max) + " events before tau");
  }
}

}  // namespace

WorldSample simulate_factual(const ScenarioModel& model, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t u = draw_categorical(model.prior(), rng.uniform());
  std::vector<Event> events;
  EventCounts counts;
  double t = 0.0;
  while (true) {
    const auto next = sample_next_event(model.action_rates(counts)[u],
                                        model.longitudinal_rates(counts)[u], t, model.horizon, rng);
    if (!next) break;
    check_explosion(model, events.size());
    events.push_back({next->time, next->mark});
    if (next->mark == Mark::Action) {
      ++counts.actions;
    } else {
      ++counts.longitudinal;
    }
    t = next->time;
  }
  const std::size_t y = draw_categorical(model.outcome_row(u, counts), rng.uniform());
  return {u, Trajectory(std::move(events), model.horizon), y};
}

WorldSample simulate_counterfactual(const ScenarioModel& model, const Plan& g, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t u = draw_categorical(model.prior(), rng.uniform());
  std::vector<double> l_times;
  std::vector<double> a_times;
  std::vector<double> upcoming;
  EventCounts counts;
  double t = 0.0;
  while (t < model.horizon) {
    upcoming.clear();
    g.segment_actions(l_times, t, model.horizon, upcoming);
    const bool has_action = !upcoming.empty();
    const double deadline = has_action ? upcoming.front() : model.horizon;
    const auto next =
        sample_next_event(0.0, model.longitudinal_rates(counts)[u], t, deadline, rng);
    if (next) {
      if (has_action && next->time == deadline) {
        throw TieError("sampled longitudinal event coincides with a planned action");
      }
      check_explosion(model, l_times.size() + a_times.size());
      l_times.push_back(next->time);
      ++counts.longitudinal;
      t = next->time;
    } else if (has_action) {
      check_explosion(model, l_times.size() + a_times.size());
      a_times.push_back(deadline);
      ++counts.actions;
      t = deadline;
    } else {
      break;
    }
  }
  const std::size_t y = draw_categorical(model.outcome_row(u, counts), rng.uniform());
  return {u, merge(l_times, a_times, model.horizon), y};
}

namespace {

template <class Draw>
std::vector<WorldSample> batch(std::size_t n, std::uint64_t seed, unsigned threads, const Draw& draw) {
  std::vector<WorldSample> out(n);
  parallel_for(n, threads, [&](std::size_t i) { out[i] = draw(derive_seed(seed, i)); });
  return out;
}

}  // namespace

std::vector<WorldSample> simulate_factual_batch(const ScenarioModel& model, std::size_t n,
                                                std::uint64_t seed, unsigned threads) {
  return batch(n, seed, threads, [&](std::uint64_t s) { return simulate_factual(model, s); });
}

std::vector<WorldSample> simulate_counterfactual_batch(const ScenarioModel& model, const Plan& g,
                                                       std::size_t n, std::uint64_t seed,
                                                       unsigned threads) {
  return batch(n, seed, threads, [&](std::uint64_t s) { return simulate_counterfactual(model, g, s); });
}

OutcomeDist empirical_outcome_dist(const ScenarioModel& model, std::span<const WorldSample> samples) {
  if (samples.empty()) throw DomainError("empirical distribution of an empty sample");
  std::vector<std::size_t> hits(model.n_outcomes(), 0);
  for (const auto& s : samples) {
    if (s.y >= hits.size()) throw DomainError("sample outcome outside the support");
    ++hits[s.y];
  }
  OutcomeDist dist{model.y_support, std::vector<double>(hits.size()), 0.0};
  const double n = static_cast<double>(samples.size());
  for (std::size_t k = 0; k < hits.size(); ++k) dist.probs[k] = static_cast<double>(hits[k]) / n;
  return dist;
}

nlohmann::json to_json(const ScenarioModel& model, const WorldSample& sample) {
  return {{"u", model.latent.at(sample.u).value},
          {"traj", to_json(sample.traj)},
          {"y", model.y_support.at(sample.y)}};
}

}  // namespace gct
