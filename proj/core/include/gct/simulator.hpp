#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gct/outcome.hpp"
#include "gct/plans.hpp"
#include "gct/scenario.hpp"
#include "gct/trajectory.hpp"

namespace gct {

/// One joint draw of the latent state, the event trajectory and the outcome.
struct WorldSample {
  std::size_t u = 0;  // index into ScenarioModel::latent
  Trajectory traj{1.0};
  std::size_t y = 0;  // index into ScenarioModel::y_support
};

/// Observational world: both marks compete at the tabulated rates.
/// Throws ExplosionError if more than n_max events occur.
WorldSample simulate_factual(const ScenarioModel& model, std::uint64_t seed);

/// Interventional world: actions happen exactly when g prescribes them and
/// longitudinal events follow rate_l(u, counts). The brute-force oracle for
/// Law(Y^g).
WorldSample simulate_counterfactual(const ScenarioModel& model, const Plan& g, std::uint64_t seed);

/// Sample i uses derive_seed(seed, i); results do not depend on `threads`.
std::vector<WorldSample> simulate_factual_batch(const ScenarioModel& model, std::size_t n,
                                                std::uint64_t seed, unsigned threads = 1);
std::vector<WorldSample> simulate_counterfactual_batch(const ScenarioModel& model, const Plan& g,
                                                       std::size_t n, std::uint64_t seed,
                                                       unsigned threads = 1);

/// Normalized outcome frequencies. Throws DomainError on empty input.
OutcomeDist empirical_outcome_dist(const ScenarioModel& model, std::span<const WorldSample> samples);

nlohmann::json to_json(const ScenarioModel& model, const WorldSample& sample);

}  // namespace gct
