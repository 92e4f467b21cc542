#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gct/trajectory.hpp"

namespace gct {

struct LatentState {
  double value = 0.0;
  double prob = 0.0;
};

/// Verification tolerances carried with a scenario so golden thresholds are
/// versioned as data.
struct Tolerances {
  double oracle_quad = 0.02;
  double oracle_mc = 0.015;
  double mc_quad = 0.01;
  /// Minimum oracle-vs-formula distance expected when actions are confounded.
  double confounding_floor = 0.06;
};

/// Per-state rate table indexed by (u, capped action count, capped
/// longitudinal count). Rates for all states at fixed counts are contiguous.
class RateTable {
 public:
  RateTable() = default;
  RateTable(std::size_t n_states, int cap_a, int cap_l, double fill = 0.0);

  [[nodiscard]] double at(std::size_t u, int ca, int cl) const { return data_[index(u, ca, cl)]; }
  double& at(std::size_t u, int ca, int cl) { return data_[index(u, ca, cl)]; }

  /// Rates of every latent state at the given (already capped) counts.
  [[nodiscard]] std::span<const double> column(int ca, int cl) const {
    return {data_.data() + index(0, ca, cl), n_states_};
  }

  [[nodiscard]] std::size_t n_states() const { return n_states_; }
  [[nodiscard]] std::span<const double> values() const { return data_; }

 private:
  [[nodiscard]] std::size_t index(std::size_t u, int ca, int cl) const {
    return (static_cast<std::size_t>(ca) * static_cast<std::size_t>(cap_l_ + 1) +
            static_cast<std::size_t>(cl)) * n_states_ + u;
  }

  std::size_t n_states_ = 0;
  int cap_a_ = 0;
  int cap_l_ = 0;
  std::vector<double> data_;
};

/// Complete structural description of a scenario: a finite latent
/// confounder u, constant-between-events intensities for both marks that
/// depend on u and the capped event counts, and the law of the outcome given
/// u and the capped final counts.
class ScenarioModel {
 public:
  ScenarioModel() = default;
  /// Zero rate tables and zero outcome table of the right shape.
  ScenarioModel(double horizon, std::vector<LatentState> latent, int cap_a, int cap_l,
                std::vector<double> y_support);

  std::string id;
  double horizon = 1.0;
  std::vector<LatentState> latent;
  int cap_a = 0;
  int cap_l = 0;
  RateTable rate_a;
  RateTable rate_l;
  std::vector<double> y_support;
  int n_max = 1000;
  Tolerances tolerances;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  [[nodiscard]] std::size_t n_states() const { return latent.size(); }
  [[nodiscard]] std::size_t n_outcomes() const { return y_support.size(); }
  [[nodiscard]] int capped_a(int n) const { return n < cap_a ? n : cap_a; }
  [[nodiscard]] int capped_l(int n) const { return n < cap_l ? n : cap_l; }

  [[nodiscard]] std::span<const double> action_rates(EventCounts c) const {
    return rate_a.column(capped_a(c.actions), capped_l(c.longitudinal));
  }
  [[nodiscard]] std::span<const double> longitudinal_rates(EventCounts c) const {
    return rate_l.column(capped_a(c.actions), capped_l(c.longitudinal));
  }
  [[nodiscard]] std::span<const double> mark_rates(EventCounts c, Mark mark) const {
    return mark == Mark::Action ? action_rates(c) : longitudinal_rates(c);
  }

  /// Law of Y given u and the (uncapped) final counts.
  [[nodiscard]] std::span<const double> outcome_row(std::size_t u, EventCounts c) const;
  void set_outcome_row(std::size_t u, int ca, int cl, std::span<const double> probs);

  [[nodiscard]] std::vector<double> prior() const;

  /// Whether the action intensity ignores u, i.e. the no-unmeasured-
  /// confounders condition holds by construction.
  [[nodiscard]] bool no_unmeasured_confounding() const;
  [[nodiscard]] double max_longitudinal_rate() const;
  [[nodiscard]] std::size_t index_of_outcome(double y) const;

 private:
  [[nodiscard]] std::size_t outcome_offset(std::size_t u, int ca, int cl) const;

  std::vector<double> y_table_;
};

nlohmann::json to_json(const ScenarioModel& model);
/// Parses and validates.
ScenarioModel scenario_from_json(const nlohmann::json& j);
ScenarioModel load_scenario(const std::filesystem::path& path);

}  // namespace gct
