#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gct/outcome.hpp"
#include "gct/plans.hpp"
#include "gct/scenario.hpp"

namespace gct {

/// Output of the deterministic evaluator. `dist` is sub-normalized; the
/// missing mass (events beyond n_max plus any grid loss) is `leftover_mass`.
struct QuadratureResult {
  OutcomeDist dist;
  double leftover_mass = 0.0;
  int n_max_used = 0;
  int grid_size = 0;
  /// P(Poisson(max rate_l * tau) > n_max): bound on the truncated tail.
  double tail_bound = 0.0;
  /// True when the first grid hit a planned action and the evaluator reran
  /// on the half-cell-shifted grid.
  bool grid_shifted = false;
};

struct QuadratureOptions {
  int grid_size = 200;
  int n_max_events = 4;
  double abs_tol = 1e-9;
  unsigned threads = 1;
};

/// Deterministic g-computation formula.
///
/// Sums over k = 0..n_max longitudinal events placed on an m-cell grid:
/// the probability that the next event falls in a cell is
/// S(t, lo) * (1 - S(lo, hi)) with S the product integral of the marginal
/// longitudinal intensity along the plan-consistent history, and the event
/// is placed at the midpoint of the part of the cell after the previous
/// event. Each configuration contributes its survival to tau times
/// Law(Y | mu^g).
QuadratureResult g_formula_quadrature(const ScenarioModel& model, const Plan& g,
                                      const QuadratureOptions& options = {});

struct MassResult {
  double mass = 0.0;
  double leftover = 0.0;
  double tail_bound = 0.0;
};

/// The deterministic evaluator with the outcome law replaced by 1.
MassResult no_explosion_mass(const ScenarioModel& model, const Plan& g,
                             const QuadratureOptions& options = {});

struct McResult {
  OutcomeDist dist;
  /// Per-cell standard error of the mean of the per-sample laws.
  std::vector<double> std_error;
  std::size_t n_samples = 0;
};

/// Monte Carlo g-computation formula: simulates longitudinal times from
/// the marginal intensity by thinning against the largest tabulated rate_l,
/// inserts planned actions, and averages Law(Y | mu^g) over samples.
McResult g_formula_mc(const ScenarioModel& model, const Plan& g, std::size_t n_samples,
                      std::uint64_t seed, unsigned threads = 1);

/// b(sigma) for each sigma: the formula truncated at sigma, with the outcome
/// law replaced by the posterior mixture over u of the counterfactual
/// outcome law given u and the sigma-history. b(tau) is the formula itself.
std::vector<OutcomeDist> b_curve(const ScenarioModel& model, const Plan& g,
                                 std::span<const double> sigma_grid,
                                 const QuadratureOptions& options = {});

/// P(N > n) for N ~ Poisson(mean).
double poisson_tail(double mean, int n);

nlohmann::json to_json(const QuadratureResult& result);
nlohmann::json to_json(const McResult& result);

}  // namespace gct
