#include "gct/gformula.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>

#include <nlohmann/json.hpp>

#include "gct/errors.hpp"
#include "gct/filter.hpp"
#include "gct/parallel.hpp"
#include "gct/quadrature.hpp"
#include "gct/random.hpp"

namespace gct {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Cell boundaries on [0, tau]. The shifted grid moves every interior
/// boundary by half a cell, giving m + 1 cells with half-width end cells.
std::vector<double> make_grid(double tau, int m, bool shifted) {
  std::vector<double> bounds;
  const double h = tau / m;
  bounds.push_back(0.0);
  for (int i = 1; i < m; ++i) bounds.push_back(shifted ? (i - 0.5) * h : i * h);
  if (shifted) bounds.push_back((m - 0.5) * h);
  bounds.push_back(tau);
  return bounds;
}

void validate_options(const QuadratureOptions& o) {
  if (o.grid_size < 2) throw DomainError("grid size must be at least 2");
  if (o.n_max_events < 0) throw DomainError("event budget must be nonnegative");
  if (!(o.abs_tol > 0.0)) throw DomainError("quadrature tolerance must be positive");
}

/// Depth-first enumeration of longitudinal configurations on (0, end].
///
/// Each node is a placed longitudinal event (the root is time zero) with
/// the posterior just after it. Visiting a node integrates the marginal
/// longitudinal intensity forward along the current sub-plan's actions,
/// spawning one child per remaining cell, and finally hands the survival
/// to `end` and the terminal checkpoint to the terminal callback.
class FormulaTree {
 public:
  using Terminal =
      std::function<void(const FilterCheckpoint& terminal, std::span<const double> l_hist,
                         int depth, double weight)>;

  FormulaTree(const ScenarioModel& model, const Plan& g, const std::vector<double>& bounds,
              double end, int max_events, double tol, bool condition_on_actions, Terminal terminal)
      : model_(model),
        plan_(g),
        bounds_(bounds),
        end_(end),
        max_events_(max_events),
        terminal_(std::move(terminal)) {
    levels_.reserve(static_cast<std::size_t>(max_events) + 1);
    for (int d = 0; d <= max_events; ++d) {
      levels_.emplace_back(model, tol / model.horizon);
      levels_.back().walker.set_condition_on_actions(condition_on_actions);
    }
  }

  /// Evaluates the whole subtree below `node`.
  void run(std::vector<double>& l_hist, const FilterCheckpoint& node, int depth, double weight) {
    visit(l_hist, node, depth, weight, [&](const FilterCheckpoint& child, double child_weight) {
      run(l_hist, child, depth + 1, child_weight);
    });
  }

  struct Child {
    FilterCheckpoint cp;
    double weight;
  };

  /// Visits `node` but collects its children instead of descending.
  std::vector<Child> expand(std::vector<double>& l_hist, const FilterCheckpoint& node, int depth,
                            double weight) {
    std::vector<Child> out;
    visit(l_hist, node, depth, weight, [&](const FilterCheckpoint& child, double child_weight) {
      out.push_back({child, child_weight});
    });
    return out;
  }

 private:
  struct Level {
    Level(const ScenarioModel& model, double tol_per_unit) : walker(model, tol_per_unit) {}
    LongitudinalHazardWalker walker;
    std::vector<double> actions;
    FilterCheckpoint child;
    FilterCheckpoint terminal;
  };

  template <class OnChild>
  void visit(std::vector<double>& l_hist, const FilterCheckpoint& node, int depth, double weight,
             OnChild&& on_child) {
    Level& lv = levels_[static_cast<std::size_t>(depth)];
    const double t = node.posterior.at_time;
    lv.actions.clear();
    plan_.segment_actions(l_hist, t, end_, lv.actions);
    LongitudinalHazardWalker& walker = lv.walker;
    walker.reset(node, lv.actions);

    if (depth < max_events_) {
      auto next_bound = std::upper_bound(bounds_.begin(), bounds_.end(), t);
      double lo = t;
      for (; next_bound != bounds_.end() && lo < end_; ++next_bound) {
        const double hi = std::min(*next_bound, end_);
        if (!(hi > lo)) continue;
        walker.advance_to(lo);
        const double hazard_lo = walker.cumulative_hazard();
        const double mid = 0.5 * (lo + hi);
        walker.advance_to(mid);
        if (walker.action_at_current()) {
          throw TieError("grid point " + std::to_string(mid) + " coincides with a planned action");
        }
        const double intensity = walker.current_intensity();
        if (intensity > 0.0) walker.checkpoint_into(lv.child);
        walker.advance_to(hi);
        const double cell_hazard = walker.cumulative_hazard() - hazard_lo;
        const double prob = std::exp(-hazard_lo) * -std::expm1(-cell_hazard);
        if (prob > 0.0 && intensity > 0.0) {
          apply_event(lv.child.posterior, model_.longitudinal_rates(lv.child.counts));
          ++lv.child.counts.longitudinal;
          l_hist.push_back(mid);
          on_child(lv.child, weight * prob);
          l_hist.pop_back();
        }
        lo = hi;
      }
    }
    walker.advance_to(end_);
    const double survival = std::exp(-walker.cumulative_hazard());
    walker.absorb_action_at_current();
    walker.checkpoint_into(lv.terminal);
    terminal_(lv.terminal, l_hist, depth, weight * survival);
  }

  const ScenarioModel& model_;
  const Plan& plan_;
  const std::vector<double>& bounds_;
  double end_;
  int max_events_;
  Terminal terminal_;
  std::vector<Level> levels_;
};

using TerminalFactory = std::function<FormulaTree::Terminal(std::span<double> acc)>;

/// Runs the tree from time zero with the root's children spread over
/// workers. Each root child accumulates into its own slot; slots are summed
/// in cell order, so the result does not depend on the thread count.
std::vector<double> evaluate_tree(const ScenarioModel& model, const Plan& g,
                                  const std::vector<double>& bounds, double end, int max_events,
                                  const QuadratureOptions& options, std::size_t width,
                                  const TerminalFactory& make_terminal) {
  std::vector<double> root_acc(width, 0.0);
  std::vector<double> l_hist;
  const FilterCheckpoint root{prior_state(model), {}};
  FormulaTree root_tree(model, g, bounds, end, max_events, options.abs_tol, true,
                        make_terminal(root_acc));
  const auto children = root_tree.expand(l_hist, root, 0, 1.0);

  std::vector<std::vector<double>> child_acc(children.size(), std::vector<double>(width, 0.0));
  parallel_for(children.size(), options.threads, [&](std::size_t i) {
    FormulaTree tree(model, g, bounds, end, max_events, options.abs_tol, true,
                     make_terminal(child_acc[i]));
    std::vector<double> hist{children[i].cp.posterior.at_time};
    tree.run(hist, children[i].cp, 1, children[i].weight);
  });

  std::vector<double> total(width);
  std::vector<double> column(children.size() + 1);
  for (std::size_t k = 0; k < width; ++k) {
    column[0] = root_acc[k];
    for (std::size_t i = 0; i < children.size(); ++i) column[i + 1] = child_acc[i][k];
    total[k] = pairwise_sum(column);
  }
  return total;
}

FormulaTree::Terminal law_terminal(const ScenarioModel& model, std::span<double> acc) {
  return [&model, acc, row = std::vector<double>(model.n_outcomes())](
             const FilterCheckpoint& terminal, std::span<const double>, int, double weight) mutable {
    if (weight == 0.0) return;
    mix_outcome_rows(model, terminal, row);
    for (std::size_t k = 0; k < row.size(); ++k) acc[k] += weight * row[k];
  };
}

/// Runs body(false); if the grid collides with a planned action, reruns
/// once on the shifted grid.
template <class Body>
auto with_tie_retry(bool& shifted, Body&& body) {
  try {
    shifted = false;
    return body(false);
  } catch (const TieError&) {
    shifted = true;
    return body(true);
  }
}

}  // namespace

double poisson_tail(double mean, int n) {
  if (!(mean >= 0.0)) throw DomainError("Poisson mean must be nonnegative");
  if (n < 0) return 1.0;
  if (mean == 0.0) return 0.0;
  // Sum the upper tail directly; terms decay once k exceeds the mean.
  double term = std::exp(-mean);
  for (int k = 1; k <= n + 1; ++k) term *= mean / k;
  double tail = 0.0;
  for (int k = n + 1; k < n + 1000; ++k) {
    tail += term;
    term *= mean / (k + 1);
    if (term < tail * 1e-17 && k > mean) break;
  }
  return std::min(tail, 1.0);
}

QuadratureResult g_formula_quadrature(const ScenarioModel& model, const Plan& g,
                                      const QuadratureOptions& options) {
  validate_options(options);
  QuadratureResult result;
  const auto probs = with_tie_retry(result.grid_shifted, [&](bool shifted) {
    const auto bounds = make_grid(model.horizon, options.grid_size, shifted);
    return evaluate_tree(model, g, bounds, model.horizon, options.n_max_events, options,
                         model.n_outcomes(),
                         [&](std::span<double> acc) { return law_terminal(model, acc); });
  });
  result.dist = OutcomeDist{model.y_support, probs, 0.0};
  result.leftover_mass = 1.0 - pairwise_sum(probs);
  result.dist.leftover = result.leftover_mass;
  result.n_max_used = options.n_max_events;
  result.grid_size = options.grid_size;
  result.tail_bound = poisson_tail(model.max_longitudinal_rate() * model.horizon, options.n_max_events);
  return result;
}

MassResult no_explosion_mass(const ScenarioModel& model, const Plan& g,
                             const QuadratureOptions& options) {
  validate_options(options);
  bool shifted = false;
  const auto mass = with_tie_retry(shifted, [&](bool shift) {
    const auto bounds = make_grid(model.horizon, options.grid_size, shift);
    return evaluate_tree(model, g, bounds, model.horizon, options.n_max_events, options, 1,
                         [](std::span<double> acc) -> FormulaTree::Terminal {
                           return [acc](const FilterCheckpoint&, std::span<const double>, int,
                                        double weight) { acc[0] += weight; };
                         });
  });
  MassResult r;
  r.mass = mass[0];
  r.leftover = 1.0 - mass[0];
  r.tail_bound = poisson_tail(model.max_longitudinal_rate() * model.horizon, options.n_max_events);
  return r;
}

std::vector<OutcomeDist> b_curve(const ScenarioModel& model, const Plan& g,
                                 std::span<const double> sigma_grid,
                                 const QuadratureOptions& options) {
  validate_options(options);
  for (double sigma : sigma_grid) {
    if (!(sigma > 0.0) || sigma > model.horizon) throw DomainError("sigma must lie in (0, tau]");
  }
  const std::size_t width = model.n_outcomes();
  std::vector<OutcomeDist> curve;
  for (double sigma : sigma_grid) {
    if (sigma == model.horizon) {
      curve.push_back(g_formula_quadrature(model, g, options).dist);
      continue;
    }
    bool shifted = false;
    const auto probs = with_tie_retry(shifted, [&](bool shift) {
      const auto bounds = make_grid(model.horizon, options.grid_size, shift);
      // Terminal at sigma: mix, over the posterior at sigma, the outcome law
      // of the interventional world given u and the sigma-history. That law
      // is itself a formula tree on (sigma, tau] with u known.
      auto make_terminal = [&](std::span<double> acc) -> FormulaTree::Terminal {
        // One continuation tree per remaining event budget, reused across
        // terminals of the same worker.
        auto cont_acc = std::make_shared<std::vector<double>>(width, 0.0);
        auto trees = std::make_shared<std::vector<std::unique_ptr<FormulaTree>>>(
            static_cast<std::size_t>(options.n_max_events) + 1);
        return [&model, &g, &options, &bounds, acc, cont_acc, trees,
                hist = std::vector<double>(), one_hot = FilterCheckpoint{}](
                   const FilterCheckpoint& at_sigma, std::span<const double> l_hist, int depth,
                   double weight) mutable {
          if (weight == 0.0) return;
          const int budget = options.n_max_events - depth;
          auto& cont = (*trees)[static_cast<std::size_t>(budget)];
          if (!cont) {
            cont = std::make_unique<FormulaTree>(model, g, bounds, model.horizon, budget,
                                                 options.abs_tol, false,
                                                 law_terminal(model, *cont_acc));
          }
          hist.assign(l_hist.begin(), l_hist.end());
          one_hot.counts = at_sigma.counts;
          one_hot.posterior.at_time = at_sigma.posterior.at_time;
          for (std::size_t u = 0; u < model.n_states(); ++u) {
            const double pu = std::exp(at_sigma.posterior.log_weights[u]);
            if (pu == 0.0) continue;
            one_hot.posterior.log_weights.assign(model.n_states(), kNegInf);
            one_hot.posterior.log_weights[u] = 0.0;
            std::fill(cont_acc->begin(), cont_acc->end(), 0.0);
            cont->run(hist, one_hot, 0, 1.0);
            for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += weight * pu * (*cont_acc)[k];
          }
        };
      };
      return evaluate_tree(model, g, bounds, sigma, options.n_max_events, options, width,
                           make_terminal);
    });
    OutcomeDist d{model.y_support, probs, 0.0};
    d.leftover = 1.0 - pairwise_sum(probs);
    curve.push_back(std::move(d));
  }
  return curve;
}

// --- Monte Carlo ------------------------------------------------------------

namespace {

/// One draw of the longitudinal process under the marginal intensity along
/// the plan-consistent history; returns Law(Y | mu^g) for that draw.
void mc_sample_law(const ScenarioModel& model, const Plan& g, double bound, std::uint64_t seed,
                   std::span<double> law) {
  Rng rng(seed);
  const double tau = model.horizon;
  FilterCheckpoint cp{prior_state(model), {}};
  std::vector<double> l_hist;
  std::vector<double> actions;
  std::vector<double> totals(model.n_states());
  std::size_t next_action = 0;
  g.segment_actions(l_hist, 0.0, tau, actions);

  auto refresh_totals = [&] {
    auto a = model.action_rates(cp.counts);
    auto l = model.longitudinal_rates(cp.counts);
    for (std::size_t u = 0; u < totals.size(); ++u) totals[u] = a[u] + l[u];
  };
  auto check_explosion = [&] {
    if (cp.counts.actions + cp.counts.longitudinal > model.n_max) {
      throw ExplosionError("more than n_max events under the plan");
    }
  };
  refresh_totals();

  double t = 0.0;
  while (true) {
    const double proposal = bound > 0.0 ? t + rng.exponential(bound)
                                        : std::numeric_limits<double>::infinity();
    while (next_action < actions.size() && actions[next_action] < proposal) {
      const double a = actions[next_action++];
      cp.posterior = filter_interval(cp.posterior, totals, a - cp.posterior.at_time);
      apply_event(cp.posterior, model.action_rates(cp.counts));
      ++cp.counts.actions;
      check_explosion();
      refresh_totals();
    }
    if (proposal > tau) break;
    if (next_action < actions.size() && actions[next_action] == proposal) {
      throw TieError("thinning proposal coincides with a planned action");
    }
    const PosteriorState left = filter_interval(cp.posterior, totals, proposal - cp.posterior.at_time);
    const auto l_rates = model.longitudinal_rates(cp.counts);
    double intensity = 0.0;
    for (std::size_t u = 0; u < l_rates.size(); ++u) intensity += std::exp(left.log_weights[u]) * l_rates[u];
    if (intensity > bound * (1.0 + 1e-12)) {
      throw std::logic_error("thinning bound violated: marginal intensity exceeds max rate_l");
    }
    if (rng.uniform() * bound < intensity) {
      cp.posterior = left;
      apply_event(cp.posterior, l_rates);
      ++cp.counts.longitudinal;
      check_explosion();
      refresh_totals();
      l_hist.push_back(proposal);
      actions.clear();
      next_action = 0;
      g.segment_actions(l_hist, proposal, tau, actions);
    }
    t = proposal;
  }
  cp.posterior = filter_interval(cp.posterior, totals, tau - cp.posterior.at_time);
  mix_outcome_rows(model, cp, law);
}

}  // namespace

McResult g_formula_mc(const ScenarioModel& model, const Plan& g, std::size_t n_samples,
                      std::uint64_t seed, unsigned threads) {
  if (n_samples < 1) throw DomainError("Monte Carlo needs at least one sample");
  const std::size_t width = model.n_outcomes();
  const double bound = model.max_longitudinal_rate();

  // Sums are taken around the first sample's law: identical samples then
  // average to exactly that law, and the variance sum stays well conditioned.
  std::vector<double> shift(width);
  mc_sample_law(model, g, bound, derive_seed(seed, 0), shift);

  constexpr std::size_t kChunk = 1024;
  const std::size_t n_chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<double> sums(n_chunks * width, 0.0);
  std::vector<double> squares(n_chunks * width, 0.0);
  parallel_for(n_chunks, threads, [&](std::size_t c) {
    std::vector<double> law(width);
    const std::size_t stop = std::min(n_samples, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < stop; ++i) {
      mc_sample_law(model, g, bound, derive_seed(seed, i), law);
      for (std::size_t k = 0; k < width; ++k) {
        const double d = law[k] - shift[k];
        sums[c * width + k] += d;
        squares[c * width + k] += d * d;
      }
    }
  });

  McResult r;
  r.n_samples = n_samples;
  r.dist = OutcomeDist{model.y_support, std::vector<double>(width), 0.0};
  r.std_error.resize(width);
  const double n = static_cast<double>(n_samples);
  std::vector<double> column(n_chunks);
  for (std::size_t k = 0; k < width; ++k) {
    for (std::size_t c = 0; c < n_chunks; ++c) column[c] = sums[c * width + k];
    const double mean_shift = pairwise_sum(column) / n;
    for (std::size_t c = 0; c < n_chunks; ++c) column[c] = squares[c * width + k];
    const double sq = pairwise_sum(column);
    r.dist.probs[k] = shift[k] + mean_shift;
    const double var = n > 1.0 ? std::max(0.0, (sq - n * mean_shift * mean_shift) / (n - 1.0)) : 0.0;
    r.std_error[k] = std::sqrt(var / n);
  }
  return r;
}

nlohmann::json to_json(const QuadratureResult& result) {
  return {{"dist", to_json(result.dist)},
          {"leftover", result.leftover_mass},
          {"params",
           {{"engine", "quad"},
            {"m", result.grid_size},
            {"n_max", result.n_max_used},
            {"tail_bound", result.tail_bound},
            {"grid_shifted", result.grid_shifted}}}};
}

nlohmann::json to_json(const McResult& result) {
  return {{"dist", to_json(result.dist)},
          {"leftover", 0.0},
          {"std_error", result.std_error},
          {"params", {{"engine", "mc"}, {"n", result.n_samples}}}};
}

}  // namespace gct
