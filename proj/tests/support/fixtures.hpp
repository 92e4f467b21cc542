#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <string_view>
#include <vector>

#include "gct/gct.hpp"

namespace gct::testing {

inline std::filesystem::path scenario_path(std::string_view name) {
  return std::filesystem::path(GCT_SCENARIO_DIR) / name;
}

using RateFn = std::function<double(std::size_t u, int ca, int cl)>;
using RowFn = std::function<std::vector<double>(std::size_t u, int ca, int cl)>;

inline void fill(ScenarioModel& m, RateTable& table, const RateFn& f) {
  for (std::size_t u = 0; u < m.n_states(); ++u) {
    for (int ca = 0; ca <= m.cap_a; ++ca) {
      for (int cl = 0; cl <= m.cap_l; ++cl) table.at(u, ca, cl) = f(u, ca, cl);
    }
  }
}

inline void fill_rows(ScenarioModel& m, const RowFn& f) {
  for (std::size_t u = 0; u < m.n_states(); ++u) {
    for (int ca = 0; ca <= m.cap_a; ++ca) {
      for (int cl = 0; cl <= m.cap_l; ++cl) m.set_outcome_row(u, ca, cl, f(u, ca, cl));
    }
  }
}

/// Model with the given prior, constant rates and a uniform outcome table.
inline ScenarioModel make_model(std::vector<double> prior, double rate_a, double rate_l, int cap_a = 2,
                                int cap_l = 2, std::size_t n_y = 2, double tau = 1.0) {
  std::vector<LatentState> latent;
  for (std::size_t k = 0; k < prior.size(); ++k) latent.push_back({static_cast<double>(k), prior[k]});
  std::vector<double> ys(n_y);
  std::iota(ys.begin(), ys.end(), 0.0);
  ScenarioModel m(tau, std::move(latent), cap_a, cap_l, std::move(ys));
  fill(m, m.rate_a, [&](std::size_t, int, int) { return rate_a; });
  fill(m, m.rate_l, [&](std::size_t, int, int) { return rate_l; });
  fill_rows(m, [&](std::size_t, int, int) { return std::vector<double>(n_y, 1.0 / static_cast<double>(n_y)); });
  return m;
}

/// Random small scenario: 2-4 latent states, caps up to 2, rates in
/// [0.1, 3], random outcome rows.
inline ScenarioModel random_model(Rng& rng, double tau = 1.0) {
  const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 3.0);
  std::vector<double> prior(k);
  for (auto& p : prior) p = 0.1 + rng.uniform();
  const double total = std::accumulate(prior.begin(), prior.end(), 0.0);
  for (auto& p : prior) p /= total;
  const int cap_a = static_cast<int>(rng.uniform() * 3.0);
  const int cap_l = static_cast<int>(rng.uniform() * 3.0);
  ScenarioModel m = make_model(prior, 1.0, 1.0, cap_a, cap_l, 3, tau);
  fill(m, m.rate_a, [&](std::size_t, int, int) { return 0.1 + 2.9 * rng.uniform(); });
  fill(m, m.rate_l, [&](std::size_t, int, int) { return 0.1 + 2.9 * rng.uniform(); });
  fill_rows(m, [&](std::size_t, int, int) {
    std::vector<double> row(3);
    for (auto& p : row) p = 0.05 + rng.uniform();
    const double s = std::accumulate(row.begin(), row.end(), 0.0);
    for (auto& p : row) p /= s;
    return row;
  });
  m.validate();
  return m;
}

/// Random trajectory with up to `max_events` events in (0, tau].
inline Trajectory random_trajectory(Rng& rng, double tau, int max_events) {
  const int n = static_cast<int>(rng.uniform() * (max_events + 1));
  std::vector<double> times(static_cast<std::size_t>(n));
  for (auto& t : times) t = tau * (1.0 - rng.uniform());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<Event> events;
  for (double t : times) events.push_back({t, rng.uniform() < 0.5 ? Mark::Action : Mark::Longitudinal});
  return Trajectory(std::move(events), tau);
}

/// Direct per-state path likelihood p(u) * prod exp(-R dt) * prod rate,
/// evaluated from scratch for every state and normalized once at the end.
inline std::vector<double> brute_force_posterior(const ScenarioModel& m, std::span<const Event> events,
                                                 double upto, bool include_final_survival) {
  const std::size_t k = m.n_states();
  std::vector<double> log_lik(k);
  for (std::size_t u = 0; u < k; ++u) {
    double ll = std::log(m.latent[u].prob);
    int na = 0;
    int nl = 0;
    double prev = 0.0;
    for (const Event& e : events) {
      if (e.time > upto) break;
      const int ca = std::min(na, m.cap_a);
      const int cl = std::min(nl, m.cap_l);
      const double ra = m.rate_a.at(u, ca, cl);
      const double rl = m.rate_l.at(u, ca, cl);
      ll -= (ra + rl) * (e.time - prev);
      ll += std::log(e.mark == Mark::Action ? ra : rl);
      if (e.mark == Mark::Action) {
        ++na;
      } else {
        ++nl;
      }
      prev = e.time;
    }
    if (include_final_survival) {
      const int ca = std::min(na, m.cap_a);
      const int cl = std::min(nl, m.cap_l);
      ll -= (m.rate_a.at(u, ca, cl) + m.rate_l.at(u, ca, cl)) * (upto - prev);
    }
    log_lik[u] = ll;
  }
  const double top = *std::max_element(log_lik.begin(), log_lik.end());
  std::vector<double> w(k);
  double total = 0.0;
  for (std::size_t u = 0; u < k; ++u) {
    w[u] = std::exp(log_lik[u] - top);
    total += w[u];
  }
  for (auto& x : w) x /= total;
  return w;
}

/// Marginal longitudinal intensity just before s along the plan-consistent
/// trajectory, from the brute-force posterior.
inline double brute_force_l_intensity(const ScenarioModel& m, const Trajectory& mu_g, double s) {
  std::vector<Event> before;
  int na = 0;
  int nl = 0;
  for (const Event& e : mu_g.events()) {
    if (!(e.time < s)) break;
    before.push_back(e);
    (e.mark == Mark::Action ? na : nl) += 1;
  }
  const auto w = brute_force_posterior(m, before, s, true);
  double lambda = 0.0;
  for (std::size_t u = 0; u < m.n_states(); ++u) {
    lambda += w[u] * m.rate_l.at(u, std::min(na, m.cap_a), std::min(nl, m.cap_l));
  }
  return lambda;
}

/// Composite Simpson with n (even) panels.
template <class F>
double composite_simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double tv(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace gct::testing
