#include "gct/harness.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gct/errors.hpp"
#include "gct/random.hpp"
#include "gct/simulator.hpp"

namespace gct {

double tv_distance(const OutcomeDist& p, const OutcomeDist& q) {
  if (p.support != q.support || p.probs.size() != q.probs.size() ||
      p.probs.size() != p.support.size()) {
    throw DomainError("total variation needs distributions on the same support");
  }
  double l1 = std::abs(p.leftover - q.leftover);
  for (std::size_t k = 0; k < p.probs.size(); ++k) l1 += std::abs(p.probs[k] - q.probs[k]);
  return 0.5 * l1;
}

namespace {

template <class F>
auto timed(double& seconds, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  auto result = f();
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

VerifyReport verify(const ScenarioModel& model, const Plan& g, const VerifyParams& params) {
  VerifyReport r;
  r.scenario_id = model.id;
  r.plan = g;
  r.params = params;
  r.tolerances = model.tolerances;
  r.nuc_flag = model.no_unmeasured_confounding();
  try {
    const bool concurrent = params.threads >= 3;
    const unsigned inner = concurrent ? params.threads / 3 : params.threads;
    const std::launch policy = concurrent ? std::launch::async : std::launch::deferred;

    auto oracle = std::async(policy, [&] {
      return timed(r.oracle_seconds, [&] {
        const auto samples = simulate_counterfactual_batch(model, g, params.oracle_n, params.seed, inner);
        return empirical_outcome_dist(model, samples);
      });
    });
    auto mc = std::async(policy, [&] {
      return timed(r.mc_seconds, [&] {
        return g_formula_mc(model, g, params.mc_n, derive_seed(params.seed, 0x6d63), inner);
      });
    });
    auto quad = std::async(policy, [&] {
      return timed(r.quad_seconds, [&] {
        return g_formula_quadrature(model, g, {params.m, params.n_max, 1e-9, inner});
      });
    });
    r.oracle_dist = oracle.get();
    const McResult mc_result = mc.get();
    r.quad = quad.get();
    r.mc_dist = mc_result.dist;
    r.mc_stderr = mc_result.std_error;

    const double n_oracle = static_cast<double>(params.oracle_n);
    double se_oracle_mc = 0.0;
    double se_mc = 0.0;
    for (std::size_t k = 0; k < r.oracle_dist.probs.size(); ++k) {
      const double p = r.oracle_dist.probs[k];
      r.oracle_stderr.push_back(std::sqrt(p * (1.0 - p) / n_oracle));
      se_oracle_mc += std::hypot(r.oracle_stderr.back(), r.mc_stderr[k]);
      se_mc += r.mc_stderr[k];
    }
    se_oracle_mc *= 0.5;
    se_mc *= 0.5;

    r.tv_oracle_mc = tv_distance(r.oracle_dist, r.mc_dist);
    r.tv_oracle_quad = tv_distance(r.oracle_dist, r.quad.dist);
    r.tv_mc_quad = tv_distance(r.mc_dist, r.quad.dist);
    r.limit_oracle_mc = std::max(r.tolerances.oracle_mc, 3.0 * se_oracle_mc);
    r.limit_mc_quad = std::max(r.tolerances.mc_quad, 3.0 * se_mc);

    if (r.nuc_flag) {
      r.pass = r.tv_oracle_quad <= r.tolerances.oracle_quad && r.tv_oracle_mc <= r.limit_oracle_mc &&
               r.tv_mc_quad <= r.limit_mc_quad;
    } else {
      r.pass = r.tv_oracle_quad >= r.tolerances.confounding_floor &&
               r.tv_oracle_mc >= r.tolerances.confounding_floor;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
    r.pass = false;
  }
  return r;
}

nlohmann::json to_json(const VerifyReport& r) {
  return {{"scenario", r.scenario_id},
          {"plan", to_json(r.plan)},
          {"params",
           {{"oracle_n", r.params.oracle_n},
            {"mc_n", r.params.mc_n},
            {"m", r.params.m},
            {"n_max", r.params.n_max},
            {"seed", r.params.seed}}},
          {"tolerances",
           {{"oracle_quad", r.tolerances.oracle_quad},
            {"oracle_mc", r.tolerances.oracle_mc},
            {"mc_quad", r.tolerances.mc_quad},
            {"confounding_floor", r.tolerances.confounding_floor}}},
          {"oracle_dist", to_json(r.oracle_dist)},
          {"mc_dist", to_json(r.mc_dist)},
          {"quad_result", to_json(r.quad)},
          {"mc_stderr", r.mc_stderr},
          {"oracle_stderr", r.oracle_stderr},
          {"tv_oracle_mc", r.tv_oracle_mc},
          {"tv_oracle_quad", r.tv_oracle_quad},
          {"tv_mc_quad", r.tv_mc_quad},
          {"limit_oracle_mc", r.limit_oracle_mc},
          {"limit_mc_quad", r.limit_mc_quad},
          {"nuc_flag", r.nuc_flag},
          {"pass", r.pass},
          {"error", r.error},
          {"runtimes", {{"oracle_s", r.oracle_seconds}, {"mc_s", r.mc_seconds}, {"quad_s", r.quad_seconds}}}};
}

std::string csv_header() {
  return "scenario,plan,nuc_flag,pass,tv_oracle_mc,tv_oracle_quad,tv_mc_quad,limit_oracle_mc,"
         "limit_mc_quad,quad_leftover,oracle_n,mc_n,m,n_max,seed,oracle_s,mc_s,quad_s,error";
}

std::string to_csv_row(const VerifyReport& r) {
  std::ostringstream out;
  out.precision(17);
  std::string error = r.error;
  for (char& c : error) {
    if (c == ',' || c == '\n' || c == '"') c = ' ';
  }
  out << r.scenario_id << ',' << r.plan.kind_name() << ',' << (r.nuc_flag ? "true" : "false") << ','
      << (r.pass ? "true" : "false") << ',' << r.tv_oracle_mc << ',' << r.tv_oracle_quad << ','
      << r.tv_mc_quad << ',' << r.limit_oracle_mc << ',' << r.limit_mc_quad << ','
      << r.quad.leftover_mass << ',' << r.params.oracle_n << ',' << r.params.mc_n << ','
      << r.params.m << ',' << r.params.n_max << ',' << r.params.seed << ',' << r.oracle_seconds
      << ',' << r.mc_seconds << ',' << r.quad_seconds << ',' << error;
  return out.str();
}

}  // namespace gct
