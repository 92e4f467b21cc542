#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gct/gct.hpp"

namespace gct::cli {

namespace {

/// Destination that is either the given stream or a file.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ValidationError("cannot open output file " + path);
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }
  [[nodiscard]] bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

ScenarioModel load_checked_scenario(const RunConfig& c) {
  if (c.scenario_path.empty()) throw ValidationError("--scenario is required");
  if (!std::filesystem::exists(c.scenario_path)) {
    throw ValidationError("scenario file not found: " + c.scenario_path);
  }
  return load_scenario(c.scenario_path);
}

Plan load_plan(const RunConfig& c) {
  if (c.plan.empty()) throw ValidationError("--plan is required for " + c.command);
  nlohmann::json j;
  try {
    if (!c.plan.empty() && c.plan.front() == '{') {
      j = nlohmann::json::parse(c.plan);
    } else {
      std::ifstream in(c.plan);
      if (!in) throw ValidationError("plan file not found: " + c.plan);
      in >> j;
    }
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("plan is not valid JSON: " + std::string(e.what()));
  }
  return plan_from_json(j);
}

std::uint64_t require_seed(const RunConfig& c) {
  if (!c.seed) throw ValidationError("--seed is required for " + c.command);
  return *c.seed;
}

}  // namespace

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ScenarioModel model = load_checked_scenario(c);
  const std::uint64_t seed = require_seed(c);
  const unsigned threads = resolve_threads(c.threads);
  std::vector<WorldSample> samples;
  if (c.mode == "factual") {
    samples = simulate_factual_batch(model, c.n, seed, threads);
  } else if (c.mode == "counterfactual") {
    samples = simulate_counterfactual_batch(model, load_plan(c), c.n, seed, threads);
  } else {
    throw ValidationError("--mode must be factual or counterfactual");
  }
  Output o(c.out_path, out);
  std::size_t n_a = 0;
  std::size_t n_l = 0;
  for (const auto& s : samples) {
    o.stream() << to_json(model, s).dump() << '\n';
    const EventCounts counts = s.traj.counts();
    n_a += static_cast<std::size_t>(counts.actions);
    n_l += static_cast<std::size_t>(counts.longitudinal);
  }
  std::ostream& summary = o.to_file() ? out : err;
  summary << "samples=" << samples.size() << " action_events=" << n_a
          << " longitudinal_events=" << n_l << '\n';
  return kOk;
}

int cmd_gformula(const RunConfig& c, std::ostream& out, std::ostream&) {
  const ScenarioModel model = load_checked_scenario(c);
  const Plan g = load_plan(c);
  const unsigned threads = resolve_threads(c.threads);
  nlohmann::json j;
  if (c.engine == "quad") {
    j = to_json(g_formula_quadrature(model, g, {c.m, c.n_max, 1e-9, threads}));
  } else if (c.engine == "mc") {
    const std::uint64_t seed = require_seed(c);
    j = to_json(g_formula_mc(model, g, c.n, seed, threads));
    j["params"]["seed"] = seed;
  } else {
    throw ValidationError("--engine must be mc or quad");
  }
  j["params"]["scenario"] = model.id;
  j["params"]["plan"] = to_json(g);
  Output o(c.out_path, out);
  o.stream() << j.dump(2) << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ScenarioModel model = load_checked_scenario(c);
  const Plan g = load_plan(c);
  VerifyParams params;
  params.oracle_n = c.oracle_n;
  params.mc_n = c.mc_n;
  params.m = c.m;
  params.n_max = c.n_max;
  params.seed = c.seed.value_or(1);
  params.threads = resolve_threads(c.threads);
  const VerifyReport report = verify(model, g, params);
  Output o(c.out_path, out);
  if (c.format == "csv") {
    o.stream() << csv_header() << '\n' << to_csv_row(report) << '\n';
  } else if (c.format == "json") {
    o.stream() << to_json(report).dump(2) << '\n';
  } else {
    throw ValidationError("--format must be json or csv");
  }
  if (!report.error.empty()) err << "verify: " << report.error << '\n';
  return report.pass ? kOk : kVerificationFailed;
}

int cmd_mass(const RunConfig& c, std::ostream& out, std::ostream&) {
  const ScenarioModel model = load_checked_scenario(c);
  const Plan g = load_plan(c);
  const MassResult r = no_explosion_mass(model, g, {c.m, c.n_max, 1e-9, resolve_threads(c.threads)});
  const nlohmann::json j = {{"mass", r.mass},
                            {"leftover", r.leftover},
                            {"tail_bound", r.tail_bound},
                            {"params", {{"scenario", model.id}, {"plan", to_json(g)}, {"m", c.m}, {"n_max", c.n_max}}}};
  Output o(c.out_path, out);
  o.stream() << j.dump(2) << '\n';
  return kOk;
}

int cmd_bcurve(const RunConfig& c, std::ostream& out, std::ostream&) {
  const ScenarioModel model = load_checked_scenario(c);
  const Plan g = load_plan(c);
  if (c.sigmas.empty()) throw ValidationError("--sigmas is required");
  const auto curve = b_curve(model, g, c.sigmas, {c.m, c.n_max, 1e-9, resolve_threads(c.threads)});
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    points.push_back({{"sigma", c.sigmas[i]}, {"dist", to_json(curve[i])}, {"leftover", curve[i].leftover}});
  }
  const nlohmann::json j = {{"curve", points},
                            {"params", {{"scenario", model.id}, {"plan", to_json(g)}, {"m", c.m}, {"n_max", c.n_max}}}};
  Output o(c.out_path, out);
  o.stream() << j.dump(2) << '\n';
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Continuous-time g-computation formula: evaluators and verification"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", c.scenario_path, "Scenario JSON file")->required();
    sub->add_option("--out", c.out_path, "Output file (default stdout)");
    sub->add_option("--threads", c.threads, "Worker cap (default $GCT_THREADS or 1)");
  };
  auto plan_opt = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--plan", c.plan, "Plan JSON file or inline JSON object");
    if (required) o->required();
  };
  auto seed_opt = [&](CLI::App* sub) { return sub->add_option("--seed", seed, "Random seed"); };

  auto* simulate = app.add_subcommand("simulate", "Draw factual or counterfactual world samples");
  common(simulate);
  plan_opt(simulate, false);
  simulate->add_option("--mode", c.mode, "factual | counterfactual");
  simulate->add_option("--n", c.n, "Number of samples");
  auto* sim_seed = seed_opt(simulate);

  auto* gformula = app.add_subcommand("gformula", "Evaluate the g-computation formula");
  common(gformula);
  plan_opt(gformula, true);
  gformula->add_option("--engine", c.engine, "mc | quad");
  gformula->add_option("--m", c.m, "Quadrature grid size");
  gformula->add_option("--nmax", c.n_max, "Maximum number of longitudinal events");
  gformula->add_option("--n", c.n, "Monte Carlo sample count");
  auto* gf_seed = seed_opt(gformula);

  auto* verify_cmd = app.add_subcommand("verify", "Compare oracle, MC and quadrature");
  common(verify_cmd);
  plan_opt(verify_cmd, true);
  verify_cmd->add_option("--oracle-n", c.oracle_n, "Counterfactual oracle samples");
  verify_cmd->add_option("--mc-n", c.mc_n, "Monte Carlo formula samples");
  verify_cmd->add_option("--m", c.m, "Quadrature grid size");
  verify_cmd->add_option("--nmax", c.n_max, "Maximum number of longitudinal events");
  verify_cmd->add_option("--format", c.format, "json | csv");
  auto* ver_seed = seed_opt(verify_cmd);

  auto* mass = app.add_subcommand("mass", "No-explosion mass check");
  common(mass);
  plan_opt(mass, true);
  mass->add_option("--m", c.m, "Quadrature grid size");
  mass->add_option("--nmax", c.n_max, "Maximum number of longitudinal events");

  auto* bcurve = app.add_subcommand("bcurve", "Evaluate b(sigma) on a grid of sigmas");
  common(bcurve);
  plan_opt(bcurve, true);
  bcurve->add_option("--m", c.m, "Quadrature grid size");
  bcurve->add_option("--nmax", c.n_max, "Maximum number of longitudinal events");
  bcurve->add_option("--sigmas", c.sigmas, "Comma-separated sigma values")->delimiter(',');

  // The mass check defaults to a coarse grid with a deep event budget.
  mass->preparse_callback([&](std::size_t) {
    c.m = 16;
    c.n_max = 8;
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  auto seeded = [&](CLI::Option* o) {
    if (o->count() > 0) c.seed = seed;
  };
  seeded(sim_seed);
  seeded(gf_seed);
  seeded(ver_seed);

  try {
    if (simulate->parsed()) {
      c.command = "simulate";
      return cmd_simulate(c, out, err);
    }
    if (gformula->parsed()) {
      c.command = "gformula";
      return cmd_gformula(c, out, err);
    }
    if (verify_cmd->parsed()) {
      c.command = "verify";
      return cmd_verify(c, out, err);
    }
    if (mass->parsed()) {
      c.command = "mass";
      return cmd_mass(c, out, err);
    }
    c.command = "bcurve";
    return cmd_bcurve(c, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const PlanStateError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace gct::cli
