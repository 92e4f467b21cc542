#include "gct/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "gct/errors.hpp"

namespace gct {

RateTable::RateTable(std::size_t n_states, int cap_a, int cap_l, double fill)
    : n_states_(n_states),
      cap_a_(cap_a),
      cap_l_(cap_l),
      data_(n_states * static_cast<std::size_t>(cap_a + 1) * static_cast<std::size_t>(cap_l + 1),
            fill) {}

ScenarioModel::ScenarioModel(double horizon_, std::vector<LatentState> latent_, int cap_a_,
                             int cap_l_, std::vector<double> y_support_)
    : horizon(horizon_),
      latent(std::move(latent_)),
      cap_a(cap_a_),
      cap_l(cap_l_),
      rate_a(latent.size(), cap_a_, cap_l_),
      rate_l(latent.size(), cap_a_, cap_l_),
      y_support(std::move(y_support_)),
      y_table_(latent.size() * static_cast<std::size_t>(cap_a_ + 1) *
                   static_cast<std::size_t>(cap_l_ + 1) * y_support.size(),
               0.0) {
  if (cap_a_ < 0 || cap_l_ < 0) throw ValidationError("count caps must be nonnegative");
}

std::size_t ScenarioModel::outcome_offset(std::size_t u, int ca, int cl) const {
  return ((static_cast<std::size_t>(ca) * static_cast<std::size_t>(cap_l + 1) +
           static_cast<std::size_t>(cl)) * n_states() + u) * n_outcomes();
}

std::span<const double> ScenarioModel::outcome_row(std::size_t u, EventCounts c) const {
  return {y_table_.data() + outcome_offset(u, capped_a(c.actions), capped_l(c.longitudinal)),
          n_outcomes()};
}

void ScenarioModel::set_outcome_row(std::size_t u, int ca, int cl, std::span<const double> probs) {
  if (probs.size() != n_outcomes()) throw ValidationError("outcome row has the wrong length");
  if (u >= n_states() || ca < 0 || ca > cap_a || cl < 0 || cl > cap_l) {
    throw ValidationError("outcome row index out of range");
  }
  std::copy(probs.begin(), probs.end(), y_table_.begin() + static_cast<std::ptrdiff_t>(outcome_offset(u, ca, cl)));
}

std::vector<double> ScenarioModel::prior() const {
  std::vector<double> p;
  p.reserve(latent.size());
  for (const auto& s : latent) p.push_back(s.prob);
  return p;
}

bool ScenarioModel::no_unmeasured_confounding() const {
  for (int ca = 0; ca <= cap_a; ++ca) {
    for (int cl = 0; cl <= cap_l; ++cl) {
      auto col = rate_a.column(ca, cl);
      if (!std::all_of(col.begin(), col.end(), [&](double r) { return r == col.front(); })) {
        return false;
      }
    }
  }
  return true;
}

double ScenarioModel::max_longitudinal_rate() const {
  auto v = rate_l.values();
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

std::size_t ScenarioModel::index_of_outcome(double y) const {
  auto it = std::find(y_support.begin(), y_support.end(), y);
  if (it == y_support.end()) throw DomainError("value not in the outcome support");
  return static_cast<std::size_t>(it - y_support.begin());
}

void ScenarioModel::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("tau must be positive and finite");
  if (latent.empty()) throw ValidationError("latent support must not be empty");
  if (y_support.empty()) throw ValidationError("outcome support must not be empty");
  if (n_max < 1) throw ValidationError("n_max must be at least 1");
  if (cap_a < 0 || cap_l < 0) throw ValidationError("count caps must be nonnegative");
  double mass = 0.0;
  for (const auto& s : latent) {
    if (!(s.prob >= 0.0) || !std::isfinite(s.prob)) throw ValidationError("latent probabilities must be nonnegative");
    mass += s.prob;
  }
  if (std::abs(mass - 1.0) > 1e-12) throw ValidationError("latent probabilities must sum to 1");
  for (std::size_t i = 0; i < latent.size(); ++i) {
    for (std::size_t j = i + 1; j < latent.size(); ++j) {
      if (latent[i].value == latent[j].value) throw ValidationError("latent values must be distinct");
    }
  }
  for (std::size_t i = 0; i < y_support.size(); ++i) {
    for (std::size_t j = i + 1; j < y_support.size(); ++j) {
      if (y_support[i] == y_support[j]) throw ValidationError("outcome support values must be distinct");
    }
  }
  const std::size_t cells = latent.size() * static_cast<std::size_t>(cap_a + 1) * static_cast<std::size_t>(cap_l + 1);
  for (const RateTable* t : {&rate_a, &rate_l}) {
    if (t->values().size() != cells || t->n_states() != latent.size()) {
      throw ValidationError("rate table shape does not match latent support and caps");
    }
    for (double r : t->values()) {
      if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("rates must be finite and nonnegative");
    }
  }
  if (y_table_.size() != cells * y_support.size()) throw ValidationError("outcome table has the wrong shape");
  for (std::size_t row = 0; row < cells; ++row) {
    double total = 0.0;
    for (std::size_t k = 0; k < y_support.size(); ++k) {
      const double p = y_table_[row * y_support.size() + k];
      if (!(p >= 0.0)) throw ValidationError("outcome probabilities must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("every outcome table row must sum to 1");
  }
  for (const double tol : {tolerances.oracle_quad, tolerances.oracle_mc, tolerances.mc_quad,
                           tolerances.confounding_floor}) {
    if (!(tol >= 0.0)) throw ValidationError("tolerances must be nonnegative");
  }
}

nlohmann::json to_json(const ScenarioModel& model) {
  using nlohmann::json;
  json u = json::array();
  for (const auto& s : model.latent) u.push_back({{"value", s.value}, {"prob", s.prob}});
  auto rates = [&](const RateTable& t) {
    json by_u = json::array();
    for (std::size_t k = 0; k < model.n_states(); ++k) {
      json by_a = json::array();
      for (int ca = 0; ca <= model.cap_a; ++ca) {
        json by_l = json::array();
        for (int cl = 0; cl <= model.cap_l; ++cl) by_l.push_back(t.at(k, ca, cl));
        by_a.push_back(std::move(by_l));
      }
      by_u.push_back(std::move(by_a));
    }
    return by_u;
  };
  json y_table = json::array();
  for (std::size_t k = 0; k < model.n_states(); ++k) {
    json by_a = json::array();
    for (int ca = 0; ca <= model.cap_a; ++ca) {
      json by_l = json::array();
      for (int cl = 0; cl <= model.cap_l; ++cl) {
        auto row = model.outcome_row(k, {ca, cl});
        by_l.push_back(std::vector<double>(row.begin(), row.end()));
      }
      by_a.push_back(std::move(by_l));
    }
    y_table.push_back(std::move(by_a));
  }
  json j = {{"tau", model.horizon},
            {"u", u},
            {"rate_a", rates(model.rate_a)},
            {"rate_l", rates(model.rate_l)},
            {"caps", {{"a", model.cap_a}, {"l", model.cap_l}}},
            {"y_support", model.y_support},
            {"y_table", y_table},
            {"n_max", model.n_max},
            {"tolerances",
             {{"oracle_quad", model.tolerances.oracle_quad},
              {"oracle_mc", model.tolerances.oracle_mc},
              {"mc_quad", model.tolerances.mc_quad},
              {"confounding_floor", model.tolerances.confounding_floor}}}};
  if (!model.id.empty()) j["id"] = model.id;
  return j;
}

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("scenario is missing \"") + key + "\"");
  return j.at(key);
}

double number(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number()) throw ValidationError(what + " must be a number");
  return j.get<double>();
}

int count(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ValidationError(what + " must be an integer");
  return j.get<int>();
}

const nlohmann::json& sized_array(const nlohmann::json& j, std::size_t n, const std::string& what) {
  if (!j.is_array() || j.size() != n) {
    throw ValidationError(what + " must be an array of length " + std::to_string(n));
  }
  return j;
}

void read_rates(const nlohmann::json& j, const ScenarioModel& m, RateTable& out, const std::string& name) {
  sized_array(j, m.n_states(), name);
  for (std::size_t k = 0; k < m.n_states(); ++k) {
    sized_array(j[k], static_cast<std::size_t>(m.cap_a + 1), name + "[u]");
    for (int ca = 0; ca <= m.cap_a; ++ca) {
      const auto& row = sized_array(j[k][static_cast<std::size_t>(ca)], static_cast<std::size_t>(m.cap_l + 1),
                                    name + "[u][n_a]");
      for (int cl = 0; cl <= m.cap_l; ++cl) out.at(k, ca, cl) = number(row[static_cast<std::size_t>(cl)], name);
    }
  }
}

}  // namespace

namespace {

ScenarioModel parse_scenario(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("scenario must be a JSON object");
  const double tau = number(require(j, "tau"), "tau");
  std::vector<LatentState> latent;
  const auto& u = require(j, "u");
  if (!u.is_array()) throw ValidationError("\"u\" must be an array");
  for (const auto& s : u) {
    if (!s.is_object()) throw ValidationError("latent entries must be objects");
    latent.push_back({number(require(s, "value"), "u.value"), number(require(s, "prob"), "u.prob")});
  }
  const auto& caps = require(j, "caps");
  const int cap_a = count(require(caps, "a"), "caps.a");
  const int cap_l = count(require(caps, "l"), "caps.l");
  const auto& ys = require(j, "y_support");
  if (!ys.is_array()) throw ValidationError("\"y_support\" must be an array");
  std::vector<double> y_support;
  for (const auto& y : ys) y_support.push_back(number(y, "y_support entry"));

  ScenarioModel m(tau, std::move(latent), cap_a, cap_l, std::move(y_support));
  m.n_max = count(require(j, "n_max"), "n_max");
  if (j.contains("id") && j.at("id").is_string()) m.id = j.at("id").get<std::string>();
  read_rates(require(j, "rate_a"), m, m.rate_a, "rate_a");
  read_rates(require(j, "rate_l"), m, m.rate_l, "rate_l");

  const auto& yt = sized_array(require(j, "y_table"), m.n_states(), "y_table");
  for (std::size_t k = 0; k < m.n_states(); ++k) {
    sized_array(yt[k], static_cast<std::size_t>(cap_a + 1), "y_table[u]");
    for (int ca = 0; ca <= cap_a; ++ca) {
      sized_array(yt[k][static_cast<std::size_t>(ca)], static_cast<std::size_t>(cap_l + 1), "y_table[u][n_a]");
      for (int cl = 0; cl <= cap_l; ++cl) {
        const auto& row = sized_array(yt[k][static_cast<std::size_t>(ca)][static_cast<std::size_t>(cl)],
                                      m.n_outcomes(), "y_table row");
        std::vector<double> probs;
        for (const auto& p : row) probs.push_back(number(p, "y_table entry"));
        m.set_outcome_row(k, ca, cl, probs);
      }
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (t.contains("oracle_quad")) m.tolerances.oracle_quad = number(t.at("oracle_quad"), "tolerances.oracle_quad");
    if (t.contains("oracle_mc")) m.tolerances.oracle_mc = number(t.at("oracle_mc"), "tolerances.oracle_mc");
    if (t.contains("mc_quad")) m.tolerances.mc_quad = number(t.at("mc_quad"), "tolerances.mc_quad");
    if (t.contains("confounding_floor")) {
      m.tolerances.confounding_floor = number(t.at("confounding_floor"), "tolerances.confounding_floor");
    }
  }
  m.validate();
  return m;
}

}  // namespace

ScenarioModel scenario_from_json(const nlohmann::json& j) {
  try {
    return parse_scenario(j);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed scenario: ") + e.what());
  }
}

ScenarioModel load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("scenario file " + path.string() + " is not valid JSON: " + e.what());
  }
  ScenarioModel m = scenario_from_json(j);
  if (m.id.empty()) m.id = path.stem().string();
  return m;
}

}  // namespace gct
