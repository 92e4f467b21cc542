#include "gct/outcome.hpp"

#include <numeric>

#include <nlohmann/json.hpp>

namespace gct {

double OutcomeDist::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

nlohmann::json to_json(const OutcomeDist& dist) {
  return {{"support", dist.support}, {"probs", dist.probs}};
}

}  // namespace gct
