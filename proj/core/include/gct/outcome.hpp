#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace gct {

/// Categorical distribution over a finite outcome support. Sub-normalized
/// results carry the missing probability in `leftover`.
struct OutcomeDist {
  std::vector<double> support;
  std::vector<double> probs;
  double leftover = 0.0;

  [[nodiscard]] double total() const;
};

nlohmann::json to_json(const OutcomeDist& dist);

}  // namespace gct
