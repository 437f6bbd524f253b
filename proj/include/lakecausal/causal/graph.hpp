#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lakecausal/causal/config.hpp"

namespace lakecausal::causal {

struct ParentLink {
  VariableId var = VariableId::HvAnom;
  int lag = 0;
  double p_value = 0.0;
  double strength = 0.0;

  friend bool operator==(const ParentLink&, const ParentLink&) = default;
};

// Per-target parent sets. Links are kept sorted by (variable, lag).
struct CausalGraph {
  int tau_max = 7;
  double alpha = 0.01;
  std::map<VariableId, std::vector<ParentLink>> targets;

  const std::vector<ParentLink>& parents(VariableId target) const;
  void sort_links();
  // Throws DomainError when a lag exceeds tau_max, p exceeds alpha, a context
  // variable is a target, or a link is duplicated.
  void validate() const;

  friend bool operator==(const CausalGraph&, const CausalGraph&) = default;
};

nlohmann::ordered_json graph_to_json(const CausalGraph& g, const nlohmann::ordered_json& extra_config = {});
CausalGraph graph_from_json(const nlohmann::json& doc);

void save_graph(const CausalGraph& g, const std::filesystem::path& path,
                const nlohmann::ordered_json& extra_config = {});
CausalGraph load_graph(const std::filesystem::path& path);

}  // namespace lakecausal::causal
