#include "lakecausal/causal/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "lakecausal/core/error.hpp"

namespace lakecausal::causal {
namespace {

const std::vector<ParentLink> kNoParents;

bool link_order(const ParentLink& a, const ParentLink& b) {
  return std::pair(index_of(a.var), a.lag) < std::pair(index_of(b.var), b.lag);
}

}  // namespace

const std::vector<ParentLink>& CausalGraph::parents(VariableId target) const {
  const auto it = targets.find(target);
  return it == targets.end() ? kNoParents : it->second;
}

void CausalGraph::sort_links() {
  for (auto& [target, links] : targets) std::sort(links.begin(), links.end(), link_order);
}

void CausalGraph::validate() const {
  if (tau_max < 1) throw DomainError("graph tau_max must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("graph alpha must lie in (0, 1)");
  for (const auto& [target, links] : targets) {
    if (is_context(target)) {
      throw DomainError("context variable " + std::string(to_string(target)) + " cannot be a target");
    }
    std::set<std::pair<std::size_t, int>> seen;
    for (const auto& link : links) {
      const std::string name(to_string(link.var));
      if (link.lag < 0 || link.lag > tau_max) throw DomainError("link " + name + " lag outside 0..tau_max");
      if (is_context(link.var) && link.lag != 0) throw DomainError("context link " + name + " must have lag 0");
      if (link.var == target && link.lag == 0) throw DomainError("self link at lag 0");
      if (!(link.p_value >= 0.0 && link.p_value <= alpha)) {
        throw DomainError("link " + name + " has p-value above alpha");
      }
      if (!(link.strength >= -1.0 && link.strength <= 1.0)) {
        throw DomainError("link " + name + " strength outside [-1, 1]");
      }
      if (!seen.insert({index_of(link.var), link.lag}).second) throw DomainError("duplicate link " + name);
    }
  }
}

nlohmann::ordered_json graph_to_json(const CausalGraph& g, const nlohmann::ordered_json& extra_config) {
  CausalGraph sorted = g;
  sorted.sort_links();
  nlohmann::ordered_json config;
  config["tau_max"] = g.tau_max;
  config["alpha"] = g.alpha;
  if (extra_config.is_object()) {
    for (const auto& [key, value] : extra_config.items()) {
      if (key != "tau_max" && key != "alpha") config[key] = value;
    }
  }
  nlohmann::ordered_json targets = nlohmann::ordered_json::object();
  for (const auto& [target, links] : sorted.targets) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& link : links) {
      arr.push_back({{"var", to_string(link.var)},
                     {"lag", link.lag},
                     {"p", link.p_value},
                     {"strength", link.strength}});
    }
    targets[std::string(to_string(target))] = std::move(arr);
  }
  return {{"config", std::move(config)}, {"targets", std::move(targets)}};
}

CausalGraph graph_from_json(const nlohmann::json& doc) {
  CausalGraph g;
  try {
    const auto& config = doc.at("config");
    g.tau_max = config.at("tau_max").get<int>();
    g.alpha = config.at("alpha").get<double>();
    for (const auto& [name, links] : doc.at("targets").items()) {
      const auto target = parse_variable(name);
      if (!target) throw DomainError("unknown target variable " + name);
      auto& out = g.targets[*target];
      for (const auto& link : links) {
        const auto var_name = link.at("var").get<std::string>();
        const auto var = parse_variable(var_name);
        if (!var) throw DomainError("unknown parent variable " + var_name);
        out.push_back({*var, link.at("lag").get<int>(), link.at("p").get<double>(),
                       link.at("strength").get<double>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("graph", 0, "", e.what());
  }
  g.sort_links();
  g.validate();
  return g;
}

void save_graph(const CausalGraph& g, const std::filesystem::path& path,
                const nlohmann::ordered_json& extra_config) {
  g.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << graph_to_json(g, extra_config).dump(2) << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

CausalGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), 0, "", e.what());
  }
  try {
    return graph_from_json(doc);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), 0, e.field(), e.what());
  }
}

}  // namespace lakecausal::causal
