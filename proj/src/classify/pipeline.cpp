#include "lakecausal/classify/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "lakecausal/causal/discovery.hpp"
#include "lakecausal/causal/panel.hpp"
#include "lakecausal/core/error.hpp"

namespace lakecausal::classify {
namespace {

bool same(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

causal::CausalGraph discover(const Dataset& train, const PipelineConfig& cfg, PipelineTrace* trace) {
  causal::DiscoveryConfig dcfg = cfg.discovery;
  dcfg.targets = {cfg.target};
  dcfg.jobs = cfg.jobs;
  auto run = [&](const Dataset& ds) {
    if (trace) ++trace->discovery_calls;
    return causal::discover_parents(causal::pool_lakes(ds, dcfg), dcfg);
  };
  if (cfg.graph_source == GraphSource::Global) return run(train);

  causal::CausalGraph merged;
  merged.tau_max = dcfg.tau_max;
  merged.alpha = dcfg.alpha;
  std::map<std::pair<std::size_t, int>, causal::ParentLink> links;
  for (Region r : kRegions) {
    if (!train.has_region(r)) continue;
    const auto g = run(train.in_region(r));
    for (const auto& link : g.parents(cfg.target)) {
      const auto key = std::pair(index_of(link.var), link.lag);
      const auto it = links.find(key);
      if (it == links.end() || link.p_value < it->second.p_value) links[key] = link;
    }
  }
  auto& out = merged.targets[cfg.target];
  for (const auto& [key, link] : links) out.push_back(link);
  merged.sort_links();
  return merged;
}

std::vector<features::ChannelMatrix> channel_inputs(const Dataset& ds, const std::vector<features::ChannelSpec>& spec) {
  std::vector<features::ChannelMatrix> out;
  out.reserve(ds.size());
  for (const auto& lake : ds.lakes()) out.push_back(features::build_channels(lake, spec));
  return out;
}

std::vector<Label> labels_of(const Dataset& ds) {
  std::vector<Label> out;
  for (const auto& lake : ds.lakes()) out.push_back(lake.label);
  return out;
}

}  // namespace

std::string_view to_string(Variant v) noexcept { return v == Variant::Causal ? "causal" : "baseline"; }

std::string_view to_string(GraphSource g) noexcept { return g == GraphSource::Global ? "global" : "per_region"; }

std::optional<Variant> parse_variant(std::string_view s) noexcept {
  if (s == "causal") return Variant::Causal;
  if (s == "baseline") return Variant::Baseline;
  return std::nullopt;
}

std::optional<GraphSource> parse_graph_source(std::string_view s) noexcept {
  if (s == "global") return GraphSource::Global;
  if (s == "per_region") return GraphSource::PerRegion;
  return std::nullopt;
}

void PipelineConfig::validate() const {
  if (is_context(target)) throw ConfigError("the classification target must be an observed variable");
  discovery.validate();
  transform.validate();
  if (alphas.empty()) throw ConfigError("alpha grid must not be empty");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("alpha grid values must be positive and finite");
  }
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

bool operator==(const FittedPipeline& a, const FittedPipeline& b) {
  return a.variant == b.variant && a.target == b.target && a.graph == b.graph && a.channels == b.channels &&
         a.transform == b.transform && a.model.classes == b.model.classes && same(a.model.weights, b.model.weights) &&
         same(a.model.intercepts, b.model.intercepts) && same(a.model.mean, b.model.mean) &&
         same(a.model.scale, b.model.scale) && a.model.chosen_alpha == b.model.chosen_alpha &&
         a.model.alphas == b.model.alphas && a.model.loo_errors == b.model.loo_errors;
}

FittedPipeline fit_pipeline(const Dataset& train, const PipelineConfig& cfg, PipelineTrace* trace) {
  cfg.validate();
  if (train.size() < 2) throw InsufficientSamples("training set needs at least two lakes");
  if (trace) {
    for (const auto& lake : train.lakes()) trace->training_units.push_back(lake.unit_key());
  }

  FittedPipeline fitted;
  fitted.variant = cfg.variant;
  fitted.target = cfg.target;
  if (cfg.variant == Variant::Causal) {
    fitted.graph = discover(train, cfg, trace);
    fitted.channels = features::causal_channel_specs(*fitted.graph, cfg.target, cfg.include_dummies);
    if (fitted.channels.empty()) {
      fitted.channels.push_back({cfg.target, 0});
      fitted.warnings.push_back("no usable causal parent of " + std::string(to_string(cfg.target)) +
                                "; falling back to the target itself at lag 0");
    }
  } else {
    fitted.channels = features::baseline_channel_specs();
  }

  features::TransformConfig tcfg = cfg.transform;
  tcfg.seed = cfg.seed;
  tcfg.jobs = cfg.jobs;
  const auto inputs = channel_inputs(train, fitted.channels);
  fitted.transform = features::fit_transform_params(inputs, tcfg);
  const Eigen::MatrixXd x = features::transform_all(inputs, fitted.transform, cfg.jobs);
  const auto y = labels_of(train);
  fitted.model = ridge_fit(x, y, cfg.alphas);
  return fitted;
}

Eigen::MatrixXd pipeline_features(const FittedPipeline& fitted, const Dataset& ds, int jobs) {
  const auto inputs = channel_inputs(ds, fitted.channels);
  return features::transform_all(inputs, fitted.transform, jobs);
}

std::vector<Label> pipeline_predict(const FittedPipeline& fitted, const Dataset& ds, int jobs) {
  if (ds.empty()) return {};
  return ridge_predict(pipeline_features(fitted, ds, jobs), fitted.model);
}

PipelineResult run_pipeline(const Dataset& train, const Dataset& test, const PipelineConfig& cfg,
                            PipelineTrace* trace) {
  ensure_disjoint(train, test);
  PipelineResult result;
  result.fitted = fit_pipeline(train, cfg, trace);
  result.predictions = pipeline_predict(result.fitted, test, cfg.jobs);
  return result;
}

nlohmann::ordered_json pipeline_to_json(const FittedPipeline& fitted, const nlohmann::ordered_json& config) {
  nlohmann::ordered_json channels = nlohmann::ordered_json::array();
  for (const auto& c : fitted.channels) channels.push_back({{"var", to_string(c.var)}, {"lag", c.lag}});
  nlohmann::ordered_json doc;
  doc["config"] = config.is_null() ? nlohmann::ordered_json::object() : config;
  doc["variant"] = to_string(fitted.variant);
  doc["target"] = to_string(fitted.target);
  doc["graph"] = fitted.graph ? causal::graph_to_json(*fitted.graph) : nlohmann::ordered_json(nullptr);
  doc["channels"] = channels;
  doc["warnings"] = fitted.warnings;
  doc["transform"] = features::params_to_json(fitted.transform);
  doc["model"] = model_to_json(fitted.model);
  return doc;
}

FittedPipeline pipeline_from_json(const nlohmann::json& doc) {
  FittedPipeline fitted;
  try {
    const auto variant = parse_variant(doc.at("variant").get<std::string>());
    const auto target = parse_variable(doc.at("target").get<std::string>());
    if (!variant || !target) throw ParseError("pipeline", 0, "variant", "unknown variant or target");
    fitted.variant = *variant;
    fitted.target = *target;
    if (!doc.at("graph").is_null()) fitted.graph = causal::graph_from_json(doc.at("graph"));
    for (const auto& c : doc.at("channels")) {
      const auto var = parse_variable(c.at("var").get<std::string>());
      if (!var) throw ParseError("pipeline", 0, "channels", "unknown variable " + c.at("var").get<std::string>());
      fitted.channels.push_back({*var, c.at("lag").get<int>()});
    }
    fitted.warnings = doc.at("warnings").get<std::vector<std::string>>();
    fitted.transform = features::params_from_json(doc.at("transform"));
    fitted.model = model_from_json(doc.at("model"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("pipeline", 0, "", e.what());
  }
  if (fitted.channels.size() != fitted.transform.num_channels ||
      fitted.transform.num_features() != fitted.model.num_features()) {
    throw DomainError("pipeline artifact: channel, transform and model sizes disagree");
  }
  return fitted;
}

void save_pipeline(const FittedPipeline& fitted, const std::filesystem::path& path,
                   const nlohmann::ordered_json& config) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << pipeline_to_json(fitted, config).dump(2) << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

FittedPipeline load_pipeline(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, "", e.what());
  }
  return pipeline_from_json(doc);
}

}  // namespace lakecausal::classify
