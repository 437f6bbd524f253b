#include "lakecausal/app/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "lakecausal/core/error.hpp"

extern char** environ;

namespace lakecausal::app {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kPrefix = "LAKECAUSAL_";

std::vector<std::string> region_names(const std::vector<Region>& regions) {
  std::vector<std::string> out;
  for (Region r : regions) out.emplace_back(to_string(r));
  return out;
}

std::vector<Region> parse_regions(const nlohmann::json& j) {
  std::vector<Region> out;
  for (const auto& name : j) {
    const auto r = parse_region(name.get<std::string>());
    if (!r) throw ConfigError("unknown region " + name.get<std::string>());
    out.push_back(*r);
  }
  return out;
}

VariableId parse_var(const nlohmann::json& j) {
  const auto v = parse_variable(j.get<std::string>());
  if (!v) throw ConfigError("unknown variable " + j.get<std::string>());
  return *v;
}

// Every key of `obj` must be one of `allowed`.
void check_keys(const nlohmann::json& obj, const ojson& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

// Overlays `patch` onto `target`, recursing into objects; unknown keys throw.
void merge_strict(ojson& target, const nlohmann::json& patch, const std::string& where) {
  check_keys(patch, target, where);
  for (const auto& [key, value] : patch.items()) {
    if (target[key].is_object()) {
      merge_strict(target[key], value, where + ": " + key);
    } else {
      target[key] = value;
    }
  }
}

RunConfig from_json(const nlohmann::json& doc) {
  const ojson shape = to_json(RunConfig{});
  check_keys(doc, shape, "config");
  RunConfig cfg;
  cfg.seed = doc.at("seed").get<std::uint64_t>();
  cfg.jobs = doc.at("jobs").get<int>();

  const auto& pp = doc.at("preprocess");
  auto& p = cfg.preprocess;
  p.ndwi_threshold_s2 = pp.at("ndwi_threshold_s2").get<double>();
  p.ndwi_threshold_l8 = pp.at("ndwi_threshold_l8").get<double>();
  p.cloud_swir_threshold = pp.at("cloud_swir_threshold").get<double>();
  p.cloud_cirrus_threshold = pp.at("cloud_cirrus_threshold").get<double>();
  p.median_window_days = pp.at("median_window_days").get<int>();
  p.zenith_max_deg = pp.at("zenith_max_deg").get<double>();
  p.spike_mad_factor = pp.at("spike_mad_factor").get<double>();
  p.mad_floor = pp.at("mad_floor").get<double>();
  p.spike_neighbors = pp.at("spike_neighbors").get<int>();
  p.median_before_interpolation = pp.at("median_before_interpolation").get<bool>();

  const auto& dd = doc.at("discovery");
  auto& d = cfg.discovery;
  d.tau_max = dd.at("tau_max").get<int>();
  d.alpha = dd.at("alpha").get<double>();
  d.targets.clear();
  for (const auto& t : dd.at("targets")) d.targets.push_back(parse_var(t));
  check_keys(dd.at("use_context"), shape["discovery"]["use_context"], "discovery.use_context");
  d.use_context.s_dummy = dd.at("use_context").at("s_dummy").get<bool>();
  d.use_context.r_dummy = dd.at("use_context").at("r_dummy").get<bool>();
  d.use_context.t_dummy = dd.at("use_context").at("t_dummy").get<bool>();
  d.max_conds = dd.at("max_conds").get<int>();
  d.jobs = cfg.jobs;

  const auto& tt = doc.at("transform");
  cfg.transform.features_budget = tt.at("features_budget").get<int>();
  cfg.transform.max_dilations_per_kernel = tt.at("max_dilations_per_kernel").get<int>();
  cfg.transform.seed = cfg.seed;
  cfg.transform.jobs = cfg.jobs;

  const auto& cc = doc.at("classify");
  auto& c = cfg.classify;
  const auto variant = classify::parse_variant(cc.at("variant").get<std::string>());
  if (!variant) throw ConfigError("classify.variant must be causal or baseline");
  c.variant = *variant;
  const auto source = classify::parse_graph_source(cc.at("graph_source").get<std::string>());
  if (!source) throw ConfigError("classify.graph_source must be global or per_region");
  c.graph_source = *source;
  c.target = parse_var(cc.at("target"));
  c.alphas = cc.at("alphas").get<std::vector<double>>();
  c.include_dummies = cc.at("include_dummies").get<bool>();

  const auto& ee = doc.at("eval");
  const auto protocol = eval::parse_protocol(ee.at("protocol").get<std::string>());
  if (!protocol) throw ConfigError("eval.protocol must be global, region_id or region_ood");
  cfg.eval.protocol = *protocol;
  cfg.eval.train_ratio = ee.at("train_ratio").get<double>();
  cfg.eval.repeats = ee.at("repeats").get<int>();
  cfg.eval.regions = parse_regions(ee.at("regions"));

  const auto& ss = doc.at("synth");
  auto& s = cfg.synth;
  s.lakes_per_class = ss.at("lakes_per_class").get<int>();
  s.regions = parse_regions(ss.at("regions"));
  s.year = ss.at("year").get<int>();
  s.spurious_strength = ss.at("spurious_strength").get<double>();
  check_keys(ss.at("noise_scale"), shape["synth"]["noise_scale"], "synth.noise_scale");
  for (auto v : kObservedVariables) s.noise_scale[index_of(v)] = ss.at("noise_scale").at(std::string(to_string(v)));
  s.seed = cfg.seed;

  const auto& pa = doc.at("paths");
  auto& paths = cfg.paths;
  paths.data = pa.at("data").get<std::string>();
  paths.raw = pa.at("raw").get<std::string>();
  paths.meta = pa.at("meta").get<std::string>();
  paths.graph = pa.at("graph").get<std::string>();
  paths.model = pa.at("model").get<std::string>();
  paths.report = pa.at("report").get<std::string>();
  paths.out_dir = pa.at("out_dir").get<std::string>();
  return cfg;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

void RunConfig::validate() const {
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  preprocess.validate();
  pipeline_config().validate();
  eval_config().validate();
  synth.validate();
}

classify::PipelineConfig RunConfig::pipeline_config() const {
  classify::PipelineConfig p;
  p.variant = classify.variant;
  p.graph_source = classify.graph_source;
  p.target = classify.target;
  p.discovery = discovery;
  p.discovery.jobs = jobs;
  p.transform = transform;
  p.alphas = classify.alphas;
  p.include_dummies = classify.include_dummies;
  p.seed = seed;
  p.jobs = jobs;
  return p;
}

eval::EvalConfig RunConfig::eval_config() const {
  eval::EvalConfig e;
  e.pipeline = pipeline_config();
  e.train_ratio = eval.train_ratio;
  e.repeats = eval.repeats;
  e.seed = seed;
  e.jobs = jobs;
  e.regions = eval.regions;
  return e;
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  const auto& p = cfg.preprocess;
  const auto& d = cfg.discovery;
  std::vector<std::string> targets;
  for (auto t : d.targets) targets.emplace_back(to_string(t));
  ojson noise = ojson::object();
  for (auto v : kObservedVariables) noise[std::string(to_string(v))] = cfg.synth.noise_scale[index_of(v)];
  ojson doc;
  doc["seed"] = cfg.seed;
  doc["jobs"] = cfg.jobs;
  doc["preprocess"] = {{"ndwi_threshold_s2", p.ndwi_threshold_s2},
                       {"ndwi_threshold_l8", p.ndwi_threshold_l8},
                       {"cloud_swir_threshold", p.cloud_swir_threshold},
                       {"cloud_cirrus_threshold", p.cloud_cirrus_threshold},
                       {"median_window_days", p.median_window_days},
                       {"zenith_max_deg", p.zenith_max_deg},
                       {"spike_mad_factor", p.spike_mad_factor},
                       {"mad_floor", p.mad_floor},
                       {"spike_neighbors", p.spike_neighbors},
                       {"median_before_interpolation", p.median_before_interpolation}};
  doc["discovery"] = {{"tau_max", d.tau_max},
                      {"alpha", d.alpha},
                      {"targets", targets},
                      {"use_context",
                       {{"s_dummy", d.use_context.s_dummy},
                        {"r_dummy", d.use_context.r_dummy},
                        {"t_dummy", d.use_context.t_dummy}}},
                      {"max_conds", d.max_conds}};
  doc["transform"] = {{"features_budget", cfg.transform.features_budget},
                      {"max_dilations_per_kernel", cfg.transform.max_dilations_per_kernel}};
  doc["classify"] = {{"variant", classify::to_string(cfg.classify.variant)},
                     {"graph_source", classify::to_string(cfg.classify.graph_source)},
                     {"target", to_string(cfg.classify.target)},
                     {"alphas", cfg.classify.alphas},
                     {"include_dummies", cfg.classify.include_dummies}};
  doc["eval"] = {{"protocol", eval::to_string(cfg.eval.protocol)},
                 {"train_ratio", cfg.eval.train_ratio},
                 {"repeats", cfg.eval.repeats},
                 {"regions", region_names(cfg.eval.regions)}};
  doc["synth"] = {{"lakes_per_class", cfg.synth.lakes_per_class},
                  {"regions", region_names(cfg.synth.regions)},
                  {"year", cfg.synth.year},
                  {"spurious_strength", cfg.synth.spurious_strength},
                  {"noise_scale", noise}};
  doc["paths"] = {{"data", cfg.paths.data},     {"raw", cfg.paths.raw},       {"meta", cfg.paths.meta},
                  {"graph", cfg.paths.graph},   {"model", cfg.paths.model},   {"report", cfg.paths.report},
                  {"out_dir", cfg.paths.out_dir}};
  return doc;
}

void apply_json(RunConfig& cfg, const nlohmann::json& patch, const std::string& source) {
  ojson merged = to_json(cfg);
  try {
    merge_strict(merged, patch, source);
    RunConfig next = from_json(merged);
    cfg = std::move(next);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind(source, 0) == 0) throw;
    throw ConfigError(source + ": " + what);
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open config file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  apply_json(cfg, doc, path.string());
}

void apply_environment(RunConfig& cfg, const std::map<std::string, std::string>& env) {
  nlohmann::json patch = nlohmann::json::object();
  for (const auto& [name, raw] : env) {
    if (name.rfind(kPrefix, 0) != 0) continue;
    const std::string rest = name.substr(kPrefix.size());
    if (rest == "SIMD") continue;
    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    const auto split = rest.find("__");
    if (split == std::string::npos) {
      patch[lower(rest)] = value;
    } else {
      patch[lower(rest.substr(0, split))][lower(rest.substr(split + 2))] = value;
    }
  }
  if (!patch.empty()) apply_json(cfg, patch, "environment");
}

std::map<std::string, std::string> current_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq != std::string::npos) out[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return out;
}

}  // namespace lakecausal::app
