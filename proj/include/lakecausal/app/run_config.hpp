#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lakecausal/classify/pipeline.hpp"
#include "lakecausal/eval/protocols.hpp"
#include "lakecausal/preprocess/preprocess.hpp"
#include "lakecausal/synth/generator.hpp"

namespace lakecausal::app {

struct ClassifySection {
  classify::Variant variant = classify::Variant::Causal;
  classify::GraphSource graph_source = classify::GraphSource::Global;
  VariableId target = VariableId::HvAnom;
  std::vector<double> alphas = classify::default_alpha_grid();
  bool include_dummies = false;
};

struct EvalSection {
  eval::Protocol protocol = eval::Protocol::Global;
  double train_ratio = 0.8;
  int repeats = 1;
  std::vector<Region> regions;  // empty: every region present
};

struct PathsSection {
  std::string data;
  std::string raw;
  std::string meta;
  std::string graph;
  std::string model;
  std::string report;
  std::string out_dir;
};

// Everything a subcommand can be told. Layering, later wins: defaults, JSON
// config file, LAKECAUSAL_* environment variables, command-line flags.
struct RunConfig {
  std::uint64_t seed = 0;
  int jobs = 1;
  preprocess::PreprocessConfig preprocess;
  causal::DiscoveryConfig discovery;
  features::TransformConfig transform;
  ClassifySection classify;
  EvalSection eval;
  synth::SynthConfig synth;
  PathsSection paths;

  // Validates every section; throws ConfigError.
  void validate() const;

  classify::PipelineConfig pipeline_config() const;
  eval::EvalConfig eval_config() const;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);

// Applies a (possibly partial) JSON object on top of cfg. Unknown sections
// or keys and wrongly typed values throw ConfigError naming `source`.
void apply_json(RunConfig& cfg, const nlohmann::json& patch, const std::string& source);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

// LAKECAUSAL_SEED, LAKECAUSAL_JOBS and LAKECAUSAL_<SECTION>__<KEY> (case
// insensitive key names). Values are read as JSON when they parse, else as
// strings. LAKECAUSAL_SIMD is left to the kernel dispatcher. Any other
// LAKECAUSAL_ variable is an error.
void apply_environment(RunConfig& cfg, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> current_environment();

}  // namespace lakecausal::app
