#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lakecausal/causal/config.hpp"
#include "lakecausal/causal/graph.hpp"
#include "lakecausal/classify/ridge.hpp"
#include "lakecausal/core/dataset.hpp"
#include "lakecausal/features/channels.hpp"
#include "lakecausal/features/transform.hpp"

namespace lakecausal::classify {

enum class Variant { Causal, Baseline };
enum class GraphSource { Global, PerRegion };

std::string_view to_string(Variant v) noexcept;
std::string_view to_string(GraphSource g) noexcept;
std::optional<Variant> parse_variant(std::string_view s) noexcept;
std::optional<GraphSource> parse_graph_source(std::string_view s) noexcept;

struct PipelineConfig {
  Variant variant = Variant::Causal;
  GraphSource graph_source = GraphSource::Global;
  VariableId target = VariableId::HvAnom;
  causal::DiscoveryConfig discovery;
  features::TransformConfig transform;
  std::vector<double> alphas = default_alpha_grid();
  // Feed region / season dummies that were found as parents to the classifier.
  bool include_dummies = false;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

// Counters that let tests see what a fit touched.
struct PipelineTrace {
  std::size_t discovery_calls = 0;
  std::vector<std::string> training_units;  // unit keys seen by any fitting step
};

struct FittedPipeline {
  Variant variant = Variant::Causal;
  VariableId target = VariableId::HvAnom;
  std::optional<causal::CausalGraph> graph;  // empty for the baseline
  std::vector<features::ChannelSpec> channels;
  features::TransformParams transform;
  RidgeModel model;
  std::vector<std::string> warnings;

  friend bool operator==(const FittedPipeline& a, const FittedPipeline& b);
};

// Everything is fitted on `train` alone. The causal variant discovers the
// target's parents (one pooled graph, or the union of per-region graphs), and
// falls back to the target's own lag-0 channel, with a warning, when no
// usable parent is found.
FittedPipeline fit_pipeline(const Dataset& train, const PipelineConfig& cfg, PipelineTrace* trace = nullptr);

Eigen::MatrixXd pipeline_features(const FittedPipeline& fitted, const Dataset& ds, int jobs = 1);
std::vector<Label> pipeline_predict(const FittedPipeline& fitted, const Dataset& ds, int jobs = 1);

struct PipelineResult {
  std::vector<Label> predictions;
  FittedPipeline fitted;
};

// Throws LeakageError when a (lake_id, year) unit is on both sides.
PipelineResult run_pipeline(const Dataset& train, const Dataset& test, const PipelineConfig& cfg,
                            PipelineTrace* trace = nullptr);

nlohmann::ordered_json pipeline_to_json(const FittedPipeline& fitted, const nlohmann::ordered_json& config = {});
FittedPipeline pipeline_from_json(const nlohmann::json& doc);
void save_pipeline(const FittedPipeline& fitted, const std::filesystem::path& path,
                   const nlohmann::ordered_json& config = {});
FittedPipeline load_pipeline(const std::filesystem::path& path);

}  // namespace lakecausal::classify
