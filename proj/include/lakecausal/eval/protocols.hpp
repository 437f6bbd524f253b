#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lakecausal/classify/pipeline.hpp"
#include "lakecausal/eval/metrics.hpp"

namespace lakecausal::eval {

enum class Protocol { Global, RegionId, RegionOod };

std::string_view to_string(Protocol p) noexcept;
// Accepts "global", "region_id"/"region-id", "region_ood"/"region-ood".
std::optional<Protocol> parse_protocol(std::string_view s) noexcept;

struct EvalConfig {
  // Shared by both variants; only `variant` differs between them.
  classify::PipelineConfig pipeline;
  double train_ratio = 0.8;
  int repeats = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
  // Regions to evaluate (region protocols); empty means every region present.
  std::vector<Region> regions;

  void validate() const;
};

struct RunRecord {
  std::optional<Region> region;  // empty for the global protocol
  int repeat = 0;
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  Metrics causal;
  Metrics baseline;
  double gain_points = 0.0;
  std::vector<features::ChannelSpec> causal_channels;
  std::vector<std::string> warnings;
};

struct Spread {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single run
};

struct VariantSummary {
  Spread accuracy;
  Spread macro_precision;
  Spread macro_recall;
  Spread macro_f1;
};

struct ReportRow {
  std::optional<Region> region;
  std::size_t runs = 0;
  VariantSummary causal;
  VariantSummary baseline;
  Spread gain_points;
};

struct EvalReport {
  Protocol protocol = Protocol::Global;
  std::vector<RunRecord> runs;  // ordered by (region, repeat)
  std::vector<ReportRow> rows;  // canonical region order
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

// Seed of repeat r is cfg.seed + r; it drives the split and the transform.
EvalReport global_eval(const Dataset& ds, const EvalConfig& cfg);
EvalReport region_id_eval(const Dataset& ds, Region region, const EvalConfig& cfg);
// Trains on `train_region` only and tests on the pooled remaining regions.
EvalReport region_ood_eval(const Dataset& ds, Region train_region, const EvalConfig& cfg);
// All configured regions for the region protocols, one row each.
EvalReport evaluate(const Dataset& ds, Protocol protocol, const EvalConfig& cfg);

// Builds rows from runs.
std::vector<ReportRow> summarize(const std::vector<RunRecord>& runs);

nlohmann::ordered_json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& doc);
void save_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_report(const std::filesystem::path& path);

// Aligned text table: region, causal accuracy, baseline accuracy, gain (points).
std::string render_table(const EvalReport& report);

}  // namespace lakecausal::eval
