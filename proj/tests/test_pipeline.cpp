#include <gtest/gtest.h>

#include "lakecausal/classify/pipeline.hpp"
#include "lakecausal/core/error.hpp"
#include "lakecausal/synth/generator.hpp"
#include "support.hpp"

namespace lc = lakecausal;
namespace cl = lakecausal::classify;
using lc::VariableId;

namespace {

lc::Dataset synthetic(int per_class, std::vector<lc::Region> regions, std::uint64_t seed) {
  lc::synth::SynthConfig sc;
  sc.lakes_per_class = per_class;
  sc.regions = std::move(regions);
  sc.seed = seed;
  return lc::synth::generate(sc).dataset;
}

cl::PipelineConfig small(cl::Variant variant) {
  cl::PipelineConfig cfg;
  cfg.variant = variant;
  cfg.transform.features_budget = 840;
  cfg.seed = 3;
  return cfg;
}

// Same units as `ds`, every observed cell replaced by noise.
lc::Dataset noised(const lc::Dataset& ds, std::uint64_t seed) {
  std::vector<lc::LakeRecord> out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto lake = lc::testing::noise_lake(ds[i].lake_id, ds[i].region, ds[i].label, seed + i);
    lake.year = ds[i].year;
    out.push_back(std::move(lake));
  }
  return lc::Dataset(out);
}

}  // namespace

TEST(Pipeline, OverlappingSplitsAreRefused) {
  const auto ds = synthetic(2, {lc::Region::CW}, 1);
  EXPECT_THROW(cl::run_pipeline(ds, ds, small(cl::Variant::Baseline)), lc::LeakageError);
  EXPECT_THROW(cl::run_pipeline(ds, ds.subset({0}), small(cl::Variant::Causal)), lc::LeakageError);
}

TEST(Pipeline, BaselineNeverRunsDiscovery) {
  const auto ds = synthetic(2, {lc::Region::CW, lc::Region::NE}, 2);
  cl::PipelineTrace trace;
  const auto fitted = cl::fit_pipeline(ds, small(cl::Variant::Baseline), &trace);
  EXPECT_EQ(trace.discovery_calls, 0u);
  EXPECT_FALSE(fitted.graph.has_value());
  EXPECT_EQ(fitted.channels, lc::features::baseline_channel_specs());
  EXPECT_EQ(fitted.transform.num_channels, 9u);
}

TEST(Pipeline, CausalChannelsComeFromTheDiscoveredGraph) {
  const auto ds = synthetic(2, {lc::Region::CW, lc::Region::NE}, 2);
  cl::PipelineTrace trace;
  const auto fitted = cl::fit_pipeline(ds, small(cl::Variant::Causal), &trace);
  EXPECT_EQ(trace.discovery_calls, 1u);
  ASSERT_TRUE(fitted.graph.has_value());
  EXPECT_EQ(fitted.channels, lc::features::causal_channel_specs(*fitted.graph, VariableId::HvAnom, false));
  EXPECT_FALSE(fitted.channels.empty());
  EXPECT_EQ(trace.training_units.size(), ds.size());

  auto per_region = small(cl::Variant::Causal);
  per_region.graph_source = cl::GraphSource::PerRegion;
  cl::PipelineTrace trace2;
  const auto merged = cl::fit_pipeline(ds, per_region, &trace2);
  EXPECT_EQ(trace2.discovery_calls, 2u);
  ASSERT_NO_THROW(merged.graph->validate());
}

TEST(Pipeline, FallsBackToTheTargetWhenNothingIsFound) {
  std::vector<lc::LakeRecord> lakes;
  for (int i = 0; i < 4; ++i) {
    auto lake =
        lc::testing::noise_lake("Z" + std::to_string(i), lc::Region::SW, lc::kLabels[static_cast<std::size_t>(i) % 2],
                                40 + static_cast<std::uint64_t>(i));
    for (int v = 1; v < 9; ++v) lake.series.col(v).setZero();
    lakes.push_back(std::move(lake));
  }
  const auto fitted = cl::fit_pipeline(lc::Dataset(lakes), small(cl::Variant::Causal));
  ASSERT_TRUE(fitted.graph.has_value());
  EXPECT_TRUE(fitted.graph->parents(VariableId::HvAnom).empty());
  EXPECT_EQ(fitted.channels, (std::vector<lc::features::ChannelSpec>{{VariableId::HvAnom, 0}}));
  ASSERT_EQ(fitted.warnings.size(), 1u);
}

TEST(Pipeline, FitIsDeterministicAcrossRunsAndWorkers) {
  const auto ds = synthetic(2, {lc::Region::NO, lc::Region::SE}, 4);
  auto cfg = small(cl::Variant::Causal);
  const auto a = cl::fit_pipeline(ds, cfg);
  const auto b = cl::fit_pipeline(ds, cfg);
  cfg.jobs = 4;
  const auto c = cl::fit_pipeline(ds, cfg);
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(a == c);
  const auto test = synthetic(1, {lc::Region::NW}, 5);
  EXPECT_EQ(cl::pipeline_predict(a, test, 1), cl::pipeline_predict(c, test, 4));
}

TEST(Pipeline, TestContentNeverReachesFittedArtifacts) {
  const auto train = synthetic(2, {lc::Region::CW, lc::Region::SW}, 6);
  const auto test = synthetic(1, {lc::Region::NE, lc::Region::NO}, 7);
  for (auto variant : {cl::Variant::Causal, cl::Variant::Baseline}) {
    cl::PipelineTrace trace;
    const auto real = cl::run_pipeline(train, test, small(variant), &trace);
    const auto noise = cl::run_pipeline(train, noised(test, 99), small(variant));
    EXPECT_TRUE(real.fitted == noise.fitted) << cl::to_string(variant);
    for (const auto& lake : test.lakes()) {
      EXPECT_EQ(std::count(trace.training_units.begin(), trace.training_units.end(), lake.unit_key()), 0);
    }
  }
}

TEST(Pipeline, SavedModelPredictsIdentically) {
  const auto train = synthetic(2, {lc::Region::CW}, 8);
  const auto test = synthetic(1, {lc::Region::SE}, 9);
  const auto fitted = cl::fit_pipeline(train, small(cl::Variant::Causal));
  const auto dir = lc::testing::scratch_dir("pipeline_save");
  cl::save_pipeline(fitted, dir / "m.json");
  const auto back = cl::load_pipeline(dir / "m.json");
  EXPECT_TRUE(back == fitted);
  EXPECT_EQ(cl::pipeline_predict(back, test), cl::pipeline_predict(fitted, test));
  cl::save_pipeline(back, dir / "m2.json");
  EXPECT_EQ(lc::testing::read_file(dir / "m.json"), lc::testing::read_file(dir / "m2.json"));
}

TEST(Pipeline, NamesParseAndInvalidConfigIsRejected) {
  EXPECT_EQ(cl::parse_variant("baseline"), cl::Variant::Baseline);
  EXPECT_EQ(cl::parse_graph_source("per_region"), cl::GraphSource::PerRegion);
  EXPECT_FALSE(cl::parse_variant("oracle").has_value());
  auto cfg = small(cl::Variant::Causal);
  cfg.target = VariableId::SDummy;
  EXPECT_THROW(cfg.validate(), lc::ConfigError);
  cfg = small(cl::Variant::Causal);
  cfg.alphas.clear();
  EXPECT_THROW(cfg.validate(), lc::ConfigError);
}
