// lakecausal: command-line front end for the causal lake-classification pipeline.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lakecausal/app/run_config.hpp"
#include "lakecausal/causal/discovery.hpp"
#include "lakecausal/causal/panel.hpp"
#include "lakecausal/classify/pipeline.hpp"
#include "lakecausal/core/error.hpp"
#include "lakecausal/core/io.hpp"
#include "lakecausal/eval/protocols.hpp"
#include "lakecausal/simd/kernels.hpp"
#include "lakecausal/synth/generator.hpp"

namespace fs = std::filesystem;
using namespace lakecausal;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kIo = 3, kFailure = 4, kLeak = 5 };

void log(const std::string& msg) { std::cerr << "[lakecausal] " << msg << '\n'; }

// Flags shared by all subcommands. Unset optionals leave the config alone.
struct CommonFlags {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

struct SynthFlags {
  std::optional<int> lakes_per_class;
  std::vector<std::string> regions;
  std::optional<double> spurious_strength;
  std::string out;
  std::string format = "csv";
};

struct PreprocessFlags {
  std::string raw;
  std::string meta;
  std::string resmooth;
  std::string out;
  std::optional<int> window;
};

struct DiscoverFlags {
  std::string data;
  std::string scope = "all";
  std::optional<int> tau_max;
  std::optional<double> alpha;
  std::optional<int> max_conds;
  std::string out;
};

struct TrainFlags {
  std::string data;
  std::optional<std::string> variant;
  std::optional<std::string> graph_source;
  std::string out;
};

struct EvaluateFlags {
  std::string data;
  std::optional<std::string> protocol;
  std::vector<std::string> regions;
  std::optional<int> repeats;
  std::optional<double> train_ratio;
  std::optional<double> alpha;
  std::optional<int> tau_max;
  std::string out;
};

struct ReportFlags {
  std::string report;
  std::string out;
};

Region region_or_throw(const std::string& name) {
  const auto r = parse_region(name);
  if (!r) throw ConfigError("unknown region '" + name + "' (expected CW, NE, NO, NW, SE or SW)");
  return *r;
}

app::RunConfig resolve(const CommonFlags& common) {
  app::RunConfig cfg;
  if (!common.config_file.empty()) app::apply_config_file(cfg, common.config_file);
  app::apply_environment(cfg, app::current_environment());
  nlohmann::json patch = nlohmann::json::object();
  if (common.seed) patch["seed"] = *common.seed;
  if (common.jobs) patch["jobs"] = *common.jobs;
  if (!patch.empty()) app::apply_json(cfg, patch, "command line");
  return cfg;
}

void finish_config(app::RunConfig& cfg, const nlohmann::json& patch) {
  if (!patch.empty()) app::apply_json(cfg, patch, "command line");
  cfg.validate();
  log("resolved config " + app::to_json(cfg).dump());
  log("simd kernels: " + std::string(simd::to_string(simd::active_isa())));
}

nlohmann::ordered_json echo(const app::RunConfig& cfg) { return app::to_json(cfg); }

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string(), "write failed");
}

// Datasets are CSV/JSON tables; the resolved config sits next to them.
void save_dataset_with_config(const Dataset& ds, const fs::path& path, const app::RunConfig& cfg) {
  ensure_parent(path);
  save_dataset(ds, path);
  write_text(fs::path(path.string() + ".config.json"), echo(cfg).dump(2) + "\n");
}

std::string require(const std::string& value, const std::string& fallback, const std::string& what) {
  const std::string v = value.empty() ? fallback : value;
  if (v.empty()) throw ConfigError("missing " + what);
  return v;
}

int run_synth(const CommonFlags& common, const SynthFlags& f) {
  auto cfg = resolve(common);
  nlohmann::json patch = nlohmann::json::object();
  if (f.lakes_per_class) patch["synth"]["lakes_per_class"] = *f.lakes_per_class;
  if (!f.regions.empty()) patch["synth"]["regions"] = f.regions;
  if (f.spurious_strength) patch["synth"]["spurious_strength"] = *f.spurious_strength;
  if (!f.out.empty()) patch["paths"]["out_dir"] = f.out;
  finish_config(cfg, patch);
  if (f.format != "csv" && f.format != "json") throw ConfigError("--format must be csv or json");

  const fs::path dir = cfg.paths.out_dir.empty() ? fs::path(".") : fs::path(cfg.paths.out_dir);
  fs::create_directories(dir);
  const auto out = synth::generate(cfg.synth);
  const fs::path data = dir / ("dataset." + f.format);
  save_dataset_with_config(out.dataset, data, cfg);
  causal::save_graph(out.truth, dir / "truth.json", {{"run", echo(cfg)}});

  std::cout << "wrote " << out.dataset.size() << " lakes to " << data.string() << '\n';
  for (Region r : kRegions) {
    const auto sub = out.dataset.in_region(r);
    if (sub.empty()) continue;
    const auto counts = sub.class_counts();
    std::cout << "  " << to_string(r) << ':';
    for (Label l : kLabels) std::cout << ' ' << to_string(l) << '=' << counts[index_of(l)];
    std::cout << '\n';
  }
  std::cout << "truth graph: " << (dir / "truth.json").string() << '\n';
  return kOk;
}

int run_preprocess(const CommonFlags& common, const PreprocessFlags& f) {
  auto cfg = resolve(common);
  nlohmann::json patch = nlohmann::json::object();
  if (f.window) patch["preprocess"]["median_window_days"] = *f.window;
  if (!f.raw.empty()) patch["paths"]["raw"] = f.raw;
  if (!f.meta.empty()) patch["paths"]["meta"] = f.meta;
  if (!f.out.empty()) patch["paths"]["data"] = f.out;
  finish_config(cfg, patch);
  const fs::path out = require(cfg.paths.data, "", "--out");

  if (!f.resmooth.empty()) {
    const auto ds = preprocess::resmooth(load_dataset(f.resmooth), cfg.preprocess);
    save_dataset_with_config(ds, out, cfg);
    std::cout << "resmoothed " << ds.size() << " lakes into " << out.string() << '\n';
    return kOk;
  }
  const auto raw = preprocess::load_raw_observations(require(cfg.paths.raw, "", "--raw"));
  const auto meta = preprocess::load_lake_metadata(require(cfg.paths.meta, "", "--meta"));
  const auto outcome = preprocess::preprocess_raw(raw, meta, cfg.preprocess, cfg.jobs);
  for (const auto& w : outcome.warnings) log("warning: " + w);
  save_dataset_with_config(outcome.dataset, out, cfg);
  std::cout << "wrote " << outcome.dataset.size() << " dense lakes to " << out.string() << " ("
            << outcome.warnings.size() << " dropped)\n";
  return kOk;
}

int run_discover(const CommonFlags& common, const DiscoverFlags& f) {
  auto cfg = resolve(common);
  nlohmann::json patch = nlohmann::json::object();
  if (f.tau_max) patch["discovery"]["tau_max"] = *f.tau_max;
  if (f.alpha) patch["discovery"]["alpha"] = *f.alpha;
  if (f.max_conds) patch["discovery"]["max_conds"] = *f.max_conds;
  if (!f.data.empty()) patch["paths"]["data"] = f.data;
  if (!f.out.empty()) patch["paths"]["graph"] = f.out;
  finish_config(cfg, patch);

  std::optional<Region> region;
  if (f.scope.rfind("region=", 0) == 0) {
    region = region_or_throw(f.scope.substr(7));
  } else if (f.scope != "all") {
    throw ConfigError("--scope must be 'all' or 'region=<CODE>'");
  }
  Dataset ds = load_dataset(require(cfg.paths.data, "", "--data"));
  if (region) {
    ds = ds.in_region(*region);
    if (ds.empty()) throw DomainError("no lakes in region " + std::string(to_string(*region)));
  }
  causal::DiscoveryConfig dcfg = cfg.discovery;
  dcfg.jobs = cfg.jobs;
  causal::DiscoveryStats stats;
  const auto graph = causal::discover_parents(causal::pool_lakes(ds, dcfg), dcfg, &stats);
  const fs::path out = require(cfg.paths.graph, "graph.json", "--out");
  ensure_parent(out);
  causal::save_graph(graph, out, {{"scope", f.scope}, {"run", echo(cfg)}});

  for (const auto& [target, links] : graph.targets) {
    std::cout << "parents of " << to_string(target) << ':';
    for (const auto& link : links) std::cout << ' ' << to_string(link.var) << "(-" << link.lag << ')';
    std::cout << '\n';
  }
  std::cout << stats.selection_tests << " selection tests, " << stats.mci_tests << " MCI tests; graph written to "
            << out.string() << '\n';
  return kOk;
}

int run_train(const CommonFlags& common, const TrainFlags& f) {
  auto cfg = resolve(common);
  nlohmann::json patch = nlohmann::json::object();
  if (f.variant) patch["classify"]["variant"] = *f.variant;
  if (f.graph_source) patch["classify"]["graph_source"] = *f.graph_source;
  if (!f.data.empty()) patch["paths"]["data"] = f.data;
  if (!f.out.empty()) patch["paths"]["model"] = f.out;
  finish_config(cfg, patch);

  const Dataset ds = load_dataset(require(cfg.paths.data, "", "--data"));
  const auto fitted = classify::fit_pipeline(ds, cfg.pipeline_config());
  for (const auto& w : fitted.warnings) log("warning: " + w);
  const fs::path out = require(cfg.paths.model, "model.json", "--out");
  ensure_parent(out);
  classify::save_pipeline(fitted, out, echo(cfg));
  std::cout << "trained " << classify::to_string(fitted.variant) << " model on " << ds.size() << " lakes: "
            << fitted.channels.size() << " channels, " << fitted.transform.num_features()
            << " features, alpha=" << fitted.model.chosen_alpha << "; written to " << out.string() << '\n';
  return kOk;
}

int run_evaluate(const CommonFlags& common, const EvaluateFlags& f) {
  auto cfg = resolve(common);
  nlohmann::json patch = nlohmann::json::object();
  if (f.protocol) patch["eval"]["protocol"] = *f.protocol;
  if (!f.regions.empty()) patch["eval"]["regions"] = f.regions;
  if (f.repeats) patch["eval"]["repeats"] = *f.repeats;
  if (f.train_ratio) patch["eval"]["train_ratio"] = *f.train_ratio;
  if (f.alpha) patch["discovery"]["alpha"] = *f.alpha;
  if (f.tau_max) patch["discovery"]["tau_max"] = *f.tau_max;
  if (!f.data.empty()) patch["paths"]["data"] = f.data;
  if (!f.out.empty()) patch["paths"]["report"] = f.out;
  finish_config(cfg, patch);

  const Dataset ds = load_dataset(require(cfg.paths.data, "", "--data"));
  auto report = eval::evaluate(ds, cfg.eval.protocol, cfg.eval_config());
  report.config = echo(cfg);
  for (const auto& run : report.runs) {
    for (const auto& w : run.warnings) log("warning: " + w);
  }
  const fs::path out = require(cfg.paths.report, "report.json", "--out");
  ensure_parent(out);
  eval::save_report(report, out);
  std::cout << eval::render_table(report);
  std::cout << "report written to " << out.string() << '\n';
  return kOk;
}

int run_report(const CommonFlags& common, const ReportFlags& f) {
  auto cfg = resolve(common);
  nlohmann::json patch = nlohmann::json::object();
  if (!f.report.empty()) patch["paths"]["report"] = f.report;
  finish_config(cfg, patch);
  const auto report = eval::load_report(require(cfg.paths.report, "", "--report"));
  const std::string table = eval::render_table(report);
  std::cout << table;
  if (!f.out.empty()) {
    write_text(f.out, table);
    write_text(f.out + ".json", eval::report_to_json(report).dump(2) + "\n");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal time-series classification of supraglacial lakes"};
  app.require_subcommand(1);
  app.fallthrough();
  CommonFlags common;
  app.add_option("-c,--config", common.config_file, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "Master seed");
  app.add_option("-j,--jobs", common.jobs, "Worker threads");

  SynthFlags synth_f;
  auto* synth = app.add_subcommand("synth", "Generate a labelled synthetic dataset and its truth graph");
  synth->add_option("--lakes-per-class", synth_f.lakes_per_class, "Lakes per class and region");
  synth->add_option("--regions", synth_f.regions, "Regions to generate")->delimiter(',');
  synth->add_option("--spurious-strength", synth_f.spurious_strength, "Nuisance signature strength");
  synth->add_option("-o,--out", synth_f.out, "Output directory (created)");
  synth->add_option("--format", synth_f.format, "Dataset format: csv or json");

  PreprocessFlags pre_f;
  auto* pre = app.add_subcommand("preprocess", "Densify raw per-observation records into daily series");
  pre->add_option("--raw", pre_f.raw, "Raw observations CSV (lake_id,day,variable,value,zenith_deg)");
  pre->add_option("--meta", pre_f.meta, "Lake metadata CSV (lake_id,region,year,label,area_m2,elevation_m)");
  pre->add_option("--resmooth", pre_f.resmooth, "Re-smooth an already dense dataset instead");
  pre->add_option("--window", pre_f.window, "Rolling median window (days)");
  pre->add_option("-o,--out", pre_f.out, "Output dataset (.csv or .json)");

  DiscoverFlags disc_f;
  auto* disc = app.add_subcommand("discover", "Discover lagged causal parents");
  disc->add_option("-d,--data", disc_f.data, "Dense dataset");
  disc->add_option("--scope", disc_f.scope, "'all' or 'region=<CODE>'");
  disc->add_option("--tau-max", disc_f.tau_max, "Largest lag");
  disc->add_option("--alpha", disc_f.alpha, "Significance level");
  disc->add_option("--max-conds", disc_f.max_conds, "Largest conditioning set per variable");
  disc->add_option("-o,--out", disc_f.out, "Graph JSON");

  TrainFlags train_f;
  auto* train = app.add_subcommand("train", "Fit a pipeline on a whole dataset");
  train->add_option("-d,--data", train_f.data, "Dense dataset");
  train->add_option("--variant", train_f.variant, "causal or baseline");
  train->add_option("--graph-source", train_f.graph_source, "global or per_region");
  train->add_option("-o,--out", train_f.out, "Model JSON");

  EvaluateFlags eval_f;
  auto* evaluate = app.add_subcommand("evaluate", "Compare the causal and baseline variants");
  evaluate->add_option("-d,--data", eval_f.data, "Dense dataset");
  evaluate->add_option("--protocol", eval_f.protocol, "global, region-id or region-ood");
  evaluate->add_option("--train-region,--region", eval_f.regions, "Regions to evaluate")->delimiter(',');
  evaluate->add_option("--repeats", eval_f.repeats, "Repeats (seed, seed+1, ...)");
  evaluate->add_option("--train-ratio", eval_f.train_ratio, "Stratified split ratio");
  evaluate->add_option("--alpha", eval_f.alpha, "Discovery significance level");
  evaluate->add_option("--tau-max", eval_f.tau_max, "Discovery largest lag");
  evaluate->add_option("-o,--out", eval_f.out, "Report JSON");

  ReportFlags report_f;
  auto* report = app.add_subcommand("report", "Render a saved evaluation report as a table");
  report->add_option("-r,--report", report_f.report, "Report JSON");
  report->add_option("-o,--out", report_f.out, "Also write the table (and a JSON copy)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(common, synth_f);
    if (pre->parsed()) return run_preprocess(common, pre_f);
    if (disc->parsed()) return run_discover(common, disc_f);
    if (train->parsed()) return run_train(common, train_f);
    if (evaluate->parsed()) return run_evaluate(common, eval_f);
    if (report->parsed()) return run_report(common, report_f);
  } catch (const ConfigError& e) {
    log("config error: " + std::string(e.what()));
    return kUsage;
  } catch (const LeakageError& e) {
    log("leakage: " + std::string(e.what()));
    return kLeak;
  } catch (const IoError& e) {
    log("io error: " + std::string(e.what()));
    return kIo;
  } catch (const ParseError& e) {
    log("parse error: " + std::string(e.what()));
    return kIo;
  } catch (const std::exception& e) {
    log("error: " + std::string(e.what()));
    return kFailure;
  }
  return kUsage;
}
