#include "lakecausal/eval/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>

#include "lakecausal/core/error.hpp"
#include "lakecausal/core/parallel.hpp"

namespace lakecausal::eval {
namespace {

struct Task {
  std::optional<Region> region;
  int repeat = 0;
  std::function<Split(std::uint64_t)> make_split;
};

std::vector<Label> labels_of(const Dataset& ds) {
  std::vector<Label> out;
  for (const auto& lake : ds.lakes()) out.push_back(lake.label);
  return out;
}

RunRecord run_task(const Task& task, const EvalConfig& cfg, int inner_jobs) {
  RunRecord rec;
  rec.region = task.region;
  rec.repeat = task.repeat;
  rec.seed = cfg.seed + static_cast<std::uint64_t>(task.repeat);
  const Split split = task.make_split(rec.seed);
  rec.n_train = split.train.size();
  rec.n_test = split.test.size();
  if (split.test.empty()) throw InsufficientSamples("evaluation test set is empty");
  const auto truth = labels_of(split.test);

  classify::PipelineConfig pcfg = cfg.pipeline;
  pcfg.seed = rec.seed;
  pcfg.jobs = inner_jobs;
  pcfg.variant = classify::Variant::Causal;
  const auto causal = classify::run_pipeline(split.train, split.test, pcfg);
  pcfg.variant = classify::Variant::Baseline;
  const auto baseline = classify::run_pipeline(split.train, split.test, pcfg);

  rec.causal = compute_metrics(causal.predictions, truth);
  rec.baseline = compute_metrics(baseline.predictions, truth);
  rec.gain_points = gain_points(rec.causal.accuracy, rec.baseline.accuracy);
  rec.causal_channels = causal.fitted.channels;
  rec.warnings = causal.fitted.warnings;
  return rec;
}

EvalReport run_tasks(Protocol protocol, const std::vector<Task>& tasks, const EvalConfig& cfg) {
  cfg.validate();
  EvalReport report;
  report.protocol = protocol;
  report.runs.resize(tasks.size());
  const int inner_jobs = tasks.size() > 1 ? 1 : cfg.jobs;
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) { report.runs[i] = run_task(tasks[i], cfg, inner_jobs); });
  report.rows = summarize(report.runs);
  return report;
}

std::vector<Region> target_regions(const Dataset& ds, const EvalConfig& cfg) {
  std::vector<Region> out;
  for (Region r : kRegions) {
    const bool wanted =
        cfg.regions.empty() || std::find(cfg.regions.begin(), cfg.regions.end(), r) != cfg.regions.end();
    if (wanted && ds.has_region(r)) out.push_back(r);
  }
  for (Region r : cfg.regions) {
    if (!ds.has_region(r)) throw DomainError("region " + std::string(to_string(r)) + " has no lakes in the dataset");
  }
  if (out.empty()) throw DomainError("no region to evaluate");
  return out;
}

std::vector<Task> region_id_tasks(const Dataset& ds, Region region, const EvalConfig& cfg) {
  if (!ds.has_region(region)) throw DomainError("region " + std::string(to_string(region)) + " has no lakes");
  auto local = std::make_shared<Dataset>(ds.in_region(region));
  std::vector<Task> tasks;
  for (int r = 0; r < cfg.repeats; ++r) {
    tasks.push_back({region, r, [local, ratio = cfg.train_ratio](std::uint64_t seed) {
                       return stratified_split(*local, ratio, seed);
                     }});
  }
  return tasks;
}

std::vector<Task> region_ood_tasks(const Dataset& ds, Region region, const EvalConfig& cfg) {
  if (!ds.has_region(region)) throw DomainError("region " + std::string(to_string(region)) + " has no lakes");
  auto split = std::make_shared<Split>();
  split->train = ds.in_region(region);
  split->test = ds.filter([region](const LakeRecord& l) { return l.region != region; });
  if (split->test.empty()) throw DomainError("no lakes outside region " + std::string(to_string(region)));
  for (const auto& lake : split->test.lakes()) {
    if (lake.region == region) throw LeakageError("training region lake in the out-of-region test pool");
  }
  std::vector<Task> tasks;
  for (int r = 0; r < cfg.repeats; ++r) {
    tasks.push_back({region, r, [split](std::uint64_t) { return *split; }});
  }
  return tasks;
}

Spread spread(const std::vector<double>& v) {
  Spread s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

VariantSummary summarize_variant(const std::vector<const Metrics*>& runs) {
  std::vector<double> acc, prec, rec, f1;
  for (const auto* m : runs) {
    acc.push_back(m->accuracy);
    prec.push_back(m->macro_precision);
    rec.push_back(m->macro_recall);
    f1.push_back(m->macro_f1);
  }
  return {spread(acc), spread(prec), spread(rec), spread(f1)};
}

nlohmann::ordered_json spread_json(const Spread& s) { return {{"mean", s.mean}, {"sd", s.sd}}; }

Spread spread_from(const nlohmann::json& j) { return {j.at("mean").get<double>(), j.at("sd").get<double>()}; }

nlohmann::ordered_json metrics_json(const Metrics& m) {
  nlohmann::ordered_json support = nlohmann::ordered_json::object();
  nlohmann::ordered_json confusion = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    support[std::string(to_string(kLabels[c]))] = m.support[c];
    confusion.push_back(m.confusion[c]);
  }
  return {{"accuracy", m.accuracy},   {"macro_precision", m.macro_precision},
          {"macro_recall", m.macro_recall}, {"macro_f1", m.macro_f1},
          {"support", support},       {"confusion", confusion}};
}

Metrics metrics_from(const nlohmann::json& j) {
  Metrics m;
  m.accuracy = j.at("accuracy").get<double>();
  m.macro_precision = j.at("macro_precision").get<double>();
  m.macro_recall = j.at("macro_recall").get<double>();
  m.macro_f1 = j.at("macro_f1").get<double>();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    m.support[c] = j.at("support").at(std::string(to_string(kLabels[c]))).get<std::size_t>();
    m.confusion[c] = j.at("confusion").at(c).get<std::array<std::size_t, kNumClasses>>();
  }
  return m;
}

nlohmann::ordered_json summary_json(const VariantSummary& s) {
  return {{"accuracy", spread_json(s.accuracy)},
          {"macro_precision", spread_json(s.macro_precision)},
          {"macro_recall", spread_json(s.macro_recall)},
          {"macro_f1", spread_json(s.macro_f1)}};
}

VariantSummary summary_from(const nlohmann::json& j) {
  return {spread_from(j.at("accuracy")), spread_from(j.at("macro_precision")), spread_from(j.at("macro_recall")),
          spread_from(j.at("macro_f1"))};
}

nlohmann::ordered_json region_json(const std::optional<Region>& r) {
  return r ? nlohmann::ordered_json(to_string(*r)) : nlohmann::ordered_json("ALL");
}

std::optional<Region> region_from(const nlohmann::json& j) {
  const auto s = j.get<std::string>();
  if (s == "ALL") return std::nullopt;
  const auto r = parse_region(s);
  if (!r) throw ParseError("report", 0, "region", "unknown region " + s);
  return r;
}

std::string cell(const Spread& s, std::size_t runs, bool signed_value) {
  char buf[64];
  if (runs > 1) {
    std::snprintf(buf, sizeof buf, signed_value ? "%+.2f ± %.2f" : "%.2f ± %.2f", s.mean, s.sd);
  } else {
    std::snprintf(buf, sizeof buf, signed_value ? "%+.2f" : "%.2f", s.mean);
  }
  return buf;
}

// Display width, counting a multi-byte UTF-8 sequence as one column.
std::size_t width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++w;
  }
  return w;
}

}  // namespace

std::string_view to_string(Protocol p) noexcept {
  switch (p) {
    case Protocol::Global: return "global";
    case Protocol::RegionId: return "region_id";
    case Protocol::RegionOod: return "region_ood";
  }
  return "global";
}

std::optional<Protocol> parse_protocol(std::string_view s) noexcept {
  if (s == "global") return Protocol::Global;
  if (s == "region_id" || s == "region-id") return Protocol::RegionId;
  if (s == "region_ood" || s == "region-ood") return Protocol::RegionOod;
  return std::nullopt;
}

void EvalConfig::validate() const {
  pipeline.validate();
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw ConfigError("train_ratio must lie strictly between 0 and 1");
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

EvalReport global_eval(const Dataset& ds, const EvalConfig& cfg) {
  auto shared = std::make_shared<Dataset>(ds);
  std::vector<Task> tasks;
  for (int r = 0; r < cfg.repeats; ++r) {
    tasks.push_back({std::nullopt, r, [shared, ratio = cfg.train_ratio](std::uint64_t seed) {
                       return stratified_split(*shared, ratio, seed);
                     }});
  }
  return run_tasks(Protocol::Global, tasks, cfg);
}

EvalReport region_id_eval(const Dataset& ds, Region region, const EvalConfig& cfg) {
  return run_tasks(Protocol::RegionId, region_id_tasks(ds, region, cfg), cfg);
}

EvalReport region_ood_eval(const Dataset& ds, Region train_region, const EvalConfig& cfg) {
  return run_tasks(Protocol::RegionOod, region_ood_tasks(ds, train_region, cfg), cfg);
}

EvalReport evaluate(const Dataset& ds, Protocol protocol, const EvalConfig& cfg) {
  if (protocol == Protocol::Global) return global_eval(ds, cfg);
  std::vector<Task> tasks;
  for (Region r : target_regions(ds, cfg)) {
    auto more = protocol == Protocol::RegionId ? region_id_tasks(ds, r, cfg) : region_ood_tasks(ds, r, cfg);
    tasks.insert(tasks.end(), more.begin(), more.end());
  }
  return run_tasks(protocol, tasks, cfg);
}

std::vector<ReportRow> summarize(const std::vector<RunRecord>& runs) {
  // Global rows (no region) sort first, then canonical region order.
  std::map<int, std::vector<const RunRecord*>> groups;
  for (const auto& run : runs) {
    groups[run.region ? static_cast<int>(index_of(*run.region)) : -1].push_back(&run);
  }
  std::vector<ReportRow> rows;
  for (const auto& [key, members] : groups) {
    ReportRow row;
    row.region = members.front()->region;
    row.runs = members.size();
    std::vector<const Metrics*> c, b;
    std::vector<double> gains;
    for (const auto* m : members) {
      c.push_back(&m->causal);
      b.push_back(&m->baseline);
      gains.push_back(m->gain_points);
    }
    row.causal = summarize_variant(c);
    row.baseline = summarize_variant(b);
    row.gain_points = spread(gains);
    row.gain_points.mean = gain_points(row.causal.accuracy.mean, row.baseline.accuracy.mean);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"region", region_json(row.region)},
                    {"runs", row.runs},
                    {"causal", summary_json(row.causal)},
                    {"baseline", summary_json(row.baseline)},
                    {"gain_points", spread_json(row.gain_points)}});
  }
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const auto& run : report.runs) {
    nlohmann::ordered_json channels = nlohmann::ordered_json::array();
    for (const auto& c : run.causal_channels) channels.push_back({{"var", to_string(c.var)}, {"lag", c.lag}});
    runs.push_back({{"region", region_json(run.region)},
                    {"repeat", run.repeat},
                    {"seed", run.seed},
                    {"n_train", run.n_train},
                    {"n_test", run.n_test},
                    {"causal", metrics_json(run.causal)},
                    {"baseline", metrics_json(run.baseline)},
                    {"gain_points", run.gain_points},
                    {"causal_channels", channels},
                    {"warnings", run.warnings}});
  }
  return {{"protocol", to_string(report.protocol)}, {"config", report.config}, {"rows", rows}, {"runs", runs}};
}

EvalReport report_from_json(const nlohmann::json& doc) {
  EvalReport report;
  try {
    const auto protocol = parse_protocol(doc.at("protocol").get<std::string>());
    if (!protocol) throw ParseError("report", 0, "protocol", "unknown protocol");
    report.protocol = *protocol;
    report.config = doc.at("config");
    for (const auto& j : doc.at("rows")) {
      ReportRow row;
      row.region = region_from(j.at("region"));
      row.runs = j.at("runs").get<std::size_t>();
      row.causal = summary_from(j.at("causal"));
      row.baseline = summary_from(j.at("baseline"));
      row.gain_points = spread_from(j.at("gain_points"));
      report.rows.push_back(row);
    }
    for (const auto& j : doc.at("runs")) {
      RunRecord run;
      run.region = region_from(j.at("region"));
      run.repeat = j.at("repeat").get<int>();
      run.seed = j.at("seed").get<std::uint64_t>();
      run.n_train = j.at("n_train").get<std::size_t>();
      run.n_test = j.at("n_test").get<std::size_t>();
      run.causal = metrics_from(j.at("causal"));
      run.baseline = metrics_from(j.at("baseline"));
      run.gain_points = j.at("gain_points").get<double>();
      for (const auto& c : j.at("causal_channels")) {
        const auto var = parse_variable(c.at("var").get<std::string>());
        if (!var) throw ParseError("report", 0, "causal_channels", "unknown variable");
        run.causal_channels.push_back({*var, c.at("lag").get<int>()});
      }
      run.warnings = j.at("warnings").get<std::vector<std::string>>();
      report.runs.push_back(run);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("report", 0, "", e.what());
  }
  return report;
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << report_to_json(report).dump(2) << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

EvalReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open");
  try {
    return report_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), 0, "", e.what());
  }
}

std::string render_table(const EvalReport& report) {
  const std::vector<std::string> header = {"Region", "Causal (%)", "Baseline (%)", "Gain (pts)"};
  std::vector<std::vector<std::string>> body;
  for (const auto& row : report.rows) {
    auto pct = [](Spread s) { return Spread{s.mean * 100.0, s.sd * 100.0}; };
    body.push_back({row.region ? std::string(to_string(*row.region)) : "ALL",
                    cell(pct(row.causal.accuracy), row.runs, false), cell(pct(row.baseline.accuracy), row.runs, false),
                    cell(row.gain_points, row.runs, true)});
  }
  std::vector<std::size_t> widths;
  for (const auto& h : header) widths.push_back(width(h));
  for (const auto& line : body) {
    for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], width(line[c]));
  }
  std::ostringstream out;
  out << "protocol: " << to_string(report.protocol) << '\n';
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      const std::string pad(widths[c] - width(line[c]), ' ');
      if (c == 0) {
        out << line[c] << pad;
      } else {
        out << "  " << pad << line[c];
      }
    }
    out << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (std::size_t w : widths) total += w;
  out << std::string(total + 2 * (widths.size() - 1), '-') << '\n';
  for (const auto& line : body) emit(line);
  return out.str();
}

}  // namespace lakecausal::eval
