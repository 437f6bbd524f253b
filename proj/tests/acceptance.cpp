// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "lakecausal/causal/ci_test.hpp"
#include "lakecausal/causal/discovery.hpp"
#include "lakecausal/causal/panel.hpp"
#include "lakecausal/classify/pipeline.hpp"
#include "lakecausal/classify/ridge.hpp"
#include "lakecausal/core/error.hpp"
#include "lakecausal/eval/metrics.hpp"
#include "lakecausal/eval/protocols.hpp"
#include "lakecausal/features/transform.hpp"
#include "lakecausal/preprocess/preprocess.hpp"
#include "lakecausal/synth/generator.hpp"

using namespace lakecausal;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
    }
  }
  void note(const std::string& text) {
    if (!notes_.empty()) notes_ += ", ";
    notes_ += text;
  }
  Outcome outcome() const { return {pass_, pass_ ? notes_ : failures_ + (notes_.empty() ? "" : " | " + notes_)}; }

 private:
  bool pass_ = true;
  std::string failures_;
  std::string notes_;
};

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::string sci(double v) {
  std::ostringstream ss;
  ss << std::scientific << std::setprecision(2) << v;
  return ss.str();
}

LakeRecord noise_lake(const std::string& id, Region region, Label label, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  LakeRecord lake;
  lake.lake_id = id;
  lake.region = region;
  lake.year = 2019;
  lake.label = label;
  lake.area_m2 = 1.0e6;
  lake.elevation_m = 1000.0;
  for (int d = 0; d < kDaysPerYear; ++d) {
    for (int v = 0; v < static_cast<int>(kNumObserved); ++v) lake.series(d, v) = n(rng);
  }
  return lake;
}

Dataset synthetic(int per_class, std::vector<Region> regions, std::uint64_t seed) {
  synth::SynthConfig sc;
  sc.lakes_per_class = per_class;
  sc.regions = std::move(regions);
  sc.seed = seed;
  return synth::generate(sc).dataset;
}

// 1. Reference gains and formulas reproduced with tolerance zero.
Outcome arithmetic() {
  Check c;
  c.require(eval::gain_points(0.8615, 0.7356) == 12.59, "OOD NO gain 86.15 - 73.56 != +12.59");
  c.require(eval::gain_points(25.0 / 28.0, 24.0 / 28.0) == 3.57, "ID NO gain 25/28 vs 24/28 != +3.57");
  c.require(preprocess::hv_anomaly(-20.0, -12.0) == -8.0, "hv_anomaly(-20, -12) != -8");
  c.require(preprocess::hv_anomaly(-15.5, -10.0) == -5.5, "hv_anomaly(-15.5, -10) != -5.5");
  c.require(preprocess::water_fraction(30, 120) == 25.0, "water_fraction(30, 120) != 25");
  c.require(preprocess::water_fraction(0, 7) == 0.0 && preprocess::water_fraction(7, 7) == 100.0,
            "water_fraction saturation cases");
  std::vector<Label> truth, constant;
  for (int i = 0; i < 1000; ++i) truth.push_back(kLabels[static_cast<std::size_t>(i % 4)]);
  constant.assign(truth.size(), Label::Refreeze);
  const auto m = eval::compute_metrics(constant, truth);
  c.require(m.accuracy == 0.25 && m.macro_recall == 0.25 && m.macro_precision == 0.0625,
            "constant-predictor metrics");
  c.note("gains +12.59 and +3.57 exact");
  return c.outcome();
}

// 2. Null rejection rate of the CI test and its power under strong dependence.
Outcome ci_calibration() {
  Check c;
  causal::DiscoveryConfig cfg;
  cfg.tau_max = 115;
  const int trials = 1000;
  int rejected = 0;
  std::size_t n = 0;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<LakeRecord> lakes;
    for (int i = 0; i < 2; ++i) {
      lakes.push_back(noise_lake("N" + std::to_string(i), kRegions[static_cast<std::size_t>(i)], Label::Buried,
                                 7919 * static_cast<std::uint64_t>(trial) + static_cast<std::uint64_t>(i)));
    }
    const auto panel = causal::pool_lakes(Dataset(lakes), cfg);
    n = panel.num_samples();
    const causal::CiTester tester(panel);
    std::vector<causal::LaggedVar> z;
    if (trial % 2 == 1) z = {{VariableId::S2Water, 0}, {VariableId::SDummy, 0}};
    rejected += tester.test({VariableId::T2m, 1}, {VariableId::HvAnom, 0}, z).p_value < 0.05;
  }
  const double rate = static_cast<double>(rejected) / trials;
  c.require(n == 500, "panel has " + std::to_string(n) + " samples, expected 500");
  c.require(rate >= 0.03 && rate <= 0.07, "null rejection rate " + fixed(rate, 3) + " outside [0.03, 0.07]");

  std::vector<LakeRecord> lakes;
  for (int i = 0; i < 2; ++i) {
    auto lake = noise_lake("D" + std::to_string(i), Region::CW, Label::Buried, 99 + static_cast<std::uint64_t>(i));
    lake.series.col(static_cast<Eigen::Index>(index_of(VariableId::HvAnom))) +=
        lake.series.col(static_cast<Eigen::Index>(index_of(VariableId::S2Water)));
    lakes.push_back(std::move(lake));
  }
  const auto panel = causal::pool_lakes(Dataset(lakes), cfg);
  const double p = causal::CiTester(panel).test({VariableId::S2Water, 0}, {VariableId::HvAnom, 0}, {}).p_value;
  c.require(p < 1e-6, "strong dependence p = " + sci(p));
  c.note("n=500, null rejection " + fixed(rate, 3) + ", dependent p=" + sci(p));
  return c.outcome();
}

// 3. Parents of hv_anom recovered on 10-lake synthetic panels.
Outcome discovery_recovery() {
  Check c;
  double precision = 0.0, recall = 0.0;
  int nuisance_runs = 0;
  const int seeds = 10;
  for (int seed = 0; seed < seeds; ++seed) {
    synth::SynthConfig sc;
    sc.lakes_per_class = 3;
    sc.seed = static_cast<std::uint64_t>(seed);
    sc.regions = {kRegions[static_cast<std::size_t>(seed) % kNumRegions]};
    const auto out = synth::generate(sc);
    std::vector<LakeRecord> lakes(out.dataset.lakes().begin(), out.dataset.lakes().begin() + 10);
    const Dataset ds(std::move(lakes), "ten lakes");
    causal::DiscoveryConfig cfg;
    cfg.tau_max = 7;
    cfg.alpha = 0.01;
    const auto graph = causal::discover_parents(causal::pool_lakes(ds, cfg), cfg);

    std::set<std::pair<VariableId, int>> truth, found;
    for (const auto& l : out.truth.parents(VariableId::HvAnom)) {
      if (!is_context(l.var)) truth.insert({l.var, l.lag});
    }
    bool nuisance = false;
    for (const auto& l : graph.parents(VariableId::HvAnom)) {
      if (is_context(l.var)) continue;
      found.insert({l.var, l.lag});
      nuisance |= l.var == VariableId::R2 || l.var == VariableId::Sp || l.var == VariableId::Sst;
    }
    std::size_t hits = 0;
    for (const auto& f : found) hits += truth.count(f);
    precision += found.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(found.size());
    recall += static_cast<double>(hits) / static_cast<double>(truth.size());
    nuisance_runs += nuisance;
  }
  precision /= seeds;
  recall /= seeds;
  c.require(precision >= 0.8, "precision " + fixed(precision, 3) + " < 0.8");
  c.require(recall >= 0.8, "recall " + fixed(recall, 3) + " < 0.8");
  c.require(nuisance_runs < 1, "nuisance parents in " + std::to_string(nuisance_runs) + "/10 runs");
  c.note("precision " + fixed(precision, 3) + ", recall " + fixed(recall, 3) + ", nuisance runs " +
         std::to_string(nuisance_runs) + "/10");
  return c.outcome();
}

std::vector<double> naive_convolve(const std::vector<double>& x, int kernel, int dilation) {
  const auto w = features::kernel_weights(kernel);
  const int n = static_cast<int>(x.size());
  std::vector<double> out(x.size());
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int j = 0; j < features::kKernelLength; ++j) {
      const int i = std::clamp(t + (j - 4) * dilation, 0, n - 1);
      acc += w[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(i)];
    }
    out[static_cast<std::size_t>(t)] = acc;
  }
  return out;
}

double naive_ppv(const std::vector<double>& conv, double bias) {
  std::size_t hits = 0;
  for (double v : conv) hits += v > bias;
  return static_cast<double>(hits) / static_cast<double>(conv.size());
}

std::vector<features::ChannelMatrix> dyadic_inputs(std::size_t count, std::size_t channels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(-512, 512);
  std::vector<features::ChannelMatrix> out(count);
  for (auto& cm : out) {
    cm.channels.resize(static_cast<Eigen::Index>(channels), kDaysPerYear);
    for (Eigen::Index i = 0; i < cm.channels.size(); ++i) cm.channels.data()[i] = u(rng) / 64.0;
    for (std::size_t ch = 0; ch < channels; ++ch) cm.spec.push_back({VariableId::HvAnom, static_cast<int>(ch)});
  }
  return out;
}

bool same_bits(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
}

// 4. Transform against a naive oracle, offset invariance, range, determinism.
Outcome transform_correctness() {
  Check c;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 10.0);
  double worst = 0.0;
  for (auto isa : simd::supported_isas()) {
    const auto& kernels = simd::kernels(isa);
    for (int length = 9; length <= 32; ++length) {
      std::vector<double> x(static_cast<std::size_t>(length));
      for (auto& v : x) v = n(rng);
      for (int dilation = 1; 8 * dilation <= length - 1; ++dilation) {
        for (int k = 0; k < features::kNumKernels; ++k) {
          const auto fast = features::convolve(x, k, dilation, kernels);
          const auto slow = naive_convolve(x, k, dilation);
          for (std::size_t t = 0; t < x.size(); ++t) worst = std::max(worst, std::abs(fast[t] - slow[t]));
          for (double bias : {-5.0, 0.0, slow[x.size() / 2]}) {
            const auto hits = kernels.count_greater(fast.data(), fast.size(), bias);
            worst = std::max(worst, std::abs(static_cast<double>(hits) / length - naive_ppv(slow, bias)));
          }
        }
      }
    }
  }
  c.require(worst <= 1e-12, "short-series oracle error " + sci(worst));

  features::TransformConfig cfg;
  cfg.features_budget = 2000;
  cfg.seed = 5;
  const auto inputs = dyadic_inputs(12, 2, 4);
  const auto params = features::fit_transform_params(inputs, cfg);
  const auto base = features::transform(inputs[2], params);
  bool oracle_exact = true;
  for (std::size_t ch = 0; ch < params.num_channels; ++ch) {
    const auto row_view = inputs[2].channels.row(static_cast<Eigen::Index>(ch));
    std::vector<double> row(row_view.begin(), row_view.end());
    for (int k = 0; k < features::kNumKernels; ++k) {
      for (std::size_t d = 0; d < params.dilations.size(); ++d) {
        const auto conv = naive_convolve(row, k, params.dilations[d]);
        const auto offset = params.bias_offset(ch, k, d);
        for (int b = 0; b < params.biases_per_dilation[d]; ++b) {
          const auto i = offset + static_cast<std::size_t>(b);
          oracle_exact &= base(static_cast<Eigen::Index>(i)) == naive_ppv(conv, params.biases[i]);
        }
      }
    }
  }
  c.require(oracle_exact, "365-day transform differs from the naive oracle");

  bool offsets = true;
  for (double shift : {3.0, -1024.5, 1e6 + 0.25}) {
    auto moved = inputs[2];
    moved.channels.array() += shift;
    offsets &= features::transform(moved, params) == base;
  }
  c.require(offsets, "constant offset changed features");

  const auto all1 = features::transform_all(inputs, params, 1);
  c.require(all1.minCoeff() >= 0.0 && all1.maxCoeff() <= 1.0, "feature outside [0, 1]");
  auto cfg8 = cfg;
  cfg8.jobs = 8;
  c.require(features::fit_transform_params(inputs, cfg8) == params, "biases differ between 1 and 8 workers");
  c.require(same_bits(all1, features::transform_all(inputs, params, 8)), "features differ between 1 and 8 workers");
  c.note("oracle max error " + sci(worst) + " on lengths 9-32 (" +
         std::to_string(simd::supported_isas().size()) + " ISAs), offsets exact, 1 vs 8 workers bitwise");
  return c.outcome();
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

Eigen::MatrixXd normal_equations(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double alpha) {
  const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd yc = y.rowwise() - y.colwise().mean();
  const Eigen::MatrixXd gram = xc.transpose() * xc + alpha * Eigen::MatrixXd::Identity(x.cols(), x.cols());
  return gram.ldlt().solve(xc.transpose() * yc);
}

double explicit_loo_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double alpha) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::MatrixXd xi(x.rows() - 1, x.cols()), yi(y.rows() - 1, y.cols());
    for (Eigen::Index r = 0, k = 0; r < x.rows(); ++r) {
      if (r == i) continue;
      xi.row(k) = x.row(r);
      yi.row(k++) = y.row(r);
    }
    const Eigen::MatrixXd w = normal_equations(xi, yi, alpha);
    const Eigen::RowVectorXd intercept = yi.colwise().mean() - xi.colwise().mean() * w;
    total += (y.row(i) - (x.row(i) * w + intercept)).squaredNorm();
  }
  return total;
}

// 5. Ridge solution and LOO alpha selection against explicit oracles.
Outcome ridge_correctness() {
  Check c;
  std::mt19937_64 rng(1);
  double worst_w = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd x = 2.0 * random_matrix(5, 3, rng);
    const Eigen::MatrixXd y = random_matrix(5, 2, rng);
    const classify::RidgeSolver solver(x, y);
    for (double alpha : classify::default_alpha_grid()) {
      worst_w = std::max(worst_w, (solver.weights(alpha) - normal_equations(x, y, alpha)).cwiseAbs().maxCoeff());
    }
  }
  c.require(worst_w <= 1e-8, "normal-equation error " + sci(worst_w));

  double worst_loo = 0.0;
  int alpha_mismatch = 0;
  const auto grid = classify::default_alpha_grid();
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index rows = 8 + trial % 13;
    std::vector<Label> y;
    for (Eigen::Index i = 0; i < rows; ++i) y.push_back(kLabels[static_cast<std::size_t>(i % 4)]);
    Eigen::MatrixXd x = random_matrix(rows, 6, rng);
    for (Eigen::Index i = 0; i < rows; ++i)
      x(i, 0) += 0.8 * static_cast<double>(index_of(y[static_cast<std::size_t>(i)]));
    const auto model = classify::ridge_fit(x, y, grid);
    Eigen::VectorXd mean, scale;
    classify::standardize_columns(x, mean, scale);
    const Eigen::MatrixXd xs =
        ((x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array()).matrix();
    Eigen::MatrixXd t = Eigen::MatrixXd::Constant(rows, static_cast<Eigen::Index>(model.classes.size()), -1.0);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto label = y[static_cast<std::size_t>(i)];
      t(i, std::find(model.classes.begin(), model.classes.end(), label) - model.classes.begin()) = 1.0;
    }
    std::size_t best = 0;
    std::vector<double> errors;
    for (std::size_t a = 0; a < grid.size(); ++a) {
      errors.push_back(explicit_loo_error(xs, t, grid[a]));
      worst_loo = std::max(worst_loo, std::abs(model.loo_errors[a] - errors[a]));
      if (errors[a] < errors[best]) best = a;
    }
    alpha_mismatch += std::abs(model.chosen_alpha - grid[best]) > 1e-6 * grid[best];
  }
  c.require(worst_loo <= 1e-6, "LOO error mismatch " + sci(worst_loo));
  c.require(alpha_mismatch == 0, std::to_string(alpha_mismatch) + " selected alphas differ from explicit LOO");
  c.note("weights max error " + sci(worst_w) + ", LOO max error " + sci(worst_loo));
  return c.outcome();
}

// 6. Global stratified-split accuracy of the causal variant.
Outcome end_to_end_id() {
  Check c;
  double total = 0.0, lowest = 1.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = synthetic(25, {kRegions.begin(), kRegions.end()}, seed);
    eval::EvalConfig cfg;
    cfg.seed = seed;
    cfg.pipeline.seed = seed;
    const auto report = eval::global_eval(ds, cfg);
    const double acc = report.runs.at(0).causal.accuracy;
    total += acc;
    lowest = std::min(lowest, acc);
  }
  const double mean = total / 5.0;
  c.require(mean >= 0.90, "mean causal accuracy " + fixed(mean, 4) + " < 0.90");
  c.note("mean causal accuracy " + fixed(mean, 4) + ", lowest " + fixed(lowest, 4));
  return c.outcome();
}

// 7. Leave-one-region-in: causal beats the baseline on the five unseen regions.
Outcome end_to_end_ood() {
  Check c;
  std::array<double, kNumRegions> causal{}, baseline{};
  int runs_behind = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = synthetic(25, {kRegions.begin(), kRegions.end()}, seed);
    eval::EvalConfig cfg;
    cfg.seed = seed;
    cfg.pipeline.seed = seed;
    const auto report = eval::evaluate(ds, eval::Protocol::RegionOod, cfg);
    for (const auto& run : report.runs) {
      causal[index_of(*run.region)] += run.causal.accuracy / 5.0;
      baseline[index_of(*run.region)] += run.baseline.accuracy / 5.0;
      runs_behind += run.causal.accuracy < run.baseline.accuracy;
    }
  }
  double gain = 0.0;
  std::string per_region;
  for (Region r : kRegions) {
    const auto i = index_of(r);
    const double g = eval::gain_points(causal[i], baseline[i]);
    gain += g / kNumRegions;
    c.require(causal[i] >= baseline[i], std::string(to_string(r)) + " causal " + fixed(causal[i], 4) +
                                            " < baseline " + fixed(baseline[i], 4));
    per_region += std::string(to_string(r)) + " " + (g >= 0 ? "+" : "") + fixed(g, 2) + " ";
  }
  c.require(gain > 3.0, "mean gain " + fixed(gain, 2) + " <= 3 points");
  c.note("mean gain +" + fixed(gain, 2) + " points; " + per_region + "; single runs behind baseline: " +
         std::to_string(runs_behind) + "/30");
  return c.outcome();
}

// 8. Replacing test content with noise leaves every fitted artifact unchanged.
Outcome leakage_audit() {
  Check c;
  const auto ds = synthetic(10, {Region::CW, Region::NE, Region::SW}, 8);
  const auto split = eval::stratified_split(ds, 0.8, 8);
  std::vector<LakeRecord> noised;
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    auto lake = noise_lake(split.test[i].lake_id, split.test[i].region, split.test[i].label, 500 + i);
    lake.year = split.test[i].year;
    noised.push_back(std::move(lake));
  }
  const Dataset noise(std::move(noised));
  for (auto variant : {classify::Variant::Causal, classify::Variant::Baseline}) {
    for (auto source : {classify::GraphSource::Global, classify::GraphSource::PerRegion}) {
      if (variant == classify::Variant::Baseline && source == classify::GraphSource::PerRegion) continue;
      classify::PipelineConfig cfg;
      cfg.variant = variant;
      cfg.graph_source = source;
      cfg.seed = 8;
      classify::PipelineTrace trace;
      const auto real = classify::run_pipeline(split.train, split.test, cfg, &trace);
      const auto fake = classify::run_pipeline(split.train, noise, cfg);
      const std::string name =
          std::string(classify::to_string(variant)) + "/" + std::string(classify::to_string(source));
      c.require(real.fitted == fake.fitted, name + " fitted artifacts changed");
      c.require(classify::pipeline_to_json(real.fitted).dump() == classify::pipeline_to_json(fake.fitted).dump(),
                name + " serialized model changed");
      for (const auto& lake : split.test.lakes()) {
        const bool seen = std::find(trace.training_units.begin(), trace.training_units.end(), lake.unit_key()) !=
                          trace.training_units.end();
        c.require(!seen, name + " fitted on test unit " + lake.unit_key());
      }
    }
  }
  bool refused = false;
  try {
    classify::run_pipeline(split.train, split.train.subset({0}), classify::PipelineConfig{});
  } catch (const LeakageError&) {
    refused = true;
  }
  c.require(refused, "overlapping train/test accepted");
  c.note("graph, biases, standardization and alpha bit-identical for causal (global, per-region) and baseline");
  return c.outcome();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "arithmetic fidelity", 1.0, arithmetic},
      {2, "CI-test calibration", 30.0, ci_calibration},
      {3, "discovery recovery", 300.0, discovery_recovery},
      {4, "transform correctness", 60.0, transform_correctness},
      {5, "ridge correctness", 60.0, ridge_correctness},
      {6, "end-to-end ID", 600.0, end_to_end_id},
      {7, "end-to-end OOD", 1200.0, end_to_end_ood},
      {8, "leakage audit", 120.0, leakage_audit},
  };
  std::cout << "simd kernels: " << simd::to_string(simd::active_isa()) << std::endl;
  int failed = 0;
  for (const auto& crit : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = crit.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > crit.budget_s) {
      out.pass = false;
      out.detail += " | runtime " + fixed(secs, 1) + " s over budget " + fixed(crit.budget_s, 0) + " s";
    }
    failed += !out.pass;
    std::cout << "criterion " << crit.id << ": " << (out.pass ? "PASS" : "FAIL") << " [" << crit.name << ", "
              << fixed(secs, 2) << " s / " << fixed(crit.budget_s, 0) << " s] " << out.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
