#include "lakecausal/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "lakecausal/core/error.hpp"
#include "lakecausal/synth/constants.hpp"

namespace lakecausal::synth {
namespace {

namespace k = constants;

constexpr int N = kDaysPerYear;

class Rng {
 public:
  Rng(std::uint64_t seed, std::size_t region, std::size_t label, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(region), static_cast<std::uint32_t>(label),
                      static_cast<std::uint32_t>(index)};
    engine_.seed(seq);
  }
  double normal(double sd = 1.0) { return sd * std::normal_distribution<double>(0.0, 1.0)(engine_); }
  double clipped_normal(double sd, double limit) { return sd * std::clamp(normal(), -limit, limit); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

 private:
  std::mt19937_64 engine_;
};

double seasonal(int day, double peak_day) {
  return std::cos(2.0 * std::numbers::pi * (static_cast<double>(day) - peak_day) / 365.0);
}

const k::Background& background(VariableId v) {
  switch (v) {
    case VariableId::R2: return k::kR2;
    case VariableId::Sp: return k::kSp;
    case VariableId::Sst: return k::kSst;
    default: throw DomainError("no background process for " + std::string(to_string(v)));
  }
}

// Water-fraction template (percent) for days 1..365, index 0 = day 1.
std::array<double, N> water_template(Label label, int onset, Rng& rng) {
  std::array<double, N> w{};
  const double peak = rng.uniform(k::kPeakMin, k::kPeakMax);
  const int rise = rng.integer(k::kRiseMin, k::kRiseMax);
  const int full = onset + rise;
  auto start_between = [&](int lo, int hi) { return std::max(rng.integer(lo, hi), full + k::kEventMargin); };

  auto level_before = [&](int day) {
    if (day < onset) return 0.0;
    if (day >= full) return peak;
    return peak * static_cast<double>(day - onset) / static_cast<double>(rise);
  };

  switch (label) {
    case Label::Refreeze:
    case Label::Buried: {
      const bool refreeze = label == Label::Refreeze;
      const int start = refreeze ? start_between(k::kRefreezeStartMin, k::kRefreezeStartMax)
                                 : start_between(k::kBuriedStartMin, k::kBuriedStartMax);
      const double tau = refreeze ? rng.uniform(k::kRefreezeTauMin, k::kRefreezeTauMax)
                                  : rng.uniform(k::kBuriedTauMin, k::kBuriedTauMax);
      for (int d = 1; d <= N; ++d) {
        w[d - 1] = d < start ? level_before(d) : peak * std::exp(-static_cast<double>(d - start) / tau);
      }
      break;
    }
    case Label::SlowDrainage: {
      const int start = start_between(k::kSlowStartMin, k::kSlowStartMax);
      const int duration = rng.integer(k::kSlowDurationMin, k::kSlowDurationMax);
      for (int d = 1; d <= N; ++d) {
        if (d < start) {
          w[d - 1] = level_before(d);
        } else {
          w[d - 1] = peak * std::max(0.0, 1.0 - static_cast<double>(d - start) / duration);
        }
      }
      break;
    }
    case Label::RapidDrainage: {
      const int start = start_between(k::kRapidStartMin, k::kRapidStartMax);
      const int window = rng.integer(1, 3);
      const auto& profile = k::kRapidProfile[static_cast<std::size_t>(window - 1)];
      for (int d = 1; d <= N; ++d) {
        const int step = d - start;
        if (step < 0) {
          w[d - 1] = level_before(d);
        } else if (step < window) {
          w[d - 1] = peak * profile[static_cast<std::size_t>(step)];
        } else {
          w[d - 1] = 0.0;
        }
      }
      break;
    }
  }
  return w;
}

LakeRecord make_lake(const SynthConfig& cfg, Region region, Label label, int index) {
  Rng rng(cfg.seed, index_of(region), index_of(label), static_cast<std::size_t>(index));
  const auto& scale = cfg.noise_scale;
  auto noise_of = [&](VariableId v) { return scale[index_of(v)]; };

  LakeRecord lake;
  char id[32];
  std::snprintf(id, sizeof id, "%s-%04d", std::string(to_string(region)).c_str(),
                static_cast<int>(index_of(label)) * cfg.lakes_per_class + index + 1);
  lake.lake_id = id;
  lake.region = region;
  lake.year = cfg.year;
  lake.label = label;
  lake.area_m2 = rng.uniform(k::kAreaMin, k::kAreaMax);
  lake.elevation_m = rng.uniform(k::kElevationMin, k::kElevationMax);
  auto& s = lake.series;

  // Temperature and melt onset.
  const double offset = k::kRegionT2mOffset[index_of(region)];
  double ar = 0.0;
  double melt = 0.0;
  int onset = 0;
  for (int d = 1; d <= N; ++d) {
    ar = k::kT2mPhi * ar + rng.normal(k::kT2mNoise * noise_of(VariableId::T2m));
    const double t2m = k::kT2mMean + offset + k::kT2mAmplitude * seasonal(d, k::kT2mPeakDay) + ar;
    s(d - 1, index_of(VariableId::T2m)) = t2m;
    melt += std::max(0.0, t2m - k::kMeltPoint);
    if (onset == 0 && melt >= k::kOnsetMelt) onset = d;
  }
  if (onset == 0) onset = k::kOnsetFallbackDay;

  // Optical water fractions.
  const auto tmpl = water_template(label, onset, rng);
  double s2_ar = 0.0;
  for (int d = 1; d <= N; ++d) {
    const double ramp = std::min(1.0, tmpl[d - 1] / k::kNoiseRampLevel);
    s2_ar = k::kS2Phi * s2_ar + rng.clipped_normal(k::kS2Noise * noise_of(VariableId::S2Water), k::kS2Clip);
    const double s2 = std::clamp(tmpl[d - 1] + ramp * s2_ar, 0.0, 100.0);
    const double ls = std::clamp(s2 + ramp * rng.normal(k::kLsNoise * noise_of(VariableId::LsWater)), 0.0, 100.0);
    s(d - 1, index_of(VariableId::S2Water)) = s2;
    s(d - 1, index_of(VariableId::LsWater)) = ls;
  }

  // Zenith angles.
  for (int d = 1; d <= N; ++d) {
    const double base = k::kZenithMean - k::kZenithAmplitude * seasonal(d, 172.0);
    s(d - 1, index_of(VariableId::S2Zenith)) = base + rng.normal(k::kZenithNoise * noise_of(VariableId::S2Zenith));
    s(d - 1, index_of(VariableId::LsZenith)) =
        base + k::kLsZenithOffset + rng.normal(k::kZenithNoise * noise_of(VariableId::LsZenith));
  }

  // Background variables with their period signatures. Only the region's
  // nuisance variable follows the label.
  const VariableId linked = nuisance_variable(region);
  for (VariableId v : {VariableId::R2, VariableId::Sp, VariableId::Sst}) {
    const auto& bg = background(v);
    const Label shown = v == linked ? label : kLabels[static_cast<std::size_t>(rng.integer(0, kNumClasses - 1))];
    const double period = signature_period(v, shown);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double amplitude = bg.signature_amplitude * cfg.spurious_strength;
    double x = 0.0;
    for (int d = 1; d <= N; ++d) {
      x = bg.phi * x + rng.normal(bg.noise * noise_of(v));
      double value = bg.level + x;
      if (d >= k::kSignatureStart && d <= k::kSignatureEnd) {
        value += amplitude * std::sin(2.0 * std::numbers::pi * d / period + phase);
      }
      s(d - 1, index_of(v)) = value;
    }
  }

  // Backscatter anomaly.
  const double drift = k::kHvClassDrift[index_of(label)] + rng.normal(k::kHvDriftSpread);
  const auto hv_col = index_of(VariableId::HvAnom);
  const auto s2_col = index_of(VariableId::S2Water);
  for (int t = 0; t < N; ++t) {
    double hv = drift + rng.normal(k::kHvNoise * noise_of(VariableId::HvAnom));
    for (std::size_t lag = 1; lag <= k::kHvAutoregression.size(); ++lag) {
      if (t >= static_cast<int>(lag)) hv += k::kHvAutoregression[lag - 1] * s(t - static_cast<int>(lag), hv_col);
    }
    hv += k::kHvWater * s(t, s2_col);
    if (t >= 1) hv += k::kHvDrain * (s(t - 1, s2_col) - s(t, s2_col));
    s(t, hv_col) = hv;
  }
  return lake;
}

}  // namespace

void SynthConfig::validate() const {
  if (lakes_per_class < 1) throw ConfigError("lakes_per_class must be at least 1");
  if (lakes_per_class > 9999 / static_cast<int>(kNumClasses)) throw ConfigError("lakes_per_class too large");
  if (regions.empty()) throw ConfigError("at least one region is required");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (std::find(regions.begin(), regions.begin() + static_cast<std::ptrdiff_t>(i), regions[i]) !=
        regions.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw ConfigError("duplicate region " + std::string(to_string(regions[i])));
    }
  }
  if (!(spurious_strength >= 0.0) || !std::isfinite(spurious_strength)) {
    throw ConfigError("spurious_strength must be finite and non-negative");
  }
  for (double n : noise_scale) {
    if (!(n >= 0.0) || !std::isfinite(n)) throw ConfigError("noise scales must be finite and non-negative");
  }
}

VariableId nuisance_variable(Region region) { return k::kRegionNuisance[index_of(region)]; }

double signature_period(VariableId var, Label label) {
  switch (var) {
    case VariableId::R2: return k::kR2Periods[index_of(label)];
    case VariableId::Sp: return k::kSpPeriods[index_of(label)];
    case VariableId::Sst: return k::kSstPeriods[index_of(label)];
    default: throw DomainError(std::string(to_string(var)) + " carries no signature");
  }
}

causal::CausalGraph truth_graph() {
  causal::CausalGraph g;
  g.tau_max = 7;
  g.alpha = 0.01;
  auto& links = g.targets[VariableId::HvAnom];
  for (std::size_t lag = 1; lag <= k::kHvAutoregression.size(); ++lag) {
    links.push_back({VariableId::HvAnom, static_cast<int>(lag), 0.0, k::kHvAutoregression[lag - 1]});
  }
  links.push_back({VariableId::S2Water, 0, 0.0, k::kHvWater - k::kHvDrain});
  links.push_back({VariableId::S2Water, 1, 0.0, k::kHvDrain});
  links.push_back({VariableId::SDummy, 0, 0.0, 1.0});
  g.sort_links();
  return g;
}

SynthOutput generate(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<Region> regions;
  for (Region r : kRegions) {
    if (std::find(cfg.regions.begin(), cfg.regions.end(), r) != cfg.regions.end()) regions.push_back(r);
  }
  std::vector<LakeRecord> lakes;
  lakes.reserve(regions.size() * kNumClasses * static_cast<std::size_t>(cfg.lakes_per_class));
  for (Region r : regions) {
    for (Label l : kLabels) {
      for (int i = 0; i < cfg.lakes_per_class; ++i) lakes.push_back(make_lake(cfg, r, l, i));
    }
  }
  char provenance[96];
  std::snprintf(provenance, sizeof provenance, "synthetic seed=%llu lakes_per_class=%d",
                static_cast<unsigned long long>(cfg.seed), cfg.lakes_per_class);
  return {Dataset(std::move(lakes), provenance), truth_graph()};
}

}  // namespace lakecausal::synth
