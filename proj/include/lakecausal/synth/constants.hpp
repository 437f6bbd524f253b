#pragma once

// Every magnitude used by the synthetic generator, in one place.
//
// SYNTHETIC: these numbers are calibration-free stand-ins chosen to give the
// four lake classes qualitatively distinct water-fraction and backscatter
// shapes. They are not estimates of any real ice-sheet quantity.

#include <array>

#include "lakecausal/core/lake.hpp"

namespace lakecausal::synth::constants {

// Air temperature (K): seasonal cosine peaking on kT2mPeakDay plus AR(1) noise.
inline constexpr double kT2mMean = 262.0;
inline constexpr double kT2mAmplitude = 12.0;
inline constexpr double kT2mPeakDay = 200.0;
inline constexpr double kT2mPhi = 0.8;
inline constexpr double kT2mNoise = 1.5;
inline constexpr double kMeltPoint = 271.15;
// Regional temperature offsets (K), canonical region order.
inline constexpr std::array<double, kNumRegions> kRegionT2mOffset = {0.0, -1.5, -2.0, -0.5, 1.0, 1.5};

// Lake onset: first day cumulative melt (degree-days) reaches this value.
inline constexpr double kOnsetMelt = 8.0;
inline constexpr int kOnsetFallbackDay = 170;
// Filling: linear rise to the peak water fraction (%) over a few days.
inline constexpr double kPeakMin = 85.0;
inline constexpr double kPeakMax = 95.0;
inline constexpr int kRiseMin = 8;
inline constexpr int kRiseMax = 14;
// Earliest event day relative to the end of filling.
inline constexpr int kEventMargin = 5;

// refreeze: smooth exponential decay late in the season.
inline constexpr int kRefreezeStartMin = 230;
inline constexpr int kRefreezeStartMax = 260;
inline constexpr double kRefreezeTauMin = 25.0;
inline constexpr double kRefreezeTauMax = 35.0;
// buried: fast exponential decay late in the season.
inline constexpr int kBuriedStartMin = 225;
inline constexpr int kBuriedStartMax = 250;
inline constexpr double kBuriedTauMin = 3.0;
inline constexpr double kBuriedTauMax = 6.0;
// slow drainage: linear decline over several weeks, mid season.
inline constexpr int kSlowStartMin = 190;
inline constexpr int kSlowStartMax = 215;
inline constexpr int kSlowDurationMin = 21;
inline constexpr int kSlowDurationMax = 42;
// rapid drainage: drains within 1-3 days, mid season. Fractions of the peak
// left after each drainage day, by window length.
inline constexpr int kRapidStartMin = 185;
inline constexpr int kRapidStartMax = 215;
inline constexpr std::array<std::array<double, 3>, 3> kRapidProfile = {{
    {0.0, 0.0, 0.0},
    {0.2, 0.0, 0.0},
    {0.25, 0.05, 0.0},
}};

// Optical water fraction noise: AR(1), damped when the template is below
// kNoiseRampLevel so that dry lakes read close to zero. Innovations are
// clipped at kS2Clip standard deviations, which bounds day-over-day noise.
inline constexpr double kS2Phi = 0.6;
inline constexpr double kS2Noise = 1.5;
inline constexpr double kS2Clip = 2.5;
inline constexpr double kLsNoise = 4.0;
inline constexpr double kNoiseRampLevel = 10.0;

// Solar zenith angles (degrees): seasonal cosine, lowest at the solstice.
inline constexpr double kZenithMean = 65.0;
inline constexpr double kZenithAmplitude = 18.0;
inline constexpr double kZenithNoise = 1.0;
inline constexpr double kLsZenithOffset = 2.0;

// Backscatter anomaly (dB): autoregressive on its own lags 1-4, driven by the
// optical water fraction, plus a per-lake drift. kHvWater scales the water
// level; kHvDrain scales the day-over-day loss of water, which produces the
// backscatter spike of rapid drainage.
inline constexpr std::array<double, 4> kHvAutoregression = {0.3, 0.15, 0.12, 0.12};
inline constexpr double kHvWater = -0.04;
inline constexpr double kHvDrain = 0.05;
inline constexpr double kHvNoise = 0.25;
inline constexpr std::array<double, kNumClasses> kHvClassDrift = {0.0, -2.2, -0.2, 0.0};
inline constexpr double kHvDriftSpread = 0.15;

// Background reanalysis variables: level, AR(1) coefficient, innovation sd.
struct Background {
  double level;
  double phi;
  double noise;
  double signature_amplitude;  // at spurious_strength 1
};
inline constexpr Background kR2 = {80.0, 0.7, 3.0, 6.0};
inline constexpr Background kSp = {700.0, 0.9, 1.5, 3.0};
inline constexpr Background kSst = {272.0, 0.95, 0.2, 0.6};

// Spurious signatures: a sinusoid between kSignatureStart and kSignatureEnd
// whose period encodes a class. Periods per variable, canonical class order.
inline constexpr int kSignatureStart = 100;
inline constexpr int kSignatureEnd = 280;
inline constexpr std::array<double, kNumClasses> kR2Periods = {5.0, 9.0, 15.0, 25.0};
inline constexpr std::array<double, kNumClasses> kSpPeriods = {25.0, 5.0, 9.0, 15.0};
inline constexpr std::array<double, kNumClasses> kSstPeriods = {15.0, 25.0, 5.0, 9.0};

// Region whose label drives each nuisance variable (canonical region order).
inline constexpr std::array<VariableId, kNumRegions> kRegionNuisance = {
    VariableId::R2, VariableId::Sp, VariableId::Sst, VariableId::R2, VariableId::Sp, VariableId::Sst};

inline constexpr double kAreaMin = 1.0e5;
inline constexpr double kAreaMax = 5.0e6;
inline constexpr double kElevationMin = 500.0;
inline constexpr double kElevationMax = 1800.0;

}  // namespace lakecausal::synth::constants
