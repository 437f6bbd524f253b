#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lakecausal/core/dataset.hpp"

namespace lakecausal::preprocess {

using DailySeries = Eigen::Matrix<double, kDaysPerYear, 1>;

enum class Sensor { Sentinel2, Landsat8 };

// Top-of-atmosphere reflectance grids of one optical scene over a lake.
// Sentinel-2 scenes carry a cirrus band; Landsat-8 scenes do not.
struct PixelGrid {
  Sensor sensor = Sensor::Sentinel2;
  Eigen::MatrixXd blue;
  Eigen::MatrixXd green;
  Eigen::MatrixXd red;
  Eigen::MatrixXd swir;
  std::optional<Eigen::MatrixXd> cirrus;

  // Throws DomainError on empty or mismatched grids or a wrong cirrus presence.
  void validate() const;
};

struct PreprocessConfig {
  double ndwi_threshold_s2 = 0.18;
  double ndwi_threshold_l8 = 0.19;
  double cloud_swir_threshold = 0.1;
  double cloud_cirrus_threshold = 0.1;
  int median_window_days = 12;
  double zenith_max_deg = 70.0;
  double spike_mad_factor = 5.0;
  double mad_floor = 1e-6;
  // Neighbours on each side consulted by the spike test.
  int spike_neighbors = 3;
  // false: interpolate to daily, then median-filter (the default order).
  bool median_before_interpolation = false;

  void validate() const;
};

struct MaskResult {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> water;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> cloud;
  std::size_t n_water = 0;
  std::size_t n_valid = 0;
};

struct Observation {
  int day = 0;
  double value = 0.0;
};

struct RawObservation {
  int day = 0;
  double value = 0.0;
  std::optional<double> zenith_deg;
};

/// Backscatter contrast between lake interior and surrounding buffer, in dB.
double hv_anomaly(double hv_lake_db, double hv_out_db);

/// Percentage of valid pixels classified as water. Throws DomainError when
/// there are no valid pixels or more water than valid pixels.
double water_fraction(std::size_t n_water, std::size_t n_total);

/// Cloud and water masks of an optical scene.
///
/// cloud = swir > cloud_swir_threshold, or (Sentinel-2 only) cirrus >
/// cloud_cirrus_threshold. water = not cloud and NDWI > the sensor threshold,
/// with NDWI = (blue - red) / (blue + red). A pixel whose blue + red is zero
/// has no NDWI and is excluded from n_valid.
MaskResult mask_pixels(const PixelGrid& grid, const PreprocessConfig& cfg);

// Linear interpolation onto days 1..365 with nearest-value extrapolation
// outside the observed span. Days must be strictly increasing in 1..365.
DailySeries interpolate_daily(std::span<const Observation> sparse);

// Centered median over [t - floor(w/2), t + ceil(w/2) - 1], shrunk at the ends.
DailySeries rolling_median(const DailySeries& series, int window);

// Drops high-zenith observations, then spikes that stray from the median of
// their retained neighbours by more than spike_mad_factor * MAD.
std::vector<RawObservation> filter_outliers(std::span<const RawObservation> series,
                                            const PreprocessConfig& cfg);

// Full per-variable chain: filter_outliers, interpolate_daily, rolling_median
// (order of the last two per cfg). Returns nullopt when nothing survives.
std::optional<DailySeries> densify(std::span<const RawObservation> series, const PreprocessConfig& cfg);

// ---- raw observation files --------------------------------------------------

// lake_id -> variable name -> observations sorted by day.
using RawTable = std::map<std::string, std::map<std::string, std::vector<RawObservation>>>;

// Reads `lake_id,day,variable,value,zenith_deg`. Besides the nine observed
// variable names, `hv_lake` and `hv_out` rows are accepted and paired by day
// into hv_anom observations.
RawTable load_raw_observations(const std::filesystem::path& path);

// Reads `lake_id,region,year,label,area_m2,elevation_m`.
std::vector<LakeRecord> load_lake_metadata(const std::filesystem::path& path);

struct PreprocessOutcome {
  Dataset dataset;
  std::vector<std::string> warnings;
};

// Builds dense lakes from raw observations; lakes with a variable left empty
// after filtering are dropped and reported in `warnings`.
PreprocessOutcome preprocess_raw(const RawTable& raw, const std::vector<LakeRecord>& metadata,
                                 const PreprocessConfig& cfg, int jobs = 1);

// Re-applies the smoothing stage to an already dense dataset.
Dataset resmooth(const Dataset& ds, const PreprocessConfig& cfg);

}  // namespace lakecausal::preprocess
