#include "lakecausal/preprocess/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "lakecausal/core/error.hpp"
#include "lakecausal/core/parallel.hpp"

namespace lakecausal::preprocess {
namespace {

double median_of(std::vector<double>& values) {
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// Median over a centered day window of the sparse observations themselves.
std::vector<Observation> sparse_median(std::span<const Observation> obs, int window) {
  const int before = window / 2;
  const int after = window - before - 1;
  std::vector<Observation> out;
  out.reserve(obs.size());
  std::vector<double> buf;
  for (const auto& o : obs) {
    buf.clear();
    for (const auto& p : obs) {
      if (p.day >= o.day - before && p.day <= o.day + after) buf.push_back(p.value);
    }
    out.push_back({o.day, median_of(buf)});
  }
  return out;
}

}  // namespace

void PixelGrid::validate() const {
  if (blue.size() == 0) throw DomainError("pixel grid is empty");
  auto same_shape = [&](const Eigen::MatrixXd& m) {
    return m.rows() == blue.rows() && m.cols() == blue.cols();
  };
  if (!same_shape(green) || !same_shape(red) || !same_shape(swir)) {
    throw DomainError("band grids differ in size");
  }
  if (sensor == Sensor::Sentinel2) {
    if (!cirrus) throw DomainError("Sentinel-2 grid needs a cirrus band");
    if (!same_shape(*cirrus)) throw DomainError("band grids differ in size");
  } else if (cirrus) {
    throw DomainError("Landsat-8 grid has no cirrus band");
  }
}

void PreprocessConfig::validate() const {
  if (!(ndwi_threshold_s2 > 0 && ndwi_threshold_l8 > 0 && cloud_swir_threshold > 0 &&
        cloud_cirrus_threshold > 0 && zenith_max_deg > 0 && spike_mad_factor > 0 && mad_floor > 0)) {
    throw ConfigError("preprocess thresholds must be positive");
  }
  if (median_window_days < 1) throw ConfigError("median window must be at least 1 day");
  if (spike_neighbors < 1) throw ConfigError("spike test needs at least one neighbour per side");
}

double hv_anomaly(double hv_lake_db, double hv_out_db) {
  if (!std::isfinite(hv_lake_db) || !std::isfinite(hv_out_db)) {
    throw DomainError("hv_anomaly: backscatter must be finite");
  }
  return hv_lake_db - hv_out_db;
}

double water_fraction(std::size_t n_water, std::size_t n_total) {
  if (n_total == 0) throw DomainError("water_fraction: no valid pixels");
  if (n_water > n_total) throw DomainError("water_fraction: more water pixels than valid pixels");
  return 100.0 * static_cast<double>(n_water) / static_cast<double>(n_total);
}

MaskResult mask_pixels(const PixelGrid& grid, const PreprocessConfig& cfg) {
  grid.validate();
  const double ndwi_threshold =
      grid.sensor == Sensor::Sentinel2 ? cfg.ndwi_threshold_s2 : cfg.ndwi_threshold_l8;
  const auto rows = grid.blue.rows();
  const auto cols = grid.blue.cols();

  MaskResult out;
  out.water.setConstant(rows, cols, false);
  out.cloud.setConstant(rows, cols, false);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      bool cloud = grid.swir(r, c) > cfg.cloud_swir_threshold;
      if (grid.cirrus) cloud = cloud || (*grid.cirrus)(r, c) > cfg.cloud_cirrus_threshold;
      out.cloud(r, c) = cloud;
      if (cloud) continue;
      const double denom = grid.blue(r, c) + grid.red(r, c);
      if (denom == 0.0) continue;
      ++out.n_valid;
      const double ndwi = (grid.blue(r, c) - grid.red(r, c)) / denom;
      if (ndwi > ndwi_threshold) {
        out.water(r, c) = true;
        ++out.n_water;
      }
    }
  }
  return out;
}

DailySeries interpolate_daily(std::span<const Observation> sparse) {
  if (sparse.empty()) throw DomainError("interpolate_daily: no observations");
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    if (sparse[i].day < 1 || sparse[i].day > kDaysPerYear) {
      throw DomainError("interpolate_daily: day outside 1..365");
    }
    if (i > 0 && sparse[i].day <= sparse[i - 1].day) {
      throw DomainError("interpolate_daily: days must be strictly increasing");
    }
  }

  DailySeries out;
  std::size_t seg = 0;
  for (int day = 1; day <= kDaysPerYear; ++day) {
    double value;
    if (day <= sparse.front().day) {
      value = sparse.front().value;
    } else if (day >= sparse.back().day) {
      value = sparse.back().value;
    } else {
      while (sparse[seg + 1].day < day) ++seg;
      const auto& a = sparse[seg];
      const auto& b = sparse[seg + 1];
      if (day == b.day) {
        value = b.value;
      } else {
        const double w = static_cast<double>(day - a.day) / static_cast<double>(b.day - a.day);
        value = a.value + w * (b.value - a.value);
      }
    }
    out(day - 1) = value;
  }
  return out;
}

DailySeries rolling_median(const DailySeries& series, int window) {
  if (window < 1) throw DomainError("rolling_median: window must be >= 1");
  const int before = window / 2;
  const int after = window - before - 1;
  DailySeries out;
  std::vector<double> buf;
  buf.reserve(static_cast<std::size_t>(window));
  for (int t = 0; t < kDaysPerYear; ++t) {
    const int lo = std::max(0, t - before);
    const int hi = std::min(kDaysPerYear - 1, t + after);
    buf.assign(series.data() + lo, series.data() + hi + 1);
    out(t) = median_of(buf);
  }
  return out;
}

std::vector<RawObservation> filter_outliers(std::span<const RawObservation> series,
                                            const PreprocessConfig& cfg) {
  std::vector<RawObservation> kept;
  kept.reserve(series.size());
  for (const auto& o : series) {
    if (o.zenith_deg && *o.zenith_deg > cfg.zenith_max_deg) continue;
    kept.push_back(o);
  }

  // Single pass: every spike decision looks at the zenith-filtered series.
  const auto n = static_cast<std::ptrdiff_t>(kept.size());
  const std::ptrdiff_t k = cfg.spike_neighbors;
  std::vector<RawObservation> out;
  out.reserve(kept.size());
  std::vector<double> neighbors;
  std::vector<double> deviations;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    neighbors.clear();
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - k); j <= std::min(n - 1, i + k); ++j) {
      if (j != i) neighbors.push_back(kept[static_cast<std::size_t>(j)].value);
    }
    if (neighbors.size() < 2) {
      out.push_back(kept[static_cast<std::size_t>(i)]);
      continue;
    }
    const double med = median_of(neighbors);
    deviations.clear();
    for (double v : neighbors) deviations.push_back(std::abs(v - med));
    const double mad = std::max(median_of(deviations), cfg.mad_floor);
    if (std::abs(kept[static_cast<std::size_t>(i)].value - med) <= cfg.spike_mad_factor * mad) {
      out.push_back(kept[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

std::optional<DailySeries> densify(std::span<const RawObservation> series, const PreprocessConfig& cfg) {
  const auto filtered = filter_outliers(series, cfg);
  if (filtered.empty()) return std::nullopt;
  std::vector<Observation> obs;
  obs.reserve(filtered.size());
  for (const auto& o : filtered) obs.push_back({o.day, o.value});
  if (cfg.median_before_interpolation) {
    return interpolate_daily(sparse_median(obs, cfg.median_window_days));
  }
  return rolling_median(interpolate_daily(obs), cfg.median_window_days);
}

RawTable load_raw_observations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "", "empty file");
  const auto header = split(trim(line));
  const std::vector<std::string_view> expected = {"lake_id", "day", "variable", "value", "zenith_deg"};
  if (header != expected) {
    throw ParseError(source, 1, "", "expected header lake_id,day,variable,value,zenith_deg");
  }

  // hv_lake / hv_out halves waiting for their partner: lake -> day -> (lake, out)
  std::map<std::string, std::map<int, std::pair<std::optional<double>, std::optional<double>>>> hv_parts;
  RawTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line));
    if (f.size() != 5) throw ParseError(source, line_no, "", "expected 5 fields");
    RawObservation obs;
    if (f[0].empty()) throw ParseError(source, line_no, "lake_id", "empty lake_id");
    if (!parse_number(f[1], obs.day) || obs.day < 1 || obs.day > kDaysPerYear + 1) {
      throw ParseError(source, line_no, "day", "day outside 1..365");
    }
    if (obs.day == kDaysPerYear + 1) continue;
    if (!parse_number(f[3], obs.value)) throw ParseError(source, line_no, "value", "not a number");
    if (!f[4].empty()) {
      double z = 0;
      if (!parse_number(f[4], z)) throw ParseError(source, line_no, "zenith_deg", "not a number");
      obs.zenith_deg = z;
    }
    const std::string lake(f[0]);
    const std::string variable(f[2]);
    if (variable == "hv_lake" || variable == "hv_out") {
      auto& slot = hv_parts[lake][obs.day];
      (variable == "hv_lake" ? slot.first : slot.second) = obs.value;
      continue;
    }
    const auto v = parse_variable(variable);
    if (!v || is_context(*v)) throw ParseError(source, line_no, "variable", "unknown variable " + variable);
    table[lake][variable].push_back(obs);
  }
  for (const auto& [lake, days] : hv_parts) {
    for (const auto& [day, parts] : days) {
      if (parts.first && parts.second) {
        table[lake]["hv_anom"].push_back({day, hv_anomaly(*parts.first, *parts.second), std::nullopt});
      }
    }
  }
  for (auto& [lake, vars] : table) {
    for (auto& [name, obs] : vars) {
      std::stable_sort(obs.begin(), obs.end(),
                       [](const RawObservation& a, const RawObservation& b) { return a.day < b.day; });
      for (std::size_t i = 1; i < obs.size(); ++i) {
        if (obs[i].day == obs[i - 1].day) {
          throw ParseError(source, 0, "day",
                           "duplicate observation of " + name + " on day " + std::to_string(obs[i].day) +
                               " for lake " + lake);
        }
      }
    }
  }
  return table;
}

std::vector<LakeRecord> load_lake_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "", "empty file");
  const std::vector<std::string_view> expected = {"lake_id", "region", "year", "label", "area_m2", "elevation_m"};
  if (split(trim(line)) != expected) {
    throw ParseError(source, 1, "", "expected header lake_id,region,year,label,area_m2,elevation_m");
  }
  std::vector<LakeRecord> out;
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line));
    if (f.size() != 6) throw ParseError(source, line_no, "", "expected 6 fields");
    LakeRecord lake;
    lake.lake_id = std::string(f[0]);
    const auto region = parse_region(f[1]);
    if (!region) throw ParseError(source, line_no, "region", "unknown region");
    lake.region = *region;
    if (!parse_number(f[2], lake.year)) throw ParseError(source, line_no, "year", "not an integer");
    const auto label = parse_label(f[3]);
    if (!label) throw ParseError(source, line_no, "label", "unknown label");
    lake.label = *label;
    if (!parse_number(f[4], lake.area_m2) || lake.area_m2 < 0) {
      throw ParseError(source, line_no, "area_m2", "not a nonnegative number");
    }
    if (!parse_number(f[5], lake.elevation_m)) throw ParseError(source, line_no, "elevation_m", "not a number");
    if (!seen.insert(lake.lake_id).second) {
      throw ParseError(source, line_no, "lake_id", "duplicate lake " + lake.lake_id);
    }
    out.push_back(std::move(lake));
  }
  return out;
}

PreprocessOutcome preprocess_raw(const RawTable& raw, const std::vector<LakeRecord>& metadata,
                                 const PreprocessConfig& cfg, int jobs) {
  cfg.validate();
  std::vector<std::optional<LakeRecord>> built(metadata.size());
  std::vector<std::string> problems(metadata.size());
  parallel_for(metadata.size(), jobs, [&](std::size_t i) {
    LakeRecord lake = metadata[i];
    const auto it = raw.find(lake.lake_id);
    if (it == raw.end()) {
      problems[i] = "lake " + lake.lake_id + " dropped: no observations";
      return;
    }
    for (std::size_t v = 0; v < kNumObserved; ++v) {
      const std::string name(to_string(kObservedVariables[v]));
      const auto obs = it->second.find(name);
      std::optional<DailySeries> dense;
      if (obs != it->second.end()) dense = densify(obs->second, cfg);
      if (!dense) {
        problems[i] = "lake " + lake.lake_id + " dropped: no usable " + name + " observations";
        return;
      }
      lake.series.col(static_cast<Eigen::Index>(v)) = *dense;
    }
    built[i] = std::move(lake);
  });

  PreprocessOutcome outcome;
  std::vector<LakeRecord> lakes;
  for (std::size_t i = 0; i < built.size(); ++i) {
    if (built[i]) {
      lakes.push_back(std::move(*built[i]));
    } else {
      outcome.warnings.push_back(problems[i]);
    }
  }
  for (const auto& [lake, vars] : raw) {
    const bool known = std::any_of(metadata.begin(), metadata.end(),
                                   [&](const LakeRecord& m) { return m.lake_id == lake; });
    if (!known) outcome.warnings.push_back("lake " + lake + " ignored: no metadata row");
  }
  outcome.dataset = Dataset(std::move(lakes), "preprocess");
  return outcome;
}

Dataset resmooth(const Dataset& ds, const PreprocessConfig& cfg) {
  cfg.validate();
  std::vector<LakeRecord> lakes = ds.lakes();
  for (auto& lake : lakes) {
    if (!lake.is_dense()) throw DomainError("resmooth: lake " + lake.lake_id + " has missing cells");
    for (Eigen::Index v = 0; v < static_cast<Eigen::Index>(kNumObserved); ++v) {
      DailySeries col = lake.series.col(v);
      lake.series.col(v) = rolling_median(col, cfg.median_window_days);
    }
  }
  return Dataset(std::move(lakes), ds.provenance());
}

}  // namespace lakecausal::preprocess
