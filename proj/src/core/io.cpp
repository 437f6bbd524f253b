#include "lakecausal/core/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "lakecausal/core/error.hpp"

namespace lakecausal {
namespace {

using nlohmann::json;

constexpr std::string_view kCsvHeader =
    "lake_id,region,year,label,area_m2,elevation_m,day,hv_anom,s2_water,ls_water,s2_zenith,"
    "ls_zenith,t2m,r2,sp,sst";

enum class MetaColumn { LakeId, Region, Year, Label, Area, Elevation, Day };
constexpr std::array<std::string_view, 7> kMetaNames = {"lake_id",  "region",      "year", "label",
                                                        "area_m2", "elevation_m", "day"};

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

struct PendingLake {
  LakeRecord record;
  std::array<bool, kDaysPerYear> seen{};
  std::size_t first_line = 0;
};

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  const std::string source = path.string();

  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "", "empty file");
  const auto header = split_csv(trim(line));

  std::array<int, kMetaNames.size()> meta_col;
  meta_col.fill(-1);
  std::array<int, kNumObserved> var_col;
  var_col.fill(-1);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = trim(header[c]);
    bool known = false;
    for (std::size_t m = 0; m < kMetaNames.size(); ++m) {
      if (name == kMetaNames[m]) {
        meta_col[m] = static_cast<int>(c);
        known = true;
      }
    }
    if (!known) {
      const auto v = parse_variable(name);
      if (!v || is_context(*v)) throw ParseError(source, 1, std::string(name), "unknown column");
      var_col[index_of(*v)] = static_cast<int>(c);
    }
  }
  for (std::size_t m = 0; m < kMetaNames.size(); ++m) {
    if (meta_col[m] < 0) throw ParseError(source, 1, std::string(kMetaNames[m]), "missing column");
  }
  for (std::size_t v = 0; v < kNumObserved; ++v) {
    if (var_col[v] < 0) {
      throw ParseError(source, 1, std::string(to_string(kObservedVariables[v])), "missing column");
    }
  }

  std::vector<PendingLake> pending;
  std::unordered_map<std::string, std::size_t> by_key;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto fields = split_csv(trimmed);
    if (fields.size() != header.size()) {
      throw ParseError(source, line_no, "", "expected " + std::to_string(header.size()) +
                                                " fields, got " + std::to_string(fields.size()));
    }
    auto field = [&](MetaColumn m) { return trim(fields[static_cast<std::size_t>(meta_col[static_cast<int>(m)])]); };
    auto fail = [&](MetaColumn m, const std::string& what) -> void {
      throw ParseError(source, line_no, std::string(kMetaNames[static_cast<int>(m)]), what);
    };

    int day = 0;
    if (!parse_number(field(MetaColumn::Day), day)) fail(MetaColumn::Day, "not an integer");
    if (day < 1 || day > kDaysPerYear + 1) fail(MetaColumn::Day, "day outside 1..365");
    if (day == kDaysPerYear + 1) continue;  // leap day dropped

    LakeRecord meta;
    meta.lake_id = std::string(field(MetaColumn::LakeId));
    if (meta.lake_id.empty()) fail(MetaColumn::LakeId, "empty lake_id");
    const auto region = parse_region(field(MetaColumn::Region));
    if (!region) fail(MetaColumn::Region, "unknown region");
    meta.region = *region;
    if (!parse_number(field(MetaColumn::Year), meta.year)) fail(MetaColumn::Year, "not an integer");
    const auto label = parse_label(field(MetaColumn::Label));
    if (!label) fail(MetaColumn::Label, "unknown label");
    meta.label = *label;
    if (!parse_number(field(MetaColumn::Area), meta.area_m2) || !(meta.area_m2 >= 0.0)) {
      fail(MetaColumn::Area, "not a nonnegative number");
    }
    if (!parse_number(field(MetaColumn::Elevation), meta.elevation_m)) {
      fail(MetaColumn::Elevation, "not a number");
    }

    const auto key = meta.unit_key();
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      PendingLake p;
      p.record = meta;
      p.record.series.setConstant(std::numeric_limits<double>::quiet_NaN());
      p.first_line = line_no;
      it = by_key.emplace(key, pending.size()).first;
      pending.push_back(std::move(p));
    }
    PendingLake& lake = pending[it->second];
    if (lake.record.region != meta.region || lake.record.label != meta.label ||
        lake.record.area_m2 != meta.area_m2 || lake.record.elevation_m != meta.elevation_m) {
      throw ParseError(source, line_no, "", "metadata differs from earlier rows of lake " + meta.lake_id);
    }
    if (lake.seen[static_cast<std::size_t>(day - 1)]) {
      fail(MetaColumn::Day, "duplicate (lake_id, day) for " + meta.lake_id);
    }
    lake.seen[static_cast<std::size_t>(day - 1)] = true;

    for (std::size_t v = 0; v < kNumObserved; ++v) {
      const auto cell = trim(fields[static_cast<std::size_t>(var_col[v])]);
      double value = std::numeric_limits<double>::quiet_NaN();
      if (!cell.empty() && !parse_number(cell, value)) {
        throw ParseError(source, line_no, std::string(to_string(kObservedVariables[v])), "not a number");
      }
      lake.record.series(day - 1, static_cast<Eigen::Index>(v)) = value;
    }
  }

  std::vector<LakeRecord> lakes;
  lakes.reserve(pending.size());
  for (auto& p : pending) {
    for (int d = 0; d < kDaysPerYear; ++d) {
      if (!p.seen[static_cast<std::size_t>(d)]) {
        throw ParseError(source, p.first_line, "day",
                         "missing day " + std::to_string(d + 1) + " for lake " + p.record.lake_id);
      }
    }
    lakes.push_back(std::move(p.record));
  }
  return Dataset(std::move(lakes), source);
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << kCsvHeader << '\n';
  std::string row;
  for (const auto& lake : ds.lakes()) {
    const std::string prefix = lake.lake_id + "," + std::string(to_string(lake.region)) + "," +
                               std::to_string(lake.year) + "," + std::string(to_string(lake.label)) +
                               "," + format_double(lake.area_m2) + "," + format_double(lake.elevation_m) + ",";
    for (int d = 0; d < kDaysPerYear; ++d) {
      row = prefix;
      row += std::to_string(d + 1);
      for (Eigen::Index v = 0; v < static_cast<Eigen::Index>(kNumObserved); ++v) {
        row += ',';
        row += format_double(lake.series(d, v));
      }
      row += '\n';
      out << row;
    }
  }
  if (!out) throw IoError(path.string(), "write failed");
}

template <typename T>
T require(const json& obj, const char* key, const std::string& source, std::size_t index) {
  if (!obj.contains(key)) {
    throw ParseError(source, 0, "[" + std::to_string(index) + "]." + key, "missing field");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(source, 0, "[" + std::to_string(index) + "]." + key, e.what());
  }
}

Dataset load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  const std::string source = path.string();
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 0, "", e.what());
  }
  if (!doc.is_array()) throw ParseError(source, 0, "", "expected an array of lake objects");

  std::vector<LakeRecord> lakes;
  lakes.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    const std::string where = "[" + std::to_string(i) + "]";
    if (!obj.is_object() || !obj.contains("meta") || !obj.contains("series")) {
      throw ParseError(source, 0, where, "lake needs 'meta' and 'series'");
    }
    const auto& meta = obj["meta"];
    LakeRecord lake;
    lake.lake_id = require<std::string>(meta, "lake_id", source, i);
    const auto region = parse_region(require<std::string>(meta, "region", source, i));
    if (!region) throw ParseError(source, 0, where + ".region", "unknown region");
    lake.region = *region;
    lake.year = require<int>(meta, "year", source, i);
    const auto label = parse_label(require<std::string>(meta, "label", source, i));
    if (!label) throw ParseError(source, 0, where + ".label", "unknown label");
    lake.label = *label;
    lake.area_m2 = require<double>(meta, "area_m2", source, i);
    lake.elevation_m = require<double>(meta, "elevation_m", source, i);
    if (!(lake.area_m2 >= 0.0)) throw ParseError(source, 0, where + ".area_m2", "negative area");

    const auto& series = obj["series"];
    if (!series.is_object()) throw ParseError(source, 0, where + ".series", "expected object");
    for (const auto& [name, values] : series.items()) {
      const auto v = parse_variable(name);
      if (!v || is_context(*v)) throw ParseError(source, 0, where + ".series." + name, "unknown variable");
    }
    for (std::size_t v = 0; v < kNumObserved; ++v) {
      const std::string name(to_string(kObservedVariables[v]));
      if (!series.contains(name)) throw ParseError(source, 0, where + ".series." + name, "missing variable");
      const auto& values = series[name];
      if (!values.is_array() || values.size() < static_cast<std::size_t>(kDaysPerYear)) {
        throw ParseError(source, 0, where + ".series." + name, "missing day: expected 365 values");
      }
      if (values.size() > static_cast<std::size_t>(kDaysPerYear + 1)) {
        throw ParseError(source, 0, where + ".series." + name, "day outside 1..365");
      }
      for (int d = 0; d < kDaysPerYear; ++d) {
        const auto& cell = values[static_cast<std::size_t>(d)];
        double value = std::numeric_limits<double>::quiet_NaN();
        if (!cell.is_null()) {
          if (!cell.is_number()) {
            throw ParseError(source, 0, where + ".series." + name + "[" + std::to_string(d) + "]",
                             "not a number");
          }
          value = cell.get<double>();
        }
        lake.series(d, static_cast<Eigen::Index>(v)) = value;
      }
    }
    lakes.push_back(std::move(lake));
  }
  return Dataset(std::move(lakes), source);
}

void save_json(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << "[\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& lake = ds[i];
    json obj;
    obj["meta"] = {{"lake_id", lake.lake_id},
                   {"region", to_string(lake.region)},
                   {"year", lake.year},
                   {"label", to_string(lake.label)},
                   {"area_m2", lake.area_m2},
                   {"elevation_m", lake.elevation_m}};
    json series = json::object();
    for (std::size_t v = 0; v < kNumObserved; ++v) {
      json values = json::array();
      for (int d = 0; d < kDaysPerYear; ++d) {
        const double x = lake.series(d, static_cast<Eigen::Index>(v));
        values.push_back(std::isnan(x) ? json(nullptr) : json(x));
      }
      series[std::string(to_string(kObservedVariables[v]))] = std::move(values);
    }
    obj["series"] = std::move(series);
    out << obj.dump() << (i + 1 < ds.size() ? ",\n" : "\n");
  }
  out << "]\n";
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace

DataFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return DataFormat::Csv;
  if (ext == ".json") return DataFormat::Json;
  throw ConfigError("cannot infer data format from extension of " + path.string());
}

std::string_view to_string(DataFormat f) noexcept { return f == DataFormat::Csv ? "csv" : "json"; }

std::string_view dataset_csv_header() noexcept { return kCsvHeader; }

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
  if (!std::filesystem::exists(path)) throw IoError(path.string(), "no such file");
  return format == DataFormat::Csv ? load_csv(path) : load_json(path);
}

Dataset load_dataset(const std::filesystem::path& path) { return load_dataset(path, format_from_path(path)); }

void save_dataset(const Dataset& ds, const std::filesystem::path& path, DataFormat format) {
  if (format == DataFormat::Csv) {
    save_csv(ds, path);
  } else {
    save_json(ds, path);
  }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  save_dataset(ds, path, format_from_path(path));
}

}  // namespace lakecausal
