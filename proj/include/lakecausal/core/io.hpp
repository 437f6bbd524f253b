#pragma once

#include <filesystem>
#include <string_view>

#include "lakecausal/core/dataset.hpp"

namespace lakecausal {

enum class DataFormat { Csv, Json };

// Picks the format from the file extension (.csv / .json).
DataFormat format_from_path(const std::filesystem::path& path);
std::string_view to_string(DataFormat f) noexcept;

// Reads the dense per-(lake, day) table. Day 366 is dropped; empty cells load
// as NaN. A lake missing any of days 1..365 is rejected ("missing day").
Dataset load_dataset(const std::filesystem::path& path, DataFormat format);
Dataset load_dataset(const std::filesystem::path& path);

// Values are written with 17 significant digits so a reload is bit-identical.
void save_dataset(const Dataset& ds, const std::filesystem::path& path, DataFormat format);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

// The CSV header line, without trailing newline.
std::string_view dataset_csv_header() noexcept;

// Shortest round-trippable decimal text for a double ("" for NaN).
std::string format_double(double v);

}  // namespace lakecausal
