#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lakecausal/core/dataset.hpp"

namespace lakecausal::testing {

// Fresh, empty scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(LAKECAUSAL_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A lake whose every cell is an independent standard normal draw.
inline LakeRecord noise_lake(const std::string& id, Region region, Label label, std::uint64_t seed) {
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

}  // namespace lakecausal::testing
