#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "lakecausal/core/error.hpp"
#include "lakecausal/preprocess/preprocess.hpp"
#include "support.hpp"

namespace lc = lakecausal;
namespace pp = lakecausal::preprocess;

namespace {

pp::PixelGrid uniform_grid(int rows, int cols, double blue, double red, double swir, double cirrus) {
  pp::PixelGrid g;
  g.sensor = pp::Sensor::Sentinel2;
  g.blue = Eigen::MatrixXd::Constant(rows, cols, blue);
  g.green = Eigen::MatrixXd::Constant(rows, cols, 0.3);
  g.red = Eigen::MatrixXd::Constant(rows, cols, red);
  g.swir = Eigen::MatrixXd::Constant(rows, cols, swir);
  g.cirrus = Eigen::MatrixXd::Constant(rows, cols, cirrus);
  return g;
}

double naive_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

pp::DailySeries naive_rolling_median(const pp::DailySeries& s, int w) {
  pp::DailySeries out;
  for (int t = 0; t < lc::kDaysPerYear; ++t) {
    std::vector<double> win;
    for (int j = t - w / 2; j <= t + (w + 1) / 2 - 1; ++j) {
      if (j >= 0 && j < lc::kDaysPerYear) win.push_back(s(j));
    }
    out(t) = naive_median(win);
  }
  return out;
}

}  // namespace

TEST(HvAnomaly, Arithmetic) {
  EXPECT_EQ(pp::hv_anomaly(-20.0, -12.0), -8.0);
  EXPECT_EQ(pp::hv_anomaly(-15.5, -10.0), -5.5);
  for (double x : {-30.0, -7.25, 0.0, 3.5}) EXPECT_EQ(pp::hv_anomaly(x, x), 0.0);
}

TEST(HvAnomaly, Antisymmetric) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-30.0, 0.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    EXPECT_EQ(pp::hv_anomaly(a, b), -pp::hv_anomaly(b, a));
  }
}

TEST(WaterFraction, Arithmetic) {
  EXPECT_EQ(pp::water_fraction(30, 120), 25.0);
  EXPECT_EQ(pp::water_fraction(0, 17), 0.0);
  EXPECT_EQ(pp::water_fraction(17, 17), 100.0);
  EXPECT_THROW(pp::water_fraction(0, 0), lc::DomainError);
  EXPECT_THROW(pp::water_fraction(5, 4), lc::DomainError);
}

TEST(WaterFraction, MonotoneInWaterCount) {
  for (std::size_t total : {1u, 7u, 120u}) {
    for (std::size_t w = 1; w <= total; ++w) {
      EXPECT_LE(pp::water_fraction(w - 1, total), pp::water_fraction(w, total));
    }
  }
}

TEST(MaskPixels, UniformWaterGrid) {
  const pp::PreprocessConfig cfg;
  const auto r = pp::mask_pixels(uniform_grid(2, 2, 0.6, 0.2, 0.0, 0.0), cfg);
  EXPECT_EQ(r.n_water, 4u);
  EXPECT_EQ(r.n_valid, 4u);
}

TEST(MaskPixels, SwirCloudsEverything) {
  const pp::PreprocessConfig cfg;
  const auto r = pp::mask_pixels(uniform_grid(2, 2, 0.6, 0.2, 0.2, 0.0), cfg);
  EXPECT_EQ(r.n_valid, 0u);
  EXPECT_EQ(r.n_water, 0u);
  EXPECT_TRUE(r.cloud.all());
}

TEST(MaskPixels, MatchesPerPixelRecount) {
  const pp::PreprocessConfig cfg;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 0.4);
  for (int trial = 0; trial < 20; ++trial) {
    const bool s2 = trial % 2 == 0;
    pp::PixelGrid g;
    g.sensor = s2 ? pp::Sensor::Sentinel2 : pp::Sensor::Landsat8;
    g.blue = Eigen::MatrixXd::NullaryExpr(16, 16, [&] { return u(rng); });
    g.green = Eigen::MatrixXd::NullaryExpr(16, 16, [&] { return u(rng); });
    g.red = Eigen::MatrixXd::NullaryExpr(16, 16, [&] { return u(rng); });
    g.swir = Eigen::MatrixXd::NullaryExpr(16, 16, [&] { return 0.4 * u(rng); });
    if (s2) g.cirrus = Eigen::MatrixXd::NullaryExpr(16, 16, [&] { return 0.4 * u(rng); });
    g.red(0, 0) = 0.0;
    g.blue(0, 0) = 0.0;  // no NDWI

    std::size_t water = 0, valid = 0;
    const double thr = s2 ? cfg.ndwi_threshold_s2 : cfg.ndwi_threshold_l8;
    for (int i = 0; i < 16; ++i) {
      for (int j = 0; j < 16; ++j) {
        const bool cloud = g.swir(i, j) > cfg.cloud_swir_threshold ||
                           (s2 && (*g.cirrus)(i, j) > cfg.cloud_cirrus_threshold);
        const double denom = g.blue(i, j) + g.red(i, j);
        if (cloud || denom == 0.0) continue;
        ++valid;
        water += (g.blue(i, j) - g.red(i, j)) / denom > thr;
      }
    }
    const auto r = pp::mask_pixels(g, cfg);
    EXPECT_EQ(r.n_water, water);
    EXPECT_EQ(r.n_valid, valid);
  }
}

TEST(MaskPixels, RejectsMalformedGrids) {
  const pp::PreprocessConfig cfg;
  auto g = uniform_grid(2, 2, 0.6, 0.2, 0.0, 0.0);
  g.red = Eigen::MatrixXd::Zero(3, 2);
  EXPECT_THROW(pp::mask_pixels(g, cfg), lc::DomainError);
  g = uniform_grid(2, 2, 0.6, 0.2, 0.0, 0.0);
  g.sensor = pp::Sensor::Landsat8;
  EXPECT_THROW(pp::mask_pixels(g, cfg), lc::DomainError);
}

TEST(InterpolateDaily, LinearBetweenEndpoints) {
  const std::vector<pp::Observation> obs = {{1, 0.0}, {365, 364.0}};
  const auto s = pp::interpolate_daily(obs);
  for (int d = 1; d <= 365; ++d) EXPECT_DOUBLE_EQ(s(d - 1), d - 1.0);
}

TEST(InterpolateDaily, SinglePointIsConstant) {
  const std::vector<pp::Observation> obs = {{100, 5.0}};
  EXPECT_TRUE((pp::interpolate_daily(obs).array() == 5.0).all());
}

TEST(InterpolateDaily, MatchesTwoPointOracleAndHitsObservations) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<pp::Observation> obs;
    for (int d = 1 + static_cast<int>(rng() % 20); d <= 365; d += 1 + static_cast<int>(rng() % 30)) {
      obs.push_back({d, u(rng)});
    }
    const auto s = pp::interpolate_daily(obs);
    for (const auto& o : obs) EXPECT_EQ(s(o.day - 1), o.value);
    for (int d = 1; d <= 365; ++d) {
      double expected;
      if (d <= obs.front().day) {
        expected = obs.front().value;
      } else if (d >= obs.back().day) {
        expected = obs.back().value;
      } else {
        std::size_t k = 0;
        while (obs[k + 1].day < d) ++k;
        const auto& a = obs[k];
        const auto& b = obs[k + 1];
        expected = a.value + (b.value - a.value) * (d - a.day) / static_cast<double>(b.day - a.day);
      }
      EXPECT_NEAR(s(d - 1), expected, 1e-12);
    }
  }
}

TEST(InterpolateDaily, RejectsBadDays) {
  const std::vector<pp::Observation> unsorted = {{10, 1.0}, {5, 2.0}};
  EXPECT_THROW(pp::interpolate_daily(unsorted), lc::DomainError);
  const std::vector<pp::Observation> outside = {{0, 1.0}};
  EXPECT_THROW(pp::interpolate_daily(outside), lc::DomainError);
  EXPECT_THROW(pp::interpolate_daily(std::vector<pp::Observation>{}), lc::DomainError);
}

TEST(RollingMedian, ConstantSeriesIsFixed) {
  const pp::DailySeries c = pp::DailySeries::Constant(3.25);
  EXPECT_EQ(pp::rolling_median(c, 12), c);
}

TEST(RollingMedian, SingleSpikeVanishes) {
  pp::DailySeries s = pp::DailySeries::Zero();
  s(199) = 100.0;
  const auto out = pp::rolling_median(s, 12);
  EXPECT_EQ(out(199), 0.0);
  EXPECT_TRUE((out.array() == 0.0).all());
}

TEST(RollingMedian, EvenWindowAveragesMiddlePair) {
  pp::DailySeries s = pp::DailySeries::Zero();
  for (int i = 0; i < 12; ++i) s(100 + i) = i + 1.0;  // 1..12 around day 107
  // Window of day index 106 spans indices 100..111.
  EXPECT_EQ(pp::rolling_median(s, 12)(106), 6.5);
}

TEST(RollingMedian, MatchesBruteForceWindowOracle) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int w : {1, 2, 5, 12, 30}) {
    pp::DailySeries s;
    for (int t = 0; t < 365; ++t) s(t) = n(rng);
    const auto got = pp::rolling_median(s, w);
    const auto want = naive_rolling_median(s, w);
    for (int t = 0; t < 365; ++t) EXPECT_EQ(got(t), want(t)) << "w=" << w << " t=" << t;
  }
}

TEST(RollingMedian, EquivariantUnderOffset) {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> u(-50, 50);
  pp::DailySeries s;
  for (int t = 0; t < 365; ++t) s(t) = u(rng) * 0.25;  // exact in binary
  const pp::DailySeries shifted = s.array() + 8.0;
  const pp::DailySeries expected = pp::rolling_median(s, 12).array() + 8.0;
  EXPECT_EQ(pp::rolling_median(shifted, 12), expected);
}

TEST(FilterOutliers, HighZenithDropsEverything) {
  pp::PreprocessConfig cfg;
  std::vector<pp::RawObservation> obs;
  for (int d = 1; d <= 20; ++d) obs.push_back({d, 1.0 * d, 80.0});
  EXPECT_TRUE(pp::filter_outliers(obs, cfg).empty());
}

TEST(FilterOutliers, RemovesOneSpikeByHand) {
  // Nine smooth points with a spike at the centre. With three neighbours a
  // side, the spike's neighbours {3,4,5,7,8,9} have median 6 and MAD 2, so
  // the threshold is 5 * 2 = 10 and |60 - 6| = 54 fails it. Every other
  // point sees the spike among its neighbours but stays within its bound.
  const pp::PreprocessConfig cfg;
  std::vector<pp::RawObservation> obs;
  for (int d = 1; d <= 9; ++d) obs.push_back({d * 5, static_cast<double>(d), std::nullopt});
  obs[5].value = 60.0;  // 1 2 3 4 5 60 7 8 9
  const auto kept = pp::filter_outliers(obs, cfg);
  ASSERT_EQ(kept.size(), 8u);
  for (const auto& o : kept) EXPECT_NE(o.value, 60.0);
}

TEST(FilterOutliers, IdenticalValuesAreKept) {
  const pp::PreprocessConfig cfg;
  std::vector<pp::RawObservation> obs;
  for (int d = 1; d <= 30; ++d) obs.push_back({d, 4.0, 10.0});
  EXPECT_EQ(pp::filter_outliers(obs, cfg).size(), obs.size());
}

TEST(Preprocess, SparseRawBecomesDenseAndEmptyLakesAreDropped) {
  const auto dir = lc::testing::scratch_dir("preprocess_raw");
  {
    std::ofstream raw(dir / "raw.csv");
    raw << "lake_id,day,variable,value,zenith_deg\n";
    const char* vars[] = {"s2_water", "ls_water", "s2_zenith", "ls_zenith", "t2m", "r2", "sp", "sst"};
    for (int d = 1; d <= 365; d += 9) {
      raw << "A," << d << ",hv_lake," << -20.0 + 0.01 * d << ",\n";
      raw << "A," << d << ",hv_out,-12,\n";
      for (const char* v : vars) raw << "A," << d << ',' << v << ',' << 0.1 * d << ",40\n";
      raw << "B," << d << ",s2_water,50,85\n";  // everything too oblique
    }
    std::ofstream meta(dir / "meta.csv");
    meta << "lake_id,region,year,label,area_m2,elevation_m\n";
    meta << "A,CW,2019,buried,1000,900\nB,NE,2019,refreeze,2000,950\n";
  }
  const auto raw = pp::load_raw_observations(dir / "raw.csv");
  const auto meta = pp::load_lake_metadata(dir / "meta.csv");
  const auto out = pp::preprocess_raw(raw, meta, pp::PreprocessConfig{});
  ASSERT_EQ(out.dataset.size(), 1u);
  EXPECT_TRUE(out.dataset[0].is_dense());
  EXPECT_EQ(out.dataset[0].lake_id, "A");
  EXPECT_NEAR(out.dataset[0].series(100, 0), -8.0 + 0.01 * 101, 0.1);
  ASSERT_EQ(out.warnings.size(), 1u);
  EXPECT_NE(out.warnings[0].find("B"), std::string::npos);
}

TEST(Preprocess, SecondSmoothingOfMonotoneSeriesOnlyTouchesEdges) {
  // A monotone series is a fixed point of an odd-window median away from the
  // ends; the shrunken windows at the ends are the only place it can move.
  pp::PreprocessConfig cfg;
  cfg.median_window_days = 11;
  auto lake = lc::testing::noise_lake("A", lc::Region::CW, lc::Label::Buried, 3);
  for (int t = 0; t < 365; ++t) {
    for (int v = 0; v < 9; ++v) lake.series(t, v) = std::sqrt(t + 1.0) * (v + 1);
  }
  const auto once = pp::resmooth(lc::Dataset({lake}), cfg);
  const auto twice = pp::resmooth(once, cfg);
  for (int t = 0; t < 365; ++t) {
    const bool edge = t < 5 || t >= 360;
    for (int v = 0; v < 9; ++v) {
      if (!edge) EXPECT_EQ(once[0].series(t, v), twice[0].series(t, v)) << t;
      if (!edge) EXPECT_EQ(once[0].series(t, v), lake.series(t, v)) << t;
    }
  }
}

TEST(PreprocessConfig, RejectsNonsense) {
  pp::PreprocessConfig cfg;
  cfg.median_window_days = 0;
  EXPECT_THROW(cfg.validate(), lc::ConfigError);
  cfg = {};
  cfg.spike_mad_factor = -1.0;
  EXPECT_THROW(cfg.validate(), lc::ConfigError);
}
