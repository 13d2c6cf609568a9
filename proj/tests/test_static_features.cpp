#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "padpipe/errors.hpp"
#include "padpipe/segmentation.hpp"
#include "padpipe/static_features.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace pad;
using padtest::full_mask;
using padtest::gray_from;
using padtest::oracle_classes;
using padtest::oracle_histogram;

namespace {

GrayFrame rotate90(const GrayFrame& g) {
  GrayFrame out(g.height(), g.width());
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) out(y, g.width() - 1 - x) = g(x, y);
  }
  return out;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

TEST_CASE("rotation table has 36 classes ordered by minimal rotation") {
  const auto& t = lbp_rotation_table();
  const auto oracle = oracle_classes();
  std::set<int> seen(t.begin(), t.end());
  CHECK(seen.size() == 36);
  for (int c = 0; c < 256; ++c) CHECK(t[c] == oracle.at(c));
  CHECK(t[0] == 0);
  CHECK(t[255] == 35);
}

TEST_CASE("lbp histogram matches brute force on random images") {
  Rng rng(20261016);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 5 + static_cast<int>(rng.below(12));
    const int h = 5 + static_cast<int>(rng.below(12));
    // Mix of full-range noise and low-contrast images with many exact ties.
    GrayFrame g(w, h);
    const bool ties = trial % 2 == 1;
    for (auto& v : g.data()) v = static_cast<std::uint8_t>(ties ? 100 + rng.below(3) : rng.below(256));
    Mask m(w, h);
    for (auto& v : m.data()) v = rng.uniform() < 0.8 ? 1 : 0;
    for (int r : {1, 2}) {
      const auto got = lbp_histogram(g, m, r);
      const auto want = oracle_histogram(g, m, r);
      for (int k = 0; k < 36; ++k) {
        INFO("trial " << trial << " radius " << r << " class " << k);
        CHECK(got[k] == want[k]);
      }
    }
  }
}

TEST_CASE("lbp uniform image puts all mass in class 0") {
  const GrayFrame g(20, 20, 77);
  const auto f = lbp_features(g, full_mask(20, 20));
  CHECK(f[0] == 1.0);
  CHECK(f[36] == 1.0);
  CHECK(std::accumulate(f.begin(), f.end(), 0.0) == doctest::Approx(2.0));
}

TEST_CASE("lbp single bright pixel") {
  GrayFrame g(9, 9, 10);
  g(4, 4) = 200;
  // The bright pixel lights the axis sample pointing at it and both
  // diagonal samples whose bilinear cell contains it.
  CHECK(lbp_code(g, 4, 4, 1) == 0);
  CHECK(lbp_code(g, 3, 4, 1) == 0b10000011);  // at +x
  CHECK(lbp_code(g, 4, 5, 1) == 0b00001110);  // at -y
  CHECK(lbp_code(g, 5, 4, 1) == 0b00111000);  // at -x
  CHECK(lbp_code(g, 1, 1, 1) == 0);
}

TEST_CASE("lbp histogram is invariant to 90 degree rotation") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 8 + static_cast<int>(rng.below(8));
    const auto g = padtest::random_gray(n, n, rng);
    const auto rg = rotate90(g);
    for (int r : {1, 2}) CHECK(lbp_histogram(g, full_mask(n, n), r) == lbp_histogram(rg, full_mask(n, n), r));
  }
}

TEST_CASE("lbp empty mask gives zero histogram") {
  const auto g = padtest::ridges(16, 16);
  const auto h = lbp_histogram(g, Mask(16, 16), 1);
  CHECK(std::all_of(h.begin(), h.end(), [](double v) { return v == 0.0; }));
  CHECK_THROWS_AS(lbp_histogram(g, Mask(8, 8), 1), std::invalid_argument);
}

TEST_CASE("intensity histogram") {
  SUBCASE("constant image fills one bin") {
    const auto h = intensity_features(GrayFrame(10, 10, 130), full_mask(10, 10));
    CHECK(h[32] == 1.0);
    CHECK(std::accumulate(h.begin(), h.end(), 0.0) == 1.0);
  }
  SUBCASE("half dark half bright") {
    const auto g = gray_from(10, 10, [](int x, int) { return x < 5 ? 0.0 : 255.0; });
    const auto h = intensity_features(g, full_mask(10, 10));
    CHECK(h[0] == 0.5);
    CHECK(h[63] == 0.5);
  }
  SUBCASE("uniform ramp is flat") {
    const auto g = gray_from(256, 4, [](int x, int) { return x; });
    for (double v : intensity_features(g, full_mask(256, 4))) CHECK(v == 1.0 / 64.0);
  }
  SUBCASE("mask restricts the population") {
    const auto g = gray_from(10, 10, [](int x, int) { return x < 5 ? 3.0 : 4.0; });
    Mask m(10, 10);
    m(7, 7) = 1;
    const auto h = intensity_features(g, m);
    CHECK(h[1] == 1.0);
    CHECK(h[0] == 0.0);
  }
}

TEST_CASE("haar decomposition conserves energy") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s(512);
    for (auto& v : s) v = rng.normal(0.0, 10.0);
    const auto d = haar_decompose(s, kWaveletLevels);
    REQUIRE(d.details.size() == kWaveletLevels);
    CHECK(d.details[0].size() == 256);
    CHECK(d.details[6].size() == 4);
    double e_in = 0.0, e_out = 0.0;
    for (double v : s) e_in += v * v;
    for (const auto& level : d.details) {
      for (double v : level) e_out += v * v;
    }
    for (double v : d.approximation) e_out += v * v;
    CHECK(std::fabs(e_in - e_out) <= 1e-9 * e_in);
  }
  std::vector<double> bad(100, 1.0);
  CHECK_THROWS_AS(haar_decompose(bad, 3), std::invalid_argument);
  std::vector<double> small(64, 1.0);
  CHECK_THROWS_AS(haar_decompose(small, kWaveletLevels), std::invalid_argument);
}

TEST_CASE("wavelet features on reference signals") {
  SUBCASE("constant signal hits the floor at every level") {
    const std::vector<double> s(300, 42.0);
    const auto f = wavelet_multires_features(s);
    for (int l = 0; l < kWaveletLevels; ++l) {
      CHECK(f[2 * l] == kLogEnergyFloor);
      CHECK(f[2 * l + 1] == 0.0);
    }
  }
  SUBCASE("alternating signal is all finest level") {
    std::vector<double> s(256);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = i % 2 ? -1.0 : 1.0;
    const auto f = wavelet_multires_features(s);
    // d = (1 - (-1)) * sqrt(2)/2 = sqrt(2), so mean d^2 = 2.
    CHECK(f[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    for (int l = 1; l < kWaveletLevels; ++l) CHECK(f[2 * l] == kLogEnergyFloor);
  }
  SUBCASE("white noise has equal energy per level") {
    std::array<double, kWaveletLevels> avg{};
    for (int seed = 0; seed < 100; ++seed) {
      Rng rng(derive_seed(55, seed));
      std::vector<double> s(1024);
      for (auto& v : s) v = rng.normal();
      const auto f = wavelet_multires_features(s);
      for (int l = 0; l < kWaveletLevels; ++l) avg[l] += std::exp(f[2 * l]) / 100.0;
    }
    const auto [lo, hi] = std::minmax_element(avg.begin(), avg.end());
    CHECK(10.0 * std::log10(*hi / *lo) < 3.0);
  }
  SUBCASE("short and empty signals are padded") {
    const auto f = wavelet_multires_features(std::vector<double>{});
    CHECK(f[0] == kLogEnergyFloor);
    const auto g = wavelet_multires_features(std::vector<double>{1.0, -1.0, 1.0, -1.0});
    CHECK(std::isfinite(g[0]));
  }
}

TEST_CASE("valley samples sit between ridges") {
  SUBCASE("dark ridges") {
    const auto g = padtest::ridges(128, 128, 8.0, 0.4);
    const auto regions = compute_regions(g);
    const auto path = top_ridge_path(regions.ridge_signals);
    const auto ridge = sample_path(g, path);
    const auto valley = valley_signal(g, path, regions.geometry);
    REQUIRE(valley.size() == path.size());
    CHECK(mean(valley) > mean(ridge) + 40.0);
  }
  SUBCASE("bright ridges with bright polarity") {
    const auto g = gray_from(128, 128, [](int x, int y) { return 256.0 - padtest::ridge_value(x, y, 8.0, 0.4); });
    RidgeConfig rc;
    rc.polarity = RidgePolarity::bright;
    const auto regions = compute_regions(g, {}, rc);
    const auto path = top_ridge_path(regions.ridge_signals);
    CHECK(mean(valley_signal(g, path, regions.geometry)) < mean(sample_path(g, path)) - 40.0);
  }
  SUBCASE("blank frame has no ridges") {
    CHECK_THROWS_AS(compute_regions(GrayFrame(64, 64, 128)), EmptyRidgeSet);
  }
}
