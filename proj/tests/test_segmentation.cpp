#include <doctest.h>

#include "padpipe/errors.hpp"
#include "padpipe/segmentation.hpp"
#include "test_support.hpp"

using namespace pad;

TEST_CASE("uniform frame has no foreground") {
  CHECK(compute_foreground(GrayFrame(64, 64, 128)).count() == 0);
}

TEST_CASE("foreground follows texture") {
  const GrayFrame half = padtest::gray_from(128, 128, [](int x, int y) {
    return x < 64 ? padtest::ridge_value(x, y, 8.0, 0.4) : 150.0;
  });
  const Mask fg = compute_foreground(half);
  std::size_t textured = 0, flat = 0;
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) (x < 64 ? textured : flat) += fg.test(x, y);
  }
  CHECK(static_cast<double>(textured) >= 0.95 * 64 * 128);
  CHECK(static_cast<double>(flat) <= 0.05 * 64 * 128);

  const Mask full = compute_foreground(padtest::ridges(128, 128, 8.0, 0.7));
  CHECK(static_cast<double>(full.count()) >= 0.99 * 128 * 128);
}

TEST_CASE("foreground keeps the largest component only") {
  const GrayFrame two = padtest::gray_from(128, 64, [](int x, int y) {
    const bool big = x < 64;
    const bool small = x >= 96 && x < 112 && y < 16;
    return big || small ? padtest::ridge_value(x, y, 8.0) : 100.0;
  });
  const Mask fg = compute_foreground(two);
  CHECK_FALSE(fg.test(100, 5));
  CHECK(fg.test(30, 30));
}

TEST_CASE("masks are invariant to a uniform intensity offset") {
  const GrayFrame base = padtest::gray_from(96, 96, [](int x, int y) {
    const double r = std::hypot(x - 48.0, y - 48.0);
    return r < 36 ? padtest::ridge_value(x, y, 8.0, 0.3, 128.0, 60.0) : 140.0;
  });
  for (int off : {-10, 10}) {
    const GrayFrame moved = padtest::gray_from(96, 96, [&](int x, int y) { return base(x, y) + off; });
    CHECK(compute_foreground(moved) == compute_foreground(base));
  }
}

TEST_CASE("morphology ignores pixels outside the image") {
  const Mask full = padtest::full_mask(10, 7);
  CHECK(erode3(full) == full);
  CHECK(dilate3(full) == full);
  Mask dot(9, 9, 0);
  dot(4, 4) = 1;
  CHECK(dilate3(dot).count() == 9);
  CHECK(erode3(dot).count() == 0);
}

TEST_CASE("parallel ridges of period 8 trace into full-length signals") {
  const GrayFrame g = padtest::ridges(128, 128, 8.0, 0.0);
  const Mask fg = compute_foreground(g);
  const RidgeExtraction r = extract_ridges(g, fg);
  REQUIRE(r.signals.size() >= 10);
  CHECK(mask_subset(r.ridge_pixels, fg));
  std::size_t near_full = 0;
  for (const auto& s : r.signals) {
    CHECK(s.size() == s.path.size());
    CHECK(s.size() >= 16);
    int xmin = 1 << 20, xmax = -1;
    for (const auto& p : s.path) {
      CHECK(fg.test(p.x, p.y));
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
    }
    CHECK(xmax - xmin <= 2);
    if (s.size() >= 110 && s.size() <= 130) ++near_full;
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.samples[i] == g(s.path[i].x, s.path[i].y));
  }
  CHECK(near_full >= 10);
  // Dark ridges: traced samples sit near the minimum of the profile.
  double mean = 0.0;
  std::size_t n = 0;
  for (const auto& s : r.signals) {
    for (double v : s.samples) {
      mean += v;
      ++n;
    }
  }
  CHECK(mean / static_cast<double>(n) < 70.0);
  for (int b = 0; b < r.geometry.blocks_x * r.geometry.blocks_y; ++b) {
    CHECK(r.geometry.period[b] == doctest::Approx(8.0).epsilon(0.15));
  }
}

TEST_CASE("circular ridges are traced along circles") {
  const double cx = 63.5, cy = 63.5;
  const GrayFrame g = padtest::gray_from(128, 128, [&](int x, int y) {
    const double r = std::hypot(x - cx, y - cy);
    return 128.0 - 80.0 * std::cos(2.0 * std::numbers::pi * r / 8.0);
  });
  const RidgeExtraction r = extract_ridges(g, compute_foreground(g));
  REQUIRE_FALSE(r.signals.empty());
  double sq = 0.0;
  std::size_t n = 0;
  for (const auto& s : r.signals) {
    for (const auto& p : s.path) {
      const double d = std::hypot(p.x - cx, p.y - cy);
      const double ring = 8.0 * std::round(d / 8.0);
      sq += (d - ring) * (d - ring);
      ++n;
    }
  }
  CHECK(std::sqrt(sq / static_cast<double>(n)) < 1.0);
}

TEST_CASE("no usable ridge is an error") {
  const GrayFrame flat(64, 64, 100);
  CHECK_THROWS_AS(extract_ridges(flat, Mask(64, 64, 0)), EmptyRidgeSet);
  CHECK_THROWS_AS(extract_ridges(flat, padtest::full_mask(64, 64)), EmptyRidgeSet);
}

TEST_CASE("zhang-suen thinning leaves one-pixel lines") {
  Mask bar(20, 9, 0);
  for (int y = 3; y <= 5; ++y) {
    for (int x = 2; x < 18; ++x) bar(x, y) = 1;
  }
  const Mask t = thin(bar);
  CHECK(mask_subset(t, bar));
  for (int x = 4; x < 16; ++x) {
    int col = 0;
    for (int y = 0; y < 9; ++y) col += t.test(x, y);
    CHECK(col == 1);
  }
}

TEST_CASE("skeleton tracing splits at junctions and keeps loops") {
  Mask plus(21, 21, 0);
  for (int i = 0; i < 21; ++i) {
    plus(10, i) = 1;
    plus(i, 10) = 1;
  }
  const auto paths = trace_skeleton(plus);
  CHECK(paths.size() == 4);
  std::size_t total = 0;
  for (const auto& p : paths) total += p.size();
  CHECK(total >= 40);

  Mask ring(20, 20, 0);
  for (int i = 4; i <= 15; ++i) {
    ring(i, 4) = ring(i, 15) = ring(4, i) = ring(15, i) = 1;
  }
  const auto loops = trace_skeleton(ring);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].size() == 44);
}

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("realignment recovers a known shift exactly") {
  const auto s1 = noise(200, 1);
  for (int k = -kDefaultMaxLag; k <= kDefaultMaxLag; ++k) {
    auto s2 = noise(200, 100 + static_cast<std::uint64_t>(k + 50));
    for (int i = 0; i < 200; ++i) {
      if (i + k >= 0 && i + k < 200) s2[static_cast<std::size_t>(i + k)] = s1[static_cast<std::size_t>(i)];
    }
    const Alignment a = realign_signals(s1, s2);
    CAPTURE(k);
    CHECK(a.lag == k);
    CHECK(a.first == a.second);
    CHECK(a.first.size() == 200 - static_cast<std::size_t>(std::abs(k)));
  }
  const Alignment self = realign_signals(s1, s1);
  CHECK(self.lag == 0);
  CHECK_FALSE(self.degenerate);
}

TEST_CASE("constant signal is degenerate, short signal is an error") {
  const std::vector<double> flat(100, 3.0);
  const Alignment a = realign_signals(flat, noise(100, 2));
  CHECK(a.lag == 0);
  CHECK(a.degenerate);
  CHECK(a.first.size() == 100);
  CHECK_THROWS_AS(realign_signals(noise(63, 1), noise(100, 2)), AlignmentError);
}

TEST_CASE("top ridge path concatenates the longest signals") {
  std::vector<RidgeSignal> sigs(3);
  sigs[0].path.assign(5, Point{0, 0});
  sigs[1].path.assign(9, Point{1, 1});
  sigs[2].path.assign(7, Point{2, 2});
  for (auto& s : sigs) s.samples.assign(s.path.size(), 0.0);
  const auto path = top_ridge_path(sigs, 2);
  REQUIRE(path.size() == 16);
  CHECK(path.front() == Point{1, 1});
  CHECK(path.back() == Point{2, 2});
}
