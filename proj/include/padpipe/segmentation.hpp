#pragma once

#include <span>
#include <vector>

#include "padpipe/capture.hpp"

namespace pad {

struct ForegroundConfig {
  int block = 16;
  double var_threshold = 100.0;
};

enum class RidgePolarity { dark, bright };

struct RidgeConfig {
  int block = 16;
  std::size_t min_length = 16;
  RidgePolarity polarity = RidgePolarity::dark;
};

// 3x3 morphology. Pixels outside the image are ignored rather than treated
// as background, so a full mask survives erosion intact.
Mask dilate3(const Mask& m);
Mask erode3(const Mask& m);
// 8-connected; ties go to the component found first in scan order.
Mask largest_component(const Mask& m);

// Block variance threshold, closing, opening, largest component.
Mask compute_foreground(const GrayFrame& gray, const ForegroundConfig& cfg = {});

RidgeGeometry estimate_ridge_geometry(const GrayFrame& gray, const Mask& foreground, int block = 16);

// Adaptive local-mean binarisation restricted to the foreground.
Mask binarize_ridges(const GrayFrame& gray, const Mask& foreground, int window, RidgePolarity polarity);

// Zhang-Suen thinning.
Mask thin(const Mask& binary);

// Splits a skeleton into branches between end/junction pixels; closed
// loops become one path each.
std::vector<std::vector<Point>> trace_skeleton(const Mask& skeleton);

struct RidgeExtraction {
  Mask ridge_pixels;
  Mask skeleton;
  std::vector<RidgeSignal> signals;
  RidgeGeometry geometry;
};

// Throws EmptyRidgeSet when no traced branch reaches cfg.min_length.
RidgeExtraction extract_ridges(const GrayFrame& gray, const Mask& foreground, const RidgeConfig& cfg = {});

// Foreground + ridges for one frame.
RegionSet compute_regions(const GrayFrame& gray, const ForegroundConfig& fg = {}, const RidgeConfig& rc = {});

struct Alignment {
  std::vector<double> first;
  std::vector<double> second;
  // second[i + lag] corresponds to first[i].
  int lag = 0;
  bool degenerate = false;
};

inline constexpr int kDefaultMaxLag = 32;

// Normalised cross-correlation search over [-max_lag, max_lag]. Throws
// AlignmentError if either signal is shorter than 2 * max_lag.
Alignment realign_signals(std::span<const double> s1, std::span<const double> s2, int max_lag = kDefaultMaxLag);

// Truncates both sequences to their overlap at `lag`.
std::pair<std::vector<double>, std::vector<double>> apply_lag(std::span<const double> s1, std::span<const double> s2,
                                                              int lag);

inline constexpr std::size_t kDefaultTopRidges = 5;

// Concatenated path of the `top_n` longest signals (ties keep trace order).
std::vector<Point> top_ridge_path(std::span<const RidgeSignal> signals, std::size_t top_n = kDefaultTopRidges);

std::vector<double> sample_path(const GrayFrame& plane, std::span<const Point> path);

}  // namespace pad
