#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "padpipe/capture.hpp"

namespace pad {

// Denominator offset for colour-ratio images and measures.
inline constexpr double kRatioEpsilon = 0.001;
// Guard for ratio-of-means features.
inline constexpr double kMeanRatioGuard = 1e-12;
// Offset in the foreground/background ratio change.
inline constexpr double kMaskRatioEpsilon = 0.0001;
// Per-pair cap on squared red differences in the delta image.
inline constexpr double kPressClamp = 255.0;

struct ChannelPair {
  Channel numerator;
  Channel denominator;
};

struct ColorRatioConfig {
  std::array<ChannelPair, 3> pairs{{{Channel::green, Channel::red},
                                    {Channel::blue, Channel::red},
                                    {Channel::green, Channel::blue}}};
  double epsilon = kRatioEpsilon;
};

// num / (den + eps) at each set pixel of `mask`, scan order.
std::vector<double> color_ratio_image(const Frame& frame, Channel num, Channel den, const Mask& mask,
                                      double epsilon = kRatioEpsilon);
// mean(num) / (mean(den) + eps) over `mask`.
double color_ratio_measure(const Frame& frame, Channel num, Channel den, const Mask& mask,
                           double epsilon = kRatioEpsilon);

struct PairMetrics {
  double diff = 0.0;
  double ratio = 1.0;
  double sumsquare = 0.0;
};

// diff and ratio of the means plus the element-wise root sum of squares.
// Throws AlignmentError when the lengths differ.
PairMetrics pair_metrics(std::span<const double> m1, std::span<const double> m2);
// Scalar path: diff and ratio only (sumsquare stays 0).
PairMetrics pair_metrics(double m1, double m2);

double sequence_euclid(const Frame& f1, const Mask& mask1, const Frame& f2, const Mask& mask2);
double sequence_euclid(const Frame& f1, const Frame& f2, const Mask& mask);

// Per-channel samples along a ridge path.
struct ColorSamples {
  std::array<std::vector<double>, 3> channel;

  const std::vector<double>& operator[](Channel c) const { return channel[static_cast<int>(c)]; }
  std::size_t size() const { return channel[0].size(); }
};

ColorSamples sample_colors(const Frame& frame, std::span<const Point> path);
// Realigns both sample sets by the lag found on their grayscale signals.
std::pair<ColorSamples, ColorSamples> align_colors(const ColorSamples& a, const ColorSamples& b, int lag);

struct ColorFeatures {
  std::array<double, 12> foreground{};
  std::array<double, 12> ridge_signal{};
  std::array<double, 7> ridge_pixels{};
};

// 12 = {diff, ratio, sumsquare} x {G/R, B/R, G/B} + raw channel diffs (R, G, B).
std::array<double, 12> color_block_12(const ColorSamples& s1, const ColorSamples& s2,
                                      const ColorRatioConfig& cfg = {});

ColorFeatures color_feature_block(const Frame& f1, const Frame& f2, const RegionSet& r1, const RegionSet& r2,
                                  const ColorSamples& ridge1, const ColorSamples& ridge2,
                                  const ColorRatioConfig& cfg = {});

struct MaskFeatures {
  // R1, R2, RS, delta_back, MS, delta_fore
  std::array<double, 6> values{};
  bool full_foreground = false;
};

MaskFeatures mask_features(const Mask& mask1, const Mask& mask2);

// sqrt of the per-pixel sum over consecutive pairs of min((r_i - r_{i+1})^2, 255).
RealImage delta_image(std::span<const Frame> frames);
// Mean of the delta image over `mask` (whole frame if the mask is empty).
// Throws InsufficientFrames for fewer than two frames.
double delta_image_feature(std::span<const Frame> frames, const Mask& mask);

inline constexpr int kIntensityBins = 64;

std::array<double, kIntensityBins> intensity_histogram(const GrayFrame& gray, const Mask& mask);

// Total variation, dark-third change, light-third change, mean shift,
// energy change, entropy change.
std::array<double, 6> intensity_dynamic_features(const GrayFrame& g1, const GrayFrame& g2, const Mask& mask1,
                                                 const Mask& mask2);

struct PerspirationConfig {
  double dry_threshold = 0.1 * 255.0;
  double wet_threshold = 0.9 * 255.0;
};

inline constexpr std::size_t kMinPerspirationLength = 64;

struct PerspirationFeatures {
  // SM, DM1..DM6
  std::array<double, 7> values{};
  bool degenerate = false;
};

double high_band_energy_fraction(std::span<const double> signal);
double mean_local_maxima(std::span<const double> signal);

PerspirationFeatures perspiration_features(std::span<const double> sig1, std::span<const double> sig2,
                                           const PerspirationConfig& cfg = {});

inline constexpr std::size_t kDynamicFeatureCount = 51;

}  // namespace pad
