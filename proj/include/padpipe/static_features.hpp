#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "padpipe/capture.hpp"

namespace pad {

inline constexpr int kLbpSamples = 8;
inline constexpr int kLbpClasses = 36;

// Maps each 8-bit LBP code to its rotation class, ordered by the smallest
// rotation of the code. 36 classes.
const std::array<std::uint8_t, 256>& lbp_rotation_table();

// 8-sample LBP code at (x, y) with a sample set iff it is strictly
// brighter than the centre.
std::uint8_t lbp_code(const GrayFrame& gray, int x, int y, int radius);

// Rotation-class histogram over masked pixels whose full circle lies in
// the image, normalised to sum 1 (all zero when no pixel qualifies).
std::array<double, kLbpClasses> lbp_histogram(const GrayFrame& gray, const Mask& mask, int radius);
std::array<double, 2 * kLbpClasses> lbp_features(const GrayFrame& gray, const Mask& mask);

std::array<double, 64> intensity_features(const GrayFrame& gray, const Mask& mask);

inline constexpr int kWaveletLevels = 7;
inline constexpr std::size_t kMinWaveletLength = 256;
inline constexpr double kLogEnergyFloor = -30.0;

struct HaarDecomposition {
  // details[0] is the finest level.
  std::vector<std::vector<double>> details;
  std::vector<double> approximation;
};

// Orthonormal Haar; input length must be a power of two >= 2^levels.
HaarDecomposition haar_decompose(std::span<const double> signal, int levels);

// Zero-pads to the next power of two (at least 256) and returns
// {ln mean d^2, std d} per level, finest first.
std::array<double, 2 * kWaveletLevels> wavelet_multires_features(std::span<const double> signal);

// Grey levels sampled half a local ridge period along the ridge normal.
std::vector<double> valley_signal(const GrayFrame& gray, std::span<const Point> ridge_path,
                                  const RidgeGeometry& geometry);

inline constexpr std::size_t kStaticFeatureCount = 164;

}  // namespace pad
