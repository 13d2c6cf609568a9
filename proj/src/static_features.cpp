#include "padpipe/static_features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "padpipe/dynamic_features.hpp"

namespace pad {

namespace {

std::uint8_t rotate_right(std::uint8_t v, int k) {
  return static_cast<std::uint8_t>((v >> k) | (v << (8 - k)));
}

std::array<std::uint8_t, 256> build_rotation_table() {
  std::array<std::uint8_t, 256> min_rot{};
  for (int c = 0; c < 256; ++c) {
    auto best = static_cast<std::uint8_t>(c);
    for (int k = 1; k < 8; ++k) best = std::min(best, rotate_right(static_cast<std::uint8_t>(c), k));
    min_rot[c] = best;
  }
  std::array<int, 256> class_of_rep;
  class_of_rep.fill(-1);
  int next = 0;
  for (int c = 0; c < 256; ++c) {
    if (min_rot[c] == c) class_of_rep[c] = next++;
  }
  std::array<std::uint8_t, 256> table{};
  for (int c = 0; c < 256; ++c) table[c] = static_cast<std::uint8_t>(class_of_rep[min_rot[c]]);
  return table;
}

// Sample offset along one axis as a + b * sqrt(2)/2 with integer a, b.
// Samples sit at multiples of 45 degrees, so diagonal offsets are r*sqrt(2)/2.
struct AxisOffset {
  int a;
  int b;
};

std::array<std::array<AxisOffset, 2>, kLbpSamples> circle_offsets(int radius) {
  std::array<std::array<AxisOffset, 2>, kLbpSamples> out{};
  // Counter-clockwise from +x with image y pointing down.
  constexpr int ux[kLbpSamples] = {1, 0, 0, 0, -1, 0, 0, 0};
  constexpr int uy[kLbpSamples] = {0, 0, -1, 0, 0, 0, 1, 0};
  constexpr int vx[kLbpSamples] = {0, 1, 0, -1, 0, -1, 0, 1};
  constexpr int vy[kLbpSamples] = {0, -1, 0, -1, 0, 1, 0, 1};
  for (int p = 0; p < kLbpSamples; ++p) {
    out[p][0] = {radius * ux[p], radius * vx[p]};
    out[p][1] = {radius * uy[p], radius * vy[p]};
  }
  return out;
}

// Exact sign of p + q * sqrt(2).
int sign_p_q_sqrt2(std::int64_t p, std::int64_t q) {
  if (p >= 0 && q >= 0) return (p | q) ? 1 : 0;
  if (p <= 0 && q <= 0) return -1;
  const std::int64_t p2 = p * p;
  const std::int64_t q2 = 2 * q * q;
  if (p2 == q2) return 0;
  return p > 0 ? (p2 > q2 ? 1 : -1) : (q2 > p2 ? 1 : -1);
}

bool full_circle_inside(const GrayFrame& g, int x, int y, int radius) {
  return x - radius >= 0 && y - radius >= 0 && x + radius < g.width() && y + radius < g.height();
}

}  // namespace

const std::array<std::uint8_t, 256>& lbp_rotation_table() {
  static const auto table = build_rotation_table();
  return table;
}

std::uint8_t lbp_code(const GrayFrame& gray, int x, int y, int radius) {
  const auto offsets = circle_offsets(radius);
  const int centre = gray(x, y);
  std::uint8_t code = 0;
  for (int p = 0; p < kLbpSamples; ++p) {
    // Integer cell and fractional part f = fa + fb * sqrt(2)/2 per axis.
    int cell[2];
    int fa[2];
    int fb[2];
    for (int axis = 0; axis < 2; ++axis) {
      const auto [a, b] = offsets[p][axis];
      const double pos = a + b * (std::numbers::sqrt2 / 2.0);
      const int floor_pos = static_cast<int>(std::floor(pos));
      cell[axis] = (axis == 0 ? x : y) + floor_pos;
      fa[axis] = a - floor_pos;
      fb[axis] = b;
    }
    // Twice each bilinear weight is P + Q * sqrt(2); accumulate
    // 2 * (sample - centre) in the same form.
    std::int64_t big_p = 0;
    std::int64_t big_q = 0;
    for (int cy = 0; cy < 2; ++cy) {
      const int ya = cy ? fa[1] : 1 - fa[1];
      const int yb = cy ? fb[1] : -fb[1];
      for (int cx = 0; cx < 2; ++cx) {
        const int xa = cx ? fa[0] : 1 - fa[0];
        const int xb = cx ? fb[0] : -fb[0];
        const std::int64_t wp = 2 * xa * ya + xb * yb;
        const std::int64_t wq = xa * yb + ya * xb;
        if (wp == 0 && wq == 0) continue;
        const int d = gray(cell[0] + cx, cell[1] + cy) - centre;
        big_p += wp * d;
        big_q += wq * d;
      }
    }
    if (sign_p_q_sqrt2(big_p, big_q) > 0) code |= static_cast<std::uint8_t>(1u << p);
  }
  return code;
}

std::array<double, kLbpClasses> lbp_histogram(const GrayFrame& gray, const Mask& mask, int radius) {
  if (!gray.same_shape(mask)) throw std::invalid_argument("lbp_histogram: mask shape differs");
  const auto& table = lbp_rotation_table();
  std::array<double, kLbpClasses> h{};
  std::size_t n = 0;
  for (int y = radius; y < gray.height() - radius; ++y) {
    for (int x = radius; x < gray.width() - radius; ++x) {
      if (!mask.test(x, y) || !full_circle_inside(gray, x, y, radius)) continue;
      h[table[lbp_code(gray, x, y, radius)]] += 1.0;
      ++n;
    }
  }
  if (n) {
    for (auto& v : h) v /= static_cast<double>(n);
  }
  return h;
}

std::array<double, 2 * kLbpClasses> lbp_features(const GrayFrame& gray, const Mask& mask) {
  std::array<double, 2 * kLbpClasses> out{};
  const auto r1 = lbp_histogram(gray, mask, 1);
  const auto r2 = lbp_histogram(gray, mask, 2);
  std::copy(r1.begin(), r1.end(), out.begin());
  std::copy(r2.begin(), r2.end(), out.begin() + kLbpClasses);
  return out;
}

std::array<double, 64> intensity_features(const GrayFrame& gray, const Mask& mask) {
  return intensity_histogram(gray, mask);
}

HaarDecomposition haar_decompose(std::span<const double> signal, int levels) {
  const std::size_t n = signal.size();
  if (n == 0 || !std::has_single_bit(n) || n < (std::size_t{1} << levels)) {
    throw std::invalid_argument("haar_decompose: length must be a power of two >= 2^levels");
  }
  HaarDecomposition out;
  std::vector<double> approx(signal.begin(), signal.end());
  for (int level = 0; level < levels; ++level) {
    const std::size_t half = approx.size() / 2;
    std::vector<double> a(half), d(half);
    for (std::size_t i = 0; i < half; ++i) {
      a[i] = (approx[2 * i] + approx[2 * i + 1]) * std::numbers::sqrt2 / 2.0;
      d[i] = (approx[2 * i] - approx[2 * i + 1]) * std::numbers::sqrt2 / 2.0;
    }
    out.details.push_back(std::move(d));
    approx = std::move(a);
  }
  out.approximation = std::move(approx);
  return out;
}

std::array<double, 2 * kWaveletLevels> wavelet_multires_features(std::span<const double> signal) {
  const std::size_t len = std::max(kMinWaveletLength, std::bit_ceil(std::max<std::size_t>(signal.size(), 1)));
  std::vector<double> padded(len, 0.0);
  if (!signal.empty()) {
    const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(signal.size());
    for (std::size_t i = 0; i < signal.size(); ++i) padded[i] = signal[i] - mean;
  }
  const auto dec = haar_decompose(padded, kWaveletLevels);
  std::array<double, 2 * kWaveletLevels> out{};
  for (int level = 0; level < kWaveletLevels; ++level) {
    const auto& d = dec.details[level];
    const auto n = static_cast<double>(d.size());
    double sq = 0.0, sum = 0.0;
    for (double v : d) {
      sq += v * v;
      sum += v;
    }
    const double energy = sq / n;
    out[2 * level] = energy > 0.0 ? std::max(kLogEnergyFloor, std::log(energy)) : kLogEnergyFloor;
    const double mean = sum / n;
    out[2 * level + 1] = std::sqrt(std::max(0.0, energy - mean * mean));
  }
  return out;
}

std::vector<double> valley_signal(const GrayFrame& gray, std::span<const Point> ridge_path,
                                  const RidgeGeometry& geometry) {
  std::vector<double> out;
  out.reserve(ridge_path.size());
  for (const auto& p : ridge_path) {
    const double angle = geometry.normal_at(p.x, p.y);
    const double offset = geometry.period_at(p.x, p.y) / 2.0;
    out.push_back(sample_bilinear(gray, p.x + offset * std::cos(angle), p.y + offset * std::sin(angle)));
  }
  return out;
}

}  // namespace pad
