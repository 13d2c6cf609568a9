#include "padpipe/dynamic_features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "padpipe/errors.hpp"
#include "padpipe/segmentation.hpp"

namespace pad {

namespace {

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size());
}

ColorSamples mask_colors(const Frame& frame, const Mask& mask) {
  ColorSamples out;
  for (auto c : kChannels) out.channel[static_cast<int>(c)] = masked_values(frame.plane(c), mask);
  return out;
}

std::vector<double> ratio_samples(const ColorSamples& s, ChannelPair p, double eps) {
  const auto& num = s[p.numerator];
  const auto& den = s[p.denominator];
  std::vector<double> out(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) out[i] = num[i] / (den[i] + eps);
  return out;
}

}  // namespace

std::vector<double> color_ratio_image(const Frame& frame, Channel num, Channel den, const Mask& mask, double epsilon) {
  const auto n = masked_values(frame.plane(num), mask);
  const auto d = masked_values(frame.plane(den), mask);
  std::vector<double> out(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) out[i] = n[i] / (d[i] + epsilon);
  return out;
}

double color_ratio_measure(const Frame& frame, Channel num, Channel den, const Mask& mask, double epsilon) {
  return masked_mean(frame.plane(num), mask) / (masked_mean(frame.plane(den), mask) + epsilon);
}

PairMetrics pair_metrics(std::span<const double> m1, std::span<const double> m2) {
  if (m1.size() != m2.size()) {
    throw AlignmentError("pair_metrics: lengths differ (" + std::to_string(m1.size()) + " vs " +
                         std::to_string(m2.size()) + ")");
  }
  if (m1.empty()) return {};
  PairMetrics out = pair_metrics(mean_of(m1), mean_of(m2));
  double sq = 0.0;
  for (std::size_t i = 0; i < m1.size(); ++i) sq += (m2[i] - m1[i]) * (m2[i] - m1[i]);
  out.sumsquare = std::sqrt(sq);
  return out;
}

PairMetrics pair_metrics(double m1, double m2) {
  return {m2 - m1, m2 / (m1 + kMeanRatioGuard), 0.0};
}

double sequence_euclid(const Frame& f1, const Mask& mask1, const Frame& f2, const Mask& mask2) {
  double acc = 0.0;
  for (auto c : kChannels) {
    const double d = masked_mean(f2.plane(c), mask2) - masked_mean(f1.plane(c), mask1);
    acc += d * d;
  }
  return std::sqrt(acc);
}

double sequence_euclid(const Frame& f1, const Frame& f2, const Mask& mask) { return sequence_euclid(f1, mask, f2, mask); }

ColorSamples sample_colors(const Frame& frame, std::span<const Point> path) {
  ColorSamples out;
  for (auto c : kChannels) out.channel[static_cast<int>(c)] = sample_path(frame.plane(c), path);
  return out;
}

std::pair<ColorSamples, ColorSamples> align_colors(const ColorSamples& a, const ColorSamples& b, int lag) {
  std::pair<ColorSamples, ColorSamples> out;
  for (int c = 0; c < 3; ++c) {
    std::tie(out.first.channel[c], out.second.channel[c]) = apply_lag(a.channel[c], b.channel[c], lag);
  }
  return out;
}

std::array<double, 12> color_block_12(const ColorSamples& s1, const ColorSamples& s2, const ColorRatioConfig& cfg) {
  std::array<double, 12> out{};
  std::size_t k = 0;
  for (const auto& pair : cfg.pairs) {
    const auto m = pair_metrics(ratio_samples(s1, pair, cfg.epsilon), ratio_samples(s2, pair, cfg.epsilon));
    out[k++] = m.diff;
    out[k++] = m.ratio;
    out[k++] = m.sumsquare;
  }
  for (auto c : kChannels) out[k++] = mean_of(s2[c]) - mean_of(s1[c]);
  return out;
}

ColorFeatures color_feature_block(const Frame& f1, const Frame& f2, const RegionSet& r1, const RegionSet& r2,
                                  const ColorSamples& ridge1, const ColorSamples& ridge2,
                                  const ColorRatioConfig& cfg) {
  ColorFeatures out;
  // Element-wise comparison needs pixel correspondence: use the overlap.
  const Mask common = mask_and(r1.foreground, r2.foreground);
  out.foreground = color_block_12(mask_colors(f1, common), mask_colors(f2, common), cfg);
  out.ridge_signal = color_block_12(ridge1, ridge2, cfg);

  std::size_t k = 0;
  for (const auto& pair : cfg.pairs) {
    const double m1 = color_ratio_measure(f1, pair.numerator, pair.denominator, r1.ridge_pixels, cfg.epsilon);
    const double m2 = color_ratio_measure(f2, pair.numerator, pair.denominator, r2.ridge_pixels, cfg.epsilon);
    const auto m = pair_metrics(m1, m2);
    out.ridge_pixels[k++] = m.diff;
    out.ridge_pixels[k++] = m.ratio;
  }
  out.ridge_pixels[k] = sequence_euclid(f1, r1.ridge_pixels, f2, r2.ridge_pixels);
  return out;
}

MaskFeatures mask_features(const Mask& mask1, const Mask& mask2) {
  if (!mask1.same_shape(mask2)) throw std::invalid_argument("mask_features: shapes differ");
  MaskFeatures out;
  const auto fore1 = static_cast<double>(mask1.count());
  const auto fore2 = static_cast<double>(mask2.count());
  const auto back1 = static_cast<double>(mask1.complement_count());
  const auto back2 = static_cast<double>(mask2.complement_count());
  auto ratio = [&](double fore, double back) {
    if (back == 0.0) {
      out.full_foreground = true;
      back = 1.0;
    }
    return fore / back;
  };
  const double r1 = ratio(fore1, back1);
  const double r2 = ratio(fore2, back2);
  out.values = {r1,
                r2,
                r1 / (r2 + kMaskRatioEpsilon),
                back2 - back1,
                static_cast<double>(mask_xor_count(mask1, mask2)),
                fore2 - fore1};
  return out;
}

RealImage delta_image(std::span<const Frame> frames) {
  if (frames.size() < 2) throw InsufficientFrames("delta image needs at least two frames");
  const int w = frames[0].width();
  const int h = frames[0].height();
  RealImage acc(w, h, 0.0);
  auto a = acc.data();
  for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
    if (frames[i + 1].width() != w || frames[i + 1].height() != h) throw InsufficientFrames("frame sizes differ");
    auto r0 = frames[i].plane(Channel::red).data();
    auto r1 = frames[i + 1].plane(Channel::red).data();
    for (std::size_t p = 0; p < a.size(); ++p) {
      const double d = static_cast<double>(r0[p]) - static_cast<double>(r1[p]);
      a[p] += std::min(d * d, kPressClamp);
    }
  }
  for (auto& v : a) v = std::sqrt(v);
  return acc;
}

double delta_image_feature(std::span<const Frame> frames, const Mask& mask) {
  const RealImage img = delta_image(frames);
  const bool use_mask = !mask.empty() && mask.count() > 0;
  if (use_mask && !img.same_shape(mask)) throw std::invalid_argument("delta_image_feature: mask shape differs");
  double sum = 0.0;
  std::size_t n = 0;
  auto d = img.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (use_mask && !mask.data()[i]) continue;
    sum += d[i];
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

std::array<double, kIntensityBins> intensity_histogram(const GrayFrame& gray, const Mask& mask) {
  if (!gray.same_shape(mask)) throw std::invalid_argument("intensity_histogram: mask shape differs");
  std::array<double, kIntensityBins> h{};
  std::size_t n = 0;
  auto g = gray.data();
  auto m = mask.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!m[i]) continue;
    h[g[i] / (256 / kIntensityBins)] += 1.0;
    ++n;
  }
  if (n) {
    for (auto& v : h) v /= static_cast<double>(n);
  }
  return h;
}

namespace {

constexpr int kDarkLastBin = 20;
constexpr int kLightFirstBin = 43;

double bin_centre(int b) { return (256.0 / kIntensityBins) * b + (256.0 / kIntensityBins - 1.0) / 2.0; }

double entropy(const std::array<double, kIntensityBins>& h) {
  double e = 0.0;
  for (double p : h) {
    if (p > 0.0) e -= p * std::log(p);
  }
  return e;
}

}  // namespace

std::array<double, 6> intensity_dynamic_features(const GrayFrame& g1, const GrayFrame& g2, const Mask& mask1,
                                                 const Mask& mask2) {
  const auto h1 = intensity_histogram(g1, mask1);
  const auto h2 = intensity_histogram(g2, mask2);
  double tv = 0.0, dark = 0.0, light = 0.0, mean_shift = 0.0, energy = 0.0;
  for (int b = 0; b < kIntensityBins; ++b) {
    const double d = h2[b] - h1[b];
    tv += std::abs(d);
    if (b <= kDarkLastBin) dark += d;
    if (b >= kLightFirstBin) light += d;
    mean_shift += d * bin_centre(b);
    energy += h2[b] * h2[b] - h1[b] * h1[b];
  }
  return {tv, dark, light, mean_shift, energy, entropy(h2) - entropy(h1)};
}

double high_band_energy_fraction(std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n < 4) return 0.0;
  const double m = mean_of(signal);
  double upper = 0.0;
  double total = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double v = signal[t] - m;
      const double a = w * static_cast<double>(t);
      re += v * std::cos(a);
      im -= v * std::sin(a);
    }
    const double e = re * re + im * im;
    total += e;
    if (4 * k > n) upper += e;
  }
  return total > 0.0 ? upper / total : 0.0;
}

double mean_local_maxima(std::span<const double> signal) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 1; i + 1 < signal.size(); ++i) {
    if (signal[i] > signal[i - 1] && signal[i] >= signal[i + 1]) {
      sum += signal[i];
      ++n;
    }
  }
  if (n == 0) return signal.empty() ? 0.0 : *std::max_element(signal.begin(), signal.end());
  return sum / static_cast<double>(n);
}

PerspirationFeatures perspiration_features(std::span<const double> sig1, std::span<const double> sig2,
                                           const PerspirationConfig& cfg) {
  if (sig1.size() != sig2.size()) throw AlignmentError("perspiration: signals differ in length");
  if (sig1.size() < kMinPerspirationLength) {
    throw AlignmentError("perspiration: ridge signal shorter than " + std::to_string(kMinPerspirationLength));
  }
  auto swing = [](std::span<const double> s) {
    double acc = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) acc += std::abs(s[i] - s[i - 1]);
    return acc;
  };
  auto frac = [](std::span<const double> s, auto pred) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), pred)) / static_cast<double>(s.size());
  };
  auto dry = [&](double v) { return v < cfg.dry_threshold; };
  auto wet = [&](double v) { return v > cfg.wet_threshold; };

  PerspirationFeatures out;
  const double var1 = variance_of(sig1);
  const double var2 = variance_of(sig2);
  out.degenerate = var1 == 0.0 || var2 == 0.0;
  out.values = {
      high_band_energy_fraction(sig2),
      swing(sig2) - swing(sig1),
      mean_local_maxima(sig2) / (mean_local_maxima(sig1) + kMeanRatioGuard),
      mean_of(sig2) - mean_of(sig1),
      100.0 * (var2 - var1) / (var1 + kMeanRatioGuard),
      frac(sig2, dry) - frac(sig1, dry),
      frac(sig2, wet) - frac(sig1, wet),
  };
  return out;
}

}  // namespace pad
