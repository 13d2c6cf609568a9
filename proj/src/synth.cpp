#include "padpipe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "padpipe/errors.hpp"
#include "padpipe/rng.hpp"

namespace pad {

void PhenomenaParams::validate() const {
  const double magnitudes[] = {perspiration, shift_px, contact_growth, noise_sigma,
                               ridge_contrast, grain_sigma, jitter};
  for (double m : magnitudes) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw ConfigError("synth magnitudes must be finite and >= 0");
  }
  if (!(blood_shift >= 0.5 && blood_shift <= 2.0)) throw ConfigError("blood_shift gain must lie in [0.5, 2.0]");
  if (!(finger_scale > 0.1 && finger_scale <= 1.5)) throw ConfigError("finger_scale must lie in (0.1, 1.5]");
  if (!(ridge_period >= 3.0 && ridge_period <= 25.0)) throw ConfigError("ridge_period must lie in [3, 25]");
  if (!(stray_color_prob >= 0.0 && stray_color_prob <= 1.0)) {
    throw ConfigError("stray_color_prob must lie in [0, 1]");
  }
}

PhenomenaParams preset_params(SynthPreset preset) {
  PhenomenaParams p;
  switch (preset) {
    case SynthPreset::live:
      p.blood_shift = 1.07;
      p.perspiration = 0.6;
      p.shift_px = 0.5;
      p.contact_growth = 0.04;
      p.noise_sigma = 1.5;
      p.finger_scale = 1.0;
      p.ridge_contrast = 60.0;
      p.grain_sigma = 1.0;
      p.jitter = 0.5;
      break;
    case SynthPreset::spoof:
      p.blood_shift = 1.0;
      p.perspiration = 0.3;
      p.shift_px = 1.0;
      p.contact_growth = 0.01;
      p.noise_sigma = 1.5;
      p.finger_scale = 0.85;
      p.ridge_contrast = 52.0;
      p.grain_sigma = 2.0;
      p.jitter = 0.5;
      p.stray_color_prob = 0.15;
      break;
    case SynthPreset::null_dynamics:
      break;
  }
  return p;
}

SynthPreset parse_preset(const std::string& s) {
  if (s == "live") return SynthPreset::live;
  if (s == "spoof") return SynthPreset::spoof;
  if (s == "null" || s == "null_dynamics") return SynthPreset::null_dynamics;
  throw ConfigError("unknown synth preset '" + s + "' (expected live, spoof or null)");
}

namespace {

// Everything fixed for one capture.
struct Scene {
  double cx, cy, ax, ay;
  double theta, warp_amp, warp_len, warp_phase, period;
  double base[3];
  double ridge_gain[3];
  double contrast;
  double blood_final;
  double moisture_freq, moisture_phase;
  double perspiration;
  double contact_growth;
  double shift;
  double noise_sigma;
  double background;
  RealImage grain;
};

// Log-normal spread around `v` (its median); spread 0 returns `v`.
double spread(double v, double sigma, Rng& rng) { return sigma > 0.0 ? v * std::exp(sigma * rng.normal()) : v; }

Scene make_scene(const PhenomenaParams& p, int w, int h, Rng& rng) {
  Scene s;
  const double j = p.jitter;
  const bool varied = j > 0.0;
  const double scale = spread(p.finger_scale, 0.12 * j, rng);
  s.cx = w / 2.0 + (varied ? rng.uniform(-3.0, 3.0) : 0.0);
  s.cy = h / 2.0 + (varied ? rng.uniform(-3.0, 3.0) : 0.0);
  s.ax = 0.36 * w * scale;
  s.ay = 0.44 * h * scale;
  s.theta = varied ? rng.uniform(0.0, std::numbers::pi) : 0.3;
  s.warp_amp = varied ? rng.uniform(3.0, 8.0) : 5.0;
  s.warp_len = varied ? rng.uniform(50.0, 90.0) : 70.0;
  s.warp_phase = varied ? rng.uniform(0.0, 2 * std::numbers::pi) : 0.0;
  s.period = p.ridge_period;
  const double tone = varied ? rng.normal(0.0, 6.0) : 0.0;
  s.base[0] = 180.0 + tone;
  s.base[1] = 128.0 + tone;
  s.base[2] = 118.0 + tone;
  s.ridge_gain[0] = 1.0;
  s.ridge_gain[1] = 0.9;
  s.ridge_gain[2] = 0.9;
  s.contrast = spread(p.ridge_contrast, 0.3 * j, rng);
  double blood = 1.0 + (p.blood_shift - 1.0) * spread(1.0, 0.6 * j, rng);
  if (p.stray_color_prob > 0.0 && rng.uniform() < p.stray_color_prob) blood += 0.03;
  s.blood_final = std::clamp(blood, 0.5, 2.0);
  s.perspiration = spread(p.perspiration, j, rng);
  s.contact_growth = spread(p.contact_growth, j, rng);
  s.shift = spread(p.shift_px, 0.6 * j, rng);
  s.moisture_freq = rng.uniform(0.15, 0.3);
  s.moisture_phase = rng.uniform(0.0, 2 * std::numbers::pi);
  s.noise_sigma = p.noise_sigma;
  s.background = 214.0;
  s.grain = RealImage(w, h, 0.0);
  const double grain = spread(p.grain_sigma, 0.5 * j, rng);
  if (grain > 0.0) {
    for (auto& g : s.grain.data()) g = rng.normal(0.0, grain);
  }
  return s;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

// Dark-level pedestal: a lit sensor never reports a hard zero.
constexpr double kBlackLevel = 8.0;

Frame render(const Scene& s, double tf, double dx, double dy, std::int64_t t_ms, int w, int h, Rng& noise) {
  Frame f(w, h, t_ms);
  const double grow = 1.0 + s.contact_growth * tf;
  const double ax = s.ax * grow;
  const double ay = s.ay * grow;
  const double gain[3] = {1.0, 1.0 + (s.blood_final - 1.0) * tf, 1.0 + (s.blood_final - 1.0) * tf};
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  const double k = 2.0 * std::numbers::pi / s.period;
  const double moist_level = s.perspiration * tf;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = x - dx;
      const double v = y - dy;
      const double ex = (u - s.cx) / ax;
      const double ey = (v - s.cy) / ay;
      const double r = std::sqrt(ex * ex + ey * ey);
      const double inside = std::clamp((1.0 - r) * std::min(ax, ay) / 1.5 + 0.5, 0.0, 1.0);
      const double along = -u * sn + v * c;
      const double phase = k * (u * c + v * sn + s.warp_amp * std::sin(2 * std::numbers::pi * along / s.warp_len +
                                                                         s.warp_phase));
      const double ridge = 0.5 + 0.5 * std::cos(phase);
      const double moisture =
          moist_level * (0.6 + 0.4 * std::sin(s.moisture_freq * along + s.moisture_phase));
      const double dark = s.contrast * ridge + 30.0 * moisture * ridge + 12.0 * moisture * (1.0 - ridge);
      const int gx = std::clamp(static_cast<int>(std::lround(u)), 0, w - 1);
      const int gy = std::clamp(static_cast<int>(std::lround(v)), 0, h - 1);
      const double grain = s.grain(gx, gy);
      double out[3];
      for (int ch = 0; ch < 3; ++ch) {
        const double finger = s.base[ch] * gain[ch] - dark * s.ridge_gain[ch] + grain;
        double val = inside * finger + (1.0 - inside) * s.background;
        if (s.noise_sigma > 0.0) val += noise.normal(0.0, s.noise_sigma);
        out[ch] = std::max(val, kBlackLevel);
      }
      f.set_rgb(x, y, to_byte(out[0]), to_byte(out[1]), to_byte(out[2]));
    }
  }
  return f;
}

Frame blank_frame(const Frame& like, double level) {
  Frame f(like.width(), like.height(), like.timestamp_ms());
  const auto v = to_byte(level);
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) f.set_rgb(x, y, v, v, v);
  }
  return f;
}

}  // namespace

CaptureSequence generate_one(const PhenomenaParams& params, const GroundTruth& label, std::uint64_t seed,
                             const SynthOptions& opts) {
  params.validate();
  if (opts.width < 32 || opts.height < 32) throw ConfigError("synth frames must be at least 32x32");
  if (opts.frames < 1) throw ConfigError("synth needs at least one frame");
  Rng scene_rng(derive_seed(seed, 0));
  Rng motion_rng(derive_seed(seed, 1));
  Rng noise_rng(derive_seed(seed, 2));
  const Scene scene = make_scene(params, opts.width, opts.height, scene_rng);

  CaptureSequence seq;
  seq.label = label;
  seq.capture_id = "synth";
  seq.subject_id = "subj0";
  double dx = 0.0;
  double dy = 0.0;
  const double shift = scene.shift;
  for (std::size_t t = 0; t < opts.frames; ++t) {
    if (t > 0 && shift > 0.0) {
      const double a = motion_rng.uniform(0.0, 2 * std::numbers::pi);
      const double m = shift * (1.0 + 0.25 * params.jitter * motion_rng.normal());
      dx += m * std::cos(a);
      dy += m * std::sin(a);
    }
    const double tf = opts.frames > 1 ? static_cast<double>(t) / static_cast<double>(opts.frames - 1) : 0.0;
    seq.frames.push_back(render(scene, tf, dx, dy, static_cast<std::int64_t>(t) * kNominalFrameGapMs, opts.width,
                                opts.height, noise_rng));
  }
  for (std::size_t b : opts.faults.blank_frames) {
    if (b < seq.frames.size()) seq.frames[b] = blank_frame(seq.frames[b], scene.background);
  }
  if (opts.faults.truncate_to > 0 && opts.faults.truncate_to < seq.frames.size()) {
    seq.frames.resize(opts.faults.truncate_to);
  }
  return seq;
}

std::vector<CaptureSequence> generate(const PhenomenaParams& params, const GroundTruth& label, std::uint64_t seed,
                                      std::size_t n, const SynthOptions& opts, const std::string& id_prefix,
                                      std::size_t subject_pool) {
  std::vector<CaptureSequence> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CaptureSequence seq = generate_one(params, label, derive_seed(seed, i), opts);
    seq.capture_id = id_prefix + std::to_string(i);
    seq.subject_id = "subj" + std::to_string(subject_pool > 0 ? i % subject_pool : i);
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace pad
