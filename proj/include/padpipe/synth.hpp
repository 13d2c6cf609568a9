#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "padpipe/capture.hpp"

namespace pad {

// Liveness phenomena rendered into a synthetic burst. Per-sample values are
// jittered around these by `jitter` (relative).
struct PhenomenaParams {
  // Final G and B gain reached at the last frame; R stays fixed.
  double blood_shift = 1.0;
  // Moisture spread rate along ridges over the burst.
  double perspiration = 0.0;
  // Per-frame translation magnitude (pixels).
  double shift_px = 0.0;
  // Fractional growth of the contact area from first to last frame.
  double contact_growth = 0.0;
  double noise_sigma = 0.0;

  // Static appearance.
  double finger_scale = 1.0;
  double ridge_period = 8.0;
  double ridge_contrast = 60.0;
  double grain_sigma = 0.0;
  double jitter = 0.0;
  // Probability that a capture carries a weak colour ramp regardless of label.
  double stray_color_prob = 0.0;

  void validate() const;
};

struct FaultInjection {
  // Frame indices replaced by flat background.
  std::vector<std::size_t> blank_frames;
  // Keep only the first N frames (0 = full burst).
  std::size_t truncate_to = 0;
};

struct SynthOptions {
  int width = 128;
  int height = 128;
  std::size_t frames = kBurstLength;
  FaultInjection faults;
};

enum class SynthPreset { live, spoof, null_dynamics };

PhenomenaParams preset_params(SynthPreset preset);
SynthPreset parse_preset(const std::string& s);

// Deterministic in (params, label, seed); capture i uses a seed derived
// from (seed, i). Ids are `<prefix><i>` with subjects `subj<i>` unless
// `subject_pool` > 0, in which case subjects cycle through that many ids.
std::vector<CaptureSequence> generate(const PhenomenaParams& params, const GroundTruth& label, std::uint64_t seed,
                                      std::size_t n, const SynthOptions& opts = {},
                                      const std::string& id_prefix = "cap", std::size_t subject_pool = 0);

CaptureSequence generate_one(const PhenomenaParams& params, const GroundTruth& label, std::uint64_t seed,
                             const SynthOptions& opts = {});

}  // namespace pad
