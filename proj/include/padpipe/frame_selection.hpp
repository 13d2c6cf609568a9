#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "padpipe/capture.hpp"

namespace pad {

inline constexpr std::int64_t kMinFrameGapMs = 625;

struct FramePair {
  std::size_t f1_index = 0;
  std::size_t f2_index = 0;
  std::int64_t dt_ms = 0;
  // Set when no non-blank frame lies kMinFrameGapMs after F1 and the last
  // non-blank frame was used instead.
  bool gap_fallback = false;
};

// Beginning frame: earliest non-blank. Ending frame: earliest non-blank
// frame at least kMinFrameGapMs later. Throws NoUsableFrames when fewer
// than two frames are non-blank.
FramePair select_frames(const std::vector<bool>& blank, std::span<const std::int64_t> timestamps_ms);
FramePair select_frames(const CaptureSequence& seq, double sigma_threshold);

}  // namespace pad
