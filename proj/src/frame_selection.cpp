#include "padpipe/frame_selection.hpp"

#include <stdexcept>

#include "padpipe/errors.hpp"
#include "padpipe/ingest.hpp"

namespace pad {

FramePair select_frames(const std::vector<bool>& blank, std::span<const std::int64_t> timestamps_ms) {
  if (blank.size() != timestamps_ms.size()) throw std::invalid_argument("blank flags and timestamps differ in length");

  std::size_t first = blank.size();
  std::size_t last = blank.size();
  for (std::size_t i = 0; i < blank.size(); ++i) {
    if (blank[i]) continue;
    if (first == blank.size()) first = i;
    last = i;
  }
  if (first == blank.size()) throw NoUsableFrames("all frames are blank");
  if (last == first) throw NoUsableFrames("only one non-blank frame");

  FramePair pair;
  pair.f1_index = first;
  for (std::size_t i = first + 1; i < blank.size(); ++i) {
    if (!blank[i] && timestamps_ms[i] - timestamps_ms[first] >= kMinFrameGapMs) {
      pair.f2_index = i;
      pair.dt_ms = timestamps_ms[i] - timestamps_ms[first];
      return pair;
    }
  }
  pair.f2_index = last;
  pair.dt_ms = timestamps_ms[last] - timestamps_ms[first];
  pair.gap_fallback = true;
  return pair;
}

FramePair select_frames(const CaptureSequence& seq, double sigma_threshold) {
  std::vector<std::int64_t> ts;
  ts.reserve(seq.frames.size());
  for (const auto& f : seq.frames) ts.push_back(f.timestamp_ms());
  return select_frames(blank_flags(seq, sigma_threshold), ts);
}

}  // namespace pad
