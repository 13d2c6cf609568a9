#include "padpipe/capture.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

#include "padpipe/errors.hpp"

namespace pad {

std::string_view to_string(PresentationClass c) { return c == PresentationClass::live ? "live" : "spoof"; }

std::string_view to_string(MoldType m) {
  switch (m) {
    case MoldType::none: return "none";
    case MoldType::three_d: return "3d";
    case MoldType::dental: return "dental";
  }
  return "none";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

PresentationClass parse_class(std::string_view s) {
  const auto v = lower(s);
  if (v == "live") return PresentationClass::live;
  if (v == "spoof") return PresentationClass::spoof;
  throw ManifestError("unknown class '" + std::string(s) + "' (expected live|spoof)");
}

MoldType parse_mold(std::string_view s) {
  const auto v = lower(s);
  if (v.empty() || v == "none" || v == "n/a" || v == "na") return MoldType::none;
  if (v == "3d") return MoldType::three_d;
  if (v == "dental") return MoldType::dental;
  throw ManifestError("unknown mold '" + std::string(s) + "' (expected none|3d|dental)");
}

void CaptureSequence::validate() const {
  if (!label.valid()) throw std::invalid_argument(capture_id + ": live capture with mold or material");
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].width() != frames[0].width() || frames[i].height() != frames[0].height()) {
      throw std::invalid_argument(capture_id + ": frame " + std::to_string(i) + " differs in size");
    }
    if (frames[i].timestamp_ms() <= frames[i - 1].timestamp_ms()) {
      throw std::invalid_argument(capture_id + ": timestamps not strictly increasing at frame " +
                                  std::to_string(i));
    }
  }
}

namespace {

std::size_t block_index(const RidgeGeometry& g, int x, int y) {
  const int bx = std::clamp(x / g.block, 0, g.blocks_x - 1);
  const int by = std::clamp(y / g.block, 0, g.blocks_y - 1);
  return static_cast<std::size_t>(by) * g.blocks_x + bx;
}

}  // namespace

double RidgeGeometry::normal_at(int x, int y) const { return normal_angle[block_index(*this, x, y)]; }
double RidgeGeometry::period_at(int x, int y) const { return period[block_index(*this, x, y)]; }

}  // namespace pad
