#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "padpipe/image.hpp"

namespace pad {

enum class PresentationClass { live, spoof };
enum class MoldType { none, three_d, dental };

std::string_view to_string(PresentationClass c);
std::string_view to_string(MoldType m);
// Throws ManifestError on an unknown token.
PresentationClass parse_class(std::string_view s);
MoldType parse_mold(std::string_view s);

struct GroundTruth {
  PresentationClass cls = PresentationClass::live;
  MoldType mold = MoldType::none;
  std::string material;

  static GroundTruth live() { return {}; }
  static GroundTruth spoof(MoldType mold, std::string material) {
    return {PresentationClass::spoof, mold, std::move(material)};
  }

  bool is_spoof() const { return cls == PresentationClass::spoof; }
  // Live captures carry no mold or material.
  bool valid() const { return cls == PresentationClass::spoof || (mold == MoldType::none && material.empty()); }
  bool operator==(const GroundTruth&) const = default;
};

struct CaptureSequence {
  std::vector<Frame> frames;
  GroundTruth label;
  std::string subject_id;
  std::string capture_id;
  // Dedicated static capture; when absent the static features use frame F1.
  std::optional<Frame> static_image;

  // Checks shape agreement, strictly increasing timestamps and label
  // consistency. Throws std::invalid_argument with the failing rule.
  void validate() const;
  bool operator==(const CaptureSequence&) const = default;
};

inline constexpr std::int64_t kNominalFrameGapMs = 125;
inline constexpr std::size_t kBurstLength = 8;

struct RidgeSignal {
  std::vector<double> samples;
  std::vector<Point> path;

  std::size_t size() const { return samples.size(); }
};

// Ridge orientation and period estimated per square block.
struct RidgeGeometry {
  int block = 16;
  int blocks_x = 0;
  int blocks_y = 0;
  // Direction of the ridge normal (radians) and ridge period (pixels).
  std::vector<double> normal_angle;
  std::vector<double> period;

  double normal_at(int x, int y) const;
  double period_at(int x, int y) const;
};

struct RegionSet {
  Mask foreground;
  Mask ridge_pixels;
  std::vector<RidgeSignal> ridge_signals;
  RidgeGeometry geometry;
};

}  // namespace pad
