#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pad {

enum class FeatureFamily {
  lbp,
  intensity,
  wavelet_ridge,
  wavelet_valley,
  color_foreground,
  color_ridge_signal,
  color_ridge_pixels,
  mask,
  shift,
  intensity_dynamic,
  perspiration,
};

// Value a feature takes when both selected frames are the same image.
enum class Identity {
  none,        // static or per-frame quantity
  zero,
  one,
  mask_ratio,  // R1 / (R1 + 0.0001)
};

struct FeatureDescriptor {
  std::string name;
  FeatureFamily family;
  Identity identity;
};

enum class FeatureSet { static_only, dynamic_only, fused };

FeatureSet parse_feature_set(std::string_view s);
std::string_view to_string(FeatureSet s);

// FNV-1a over the names, each followed by a newline.
std::uint64_t layout_hash(std::span<const std::string> names);
std::string hex64(std::uint64_t v);

// Ordered feature descriptor list. Static block (164) precedes dynamic
// block (51) in the fused layout.
class FeatureLayout {
 public:
  static const FeatureLayout& of(FeatureSet set);

  std::span<const FeatureDescriptor> features() const { return features_; }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return features_.size(); }
  std::uint64_t hash() const { return hash_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

 private:
  explicit FeatureLayout(std::vector<FeatureDescriptor> features);

  std::vector<FeatureDescriptor> features_;
  std::vector<std::string> names_;
  std::uint64_t hash_ = 0;
};

}  // namespace pad
