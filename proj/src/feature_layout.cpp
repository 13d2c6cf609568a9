#include "padpipe/feature_layout.hpp"

#include <cstdio>

#include "padpipe/errors.hpp"

namespace pad {

FeatureSet parse_feature_set(std::string_view s) {
  if (s == "static") return FeatureSet::static_only;
  if (s == "dynamic") return FeatureSet::dynamic_only;
  if (s == "fused") return FeatureSet::fused;
  throw ConfigError("unknown feature set '" + std::string(s) + "' (expected static|dynamic|fused)");
}

std::string_view to_string(FeatureSet s) {
  switch (s) {
    case FeatureSet::static_only: return "static";
    case FeatureSet::dynamic_only: return "dynamic";
    case FeatureSet::fused: return "fused";
  }
  return "fused";
}

std::uint64_t layout_hash(std::span<const std::string> names) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& n : names) {
    for (unsigned char c : n) mix(c);
    mix('\n');
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

std::string two_digits(int i) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", i);
  return buf;
}

void add_static(std::vector<FeatureDescriptor>& out) {
  for (int r : {1, 2}) {
    for (int c = 0; c < 36; ++c) {
      out.push_back({"lbp_r" + std::to_string(r) + "_c" + two_digits(c), FeatureFamily::lbp, Identity::none});
    }
  }
  for (int b = 0; b < 64; ++b) out.push_back({"intensity_b" + two_digits(b), FeatureFamily::intensity, Identity::none});
  for (auto [prefix, family] : {std::pair{"wavelet_ridge", FeatureFamily::wavelet_ridge},
                                std::pair{"wavelet_valley", FeatureFamily::wavelet_valley}}) {
    for (int l = 1; l <= 7; ++l) {
      const std::string base = std::string(prefix) + "_l" + std::to_string(l);
      out.push_back({base + "_log_energy", family, Identity::none});
      out.push_back({base + "_std", family, Identity::none});
    }
  }
}

void add_color12(std::vector<FeatureDescriptor>& out, const std::string& prefix, FeatureFamily family) {
  for (const char* pair : {"GR", "BR", "GB"}) {
    out.push_back({prefix + "_" + pair + "_diff", family, Identity::zero});
    out.push_back({prefix + "_" + pair + "_ratio", family, Identity::one});
    out.push_back({prefix + "_" + pair + "_sumsquare", family, Identity::zero});
  }
  for (const char* ch : {"R", "G", "B"}) out.push_back({prefix + "_" + ch + "_diff", family, Identity::zero});
}

void add_dynamic(std::vector<FeatureDescriptor>& out) {
  add_color12(out, "color_fg", FeatureFamily::color_foreground);
  add_color12(out, "color_rs", FeatureFamily::color_ridge_signal);
  for (const char* pair : {"GR", "BR", "GB"}) {
    out.push_back({std::string("color_rp_") + pair + "_diff", FeatureFamily::color_ridge_pixels, Identity::zero});
    out.push_back({std::string("color_rp_") + pair + "_ratio", FeatureFamily::color_ridge_pixels, Identity::one});
  }
  out.push_back({"color_rp_euclid", FeatureFamily::color_ridge_pixels, Identity::zero});

  out.push_back({"mask_r1", FeatureFamily::mask, Identity::none});
  out.push_back({"mask_r2", FeatureFamily::mask, Identity::none});
  out.push_back({"mask_rs", FeatureFamily::mask, Identity::mask_ratio});
  out.push_back({"mask_delta_back", FeatureFamily::mask, Identity::zero});
  out.push_back({"mask_ms", FeatureFamily::mask, Identity::zero});
  out.push_back({"mask_delta_fore", FeatureFamily::mask, Identity::zero});

  out.push_back({"shift_delta_image", FeatureFamily::shift, Identity::zero});

  for (const char* n : {"total_variation", "dark_change", "light_change", "mean_shift", "energy_change",
                        "entropy_change"}) {
    out.push_back({std::string("intensity_dyn_") + n, FeatureFamily::intensity_dynamic, Identity::zero});
  }

  out.push_back({"persp_sm_high_band", FeatureFamily::perspiration, Identity::none});
  out.push_back({"persp_dm1_swing", FeatureFamily::perspiration, Identity::zero});
  out.push_back({"persp_dm2_peak_growth", FeatureFamily::perspiration, Identity::one});
  out.push_back({"persp_dm3_mean_growth", FeatureFamily::perspiration, Identity::zero});
  out.push_back({"persp_dm4_variance_pct", FeatureFamily::perspiration, Identity::zero});
  out.push_back({"persp_dm5_dry_change", FeatureFamily::perspiration, Identity::zero});
  out.push_back({"persp_dm6_wet_change", FeatureFamily::perspiration, Identity::zero});
}

}  // namespace

FeatureLayout::FeatureLayout(std::vector<FeatureDescriptor> features) : features_(std::move(features)) {
  names_.reserve(features_.size());
  for (const auto& f : features_) names_.push_back(f.name);
  hash_ = layout_hash(names_);
}

const FeatureLayout& FeatureLayout::of(FeatureSet set) {
  static const FeatureLayout static_layout = [] {
    std::vector<FeatureDescriptor> f;
    add_static(f);
    return FeatureLayout(std::move(f));
  }();
  static const FeatureLayout dynamic_layout = [] {
    std::vector<FeatureDescriptor> f;
    add_dynamic(f);
    return FeatureLayout(std::move(f));
  }();
  static const FeatureLayout fused_layout = [] {
    std::vector<FeatureDescriptor> f;
    add_static(f);
    add_dynamic(f);
    return FeatureLayout(std::move(f));
  }();
  switch (set) {
    case FeatureSet::static_only: return static_layout;
    case FeatureSet::dynamic_only: return dynamic_layout;
    case FeatureSet::fused: return fused_layout;
  }
  return fused_layout;
}

std::optional<std::size_t> FeatureLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

}  // namespace pad
