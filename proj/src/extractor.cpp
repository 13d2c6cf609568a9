#include "padpipe/extractor.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "padpipe/errors.hpp"
#include "padpipe/parallel.hpp"

namespace pad {

std::vector<double> CaptureFeatures::values(FeatureSet set) const {
  std::vector<double> out;
  if (set != FeatureSet::dynamic_only) out.insert(out.end(), static_block.begin(), static_block.end());
  if (set != FeatureSet::static_only) out.insert(out.end(), dynamic_block.begin(), dynamic_block.end());
  return out;
}

std::array<double, kStaticFeatureCount> static_feature_block(const GrayFrame& gray, const RegionSet& regions,
                                                             std::size_t top_ridges) {
  std::array<double, kStaticFeatureCount> out{};
  auto it = out.begin();
  const auto lbp = lbp_features(gray, regions.foreground);
  it = std::copy(lbp.begin(), lbp.end(), it);
  const auto intensity = intensity_features(gray, regions.foreground);
  it = std::copy(intensity.begin(), intensity.end(), it);

  const auto path = top_ridge_path(regions.ridge_signals, top_ridges);
  const auto ridge = wavelet_multires_features(sample_path(gray, path));
  it = std::copy(ridge.begin(), ridge.end(), it);
  const auto valley = wavelet_multires_features(valley_signal(gray, path, regions.geometry));
  std::copy(valley.begin(), valley.end(), it);
  return out;
}

namespace {

RegionSet regions_for(const GrayFrame& gray, Mask foreground, const RidgeConfig& rc) {
  RegionSet r;
  r.foreground = std::move(foreground);
  auto ridges = extract_ridges(gray, r.foreground, rc);
  r.ridge_pixels = std::move(ridges.ridge_pixels);
  r.ridge_signals = std::move(ridges.signals);
  r.geometry = std::move(ridges.geometry);
  return r;
}

}  // namespace

CaptureFeatures extract_capture(const CaptureSequence& seq, const ExtractionConfig& cfg) {
  if (seq.frames.empty()) throw InsufficientFrames("capture has no frames");
  CaptureFeatures out;

  std::vector<GrayFrame> gray;
  gray.reserve(seq.frames.size());
  std::vector<bool> blank;
  std::vector<std::int64_t> ts;
  for (const auto& f : seq.frames) {
    gray.push_back(to_grayscale(f));
    blank.push_back(is_blank(gray.back(), cfg.sigma_threshold));
    ts.push_back(f.timestamp_ms());
  }
  out.frames = select_frames(blank, ts);
  if (out.frames.gap_fallback) out.flags.emplace_back("frame_gap_fallback");
  const std::size_t i1 = out.frames.f1_index;
  const std::size_t i2 = out.frames.f2_index;

  std::vector<Frame> usable;
  std::vector<Mask> usable_fg;
  Mask fg1, fg2;
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    if (blank[i]) continue;
    usable.push_back(seq.frames[i]);
    usable_fg.push_back(compute_foreground(gray[i], cfg.foreground));
    if (i == i1) fg1 = usable_fg.back();
    if (i == i2) fg2 = usable_fg.back();
  }
  const Frame& f1 = seq.frames[i1];
  const Frame& f2 = seq.frames[i2];
  const RegionSet r1 = regions_for(gray[i1], fg1, cfg.ridges);
  const RegionSet r2 = regions_for(gray[i2], fg2, cfg.ridges);

  // Ridge signal: F1's longest ridges, sampled in both frames and realigned.
  const auto path = top_ridge_path(r1.ridge_signals, cfg.top_ridges);
  const auto alignment = realign_signals(sample_path(gray[i1], path), sample_path(gray[i2], path), cfg.max_lag);
  out.ridge_lag = alignment.lag;
  if (alignment.degenerate) out.flags.emplace_back("ridge_alignment_degenerate");
  const auto [ridge1, ridge2] = align_colors(sample_colors(f1, path), sample_colors(f2, path), alignment.lag);

  const auto color = color_feature_block(f1, f2, r1, r2, ridge1, ridge2, cfg.color);
  const auto mask = mask_features(fg1, fg2);
  if (mask.full_foreground) out.flags.emplace_back("mask_full_foreground");

  Mask union_fg = usable_fg.front();
  for (std::size_t k = 1; k < usable_fg.size(); ++k) union_fg = mask_or(union_fg, usable_fg[k]);
  const double shift = delta_image_feature(usable, union_fg);

  const auto intensity = intensity_dynamic_features(gray[i1], gray[i2], fg1, fg2);
  const auto persp = perspiration_features(alignment.first, alignment.second, cfg.perspiration);
  if (persp.degenerate) out.flags.emplace_back("perspiration_degenerate");

  auto it = out.dynamic_block.begin();
  it = std::copy(color.foreground.begin(), color.foreground.end(), it);
  it = std::copy(color.ridge_signal.begin(), color.ridge_signal.end(), it);
  it = std::copy(color.ridge_pixels.begin(), color.ridge_pixels.end(), it);
  it = std::copy(mask.values.begin(), mask.values.end(), it);
  *it++ = shift;
  it = std::copy(intensity.begin(), intensity.end(), it);
  std::copy(persp.values.begin(), persp.values.end(), it);

  if (seq.static_image) {
    const GrayFrame g = to_grayscale(*seq.static_image);
    out.static_block = static_feature_block(g, regions_for(g, compute_foreground(g, cfg.foreground), cfg.ridges),
                                            cfg.top_ridges);
  } else {
    out.static_block = static_feature_block(gray[i1], r1, cfg.top_ridges);
  }

  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(out.static_block.begin(), out.static_block.end(), finite) ||
      !std::all_of(out.dynamic_block.begin(), out.dynamic_block.end(), finite)) {
    throw Error("non-finite feature value");
  }
  return out;
}

double ExtractionResult::failure_rate() const {
  return log.empty() ? 0.0 : static_cast<double>(failures) / static_cast<double>(log.size());
}

ExtractionResult extract_features(const std::vector<CaptureSequence>& sequences, FeatureSet set,
                                  const ExtractionConfig& cfg, unsigned workers) {
  struct Slot {
    std::optional<CaptureFeatures> features;
    std::string error;
  };
  std::vector<Slot> slots(sequences.size());
  parallel_for(sequences.size(), workers, [&](std::size_t i) {
    try {
      slots[i].features = extract_capture(sequences[i], cfg);
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });

  ExtractionResult out;
  out.table.names = FeatureLayout::of(set).names();
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const auto& seq = sequences[i];
    ExtractionLogEntry entry;
    entry.capture_id = seq.capture_id;
    if (slots[i].features) {
      const auto& f = *slots[i].features;
      entry.ok = true;
      entry.frames = f.frames;
      entry.ridge_lag = f.ridge_lag;
      entry.flags = f.flags;
      out.table.rows.push_back({seq.capture_id, seq.subject_id, seq.label.cls, f.values(set)});
    } else {
      entry.error = slots[i].error;
      ++out.failures;
    }
    out.log.push_back(std::move(entry));
  }
  return out;
}

std::string extraction_log_to_json(const std::vector<ExtractionLogEntry>& log) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : log) {
    nlohmann::json j;
    j["capture_id"] = e.capture_id;
    j["ok"] = e.ok;
    if (e.ok) {
      j["f1_index"] = e.frames.f1_index;
      j["f2_index"] = e.frames.f2_index;
      j["dt_ms"] = e.frames.dt_ms;
      j["ridge_lag"] = e.ridge_lag;
      j["flags"] = e.flags;
    } else {
      j["error"] = e.error;
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace pad
