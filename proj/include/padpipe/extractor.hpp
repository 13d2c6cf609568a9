#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "padpipe/dynamic_features.hpp"
#include "padpipe/feature_table.hpp"
#include "padpipe/frame_selection.hpp"
#include "padpipe/ingest.hpp"
#include "padpipe/segmentation.hpp"
#include "padpipe/static_features.hpp"

namespace pad {

struct ExtractionConfig {
  double sigma_threshold = kDefaultBlankSigma;
  ForegroundConfig foreground;
  RidgeConfig ridges;
  int max_lag = kDefaultMaxLag;
  std::size_t top_ridges = kDefaultTopRidges;
  PerspirationConfig perspiration;
  ColorRatioConfig color;
};

struct CaptureFeatures {
  std::array<double, kStaticFeatureCount> static_block{};
  std::array<double, kDynamicFeatureCount> dynamic_block{};
  FramePair frames;
  int ridge_lag = 0;
  std::vector<std::string> flags;

  std::vector<double> values(FeatureSet set) const;
};

std::array<double, kStaticFeatureCount> static_feature_block(const GrayFrame& gray, const RegionSet& regions,
                                                             std::size_t top_ridges = kDefaultTopRidges);

// Full per-capture pipeline. Throws pad::Error subclasses on failure.
CaptureFeatures extract_capture(const CaptureSequence& seq, const ExtractionConfig& cfg = {});

struct ExtractionLogEntry {
  std::string capture_id;
  bool ok = false;
  std::string error;
  FramePair frames;
  int ridge_lag = 0;
  std::vector<std::string> flags;
};

struct ExtractionResult {
  FeatureTable table;
  std::vector<ExtractionLogEntry> log;
  std::size_t failures = 0;

  double failure_rate() const;
};

// Failed captures are logged and left out of the table, never zero-filled.
ExtractionResult extract_features(const std::vector<CaptureSequence>& sequences, FeatureSet set,
                                  const ExtractionConfig& cfg = {}, unsigned workers = 1);

std::string extraction_log_to_json(const std::vector<ExtractionLogEntry>& log);

inline constexpr double kMaxExtractionFailureRate = 0.10;

}  // namespace pad
