#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "padpipe/capture.hpp"
#include "padpipe/feature_layout.hpp"

namespace pad {

struct FeatureRow {
  std::string capture_id;
  std::string subject_id;
  PresentationClass cls = PresentationClass::live;
  std::vector<double> values;
};

// Feature CSV: an optional `#` provenance line, then
// capture_id,subject_id,class,<feature names...>, one row per capture.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<FeatureRow> rows;
  std::uint64_t config_hash = 0;

  std::uint64_t layout() const { return layout_hash(names); }
  // Columns of `set`; throws LayoutMismatch when any are missing.
  FeatureTable select(FeatureSet set) const;
};

std::string to_csv(const FeatureTable& table);
FeatureTable parse_feature_csv(const std::string& text);
FeatureTable read_feature_csv(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace pad
