#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "padpipe/capture.hpp"

namespace pad {

inline constexpr double kDefaultBlankSigma = 3.0;

struct ManifestEntry {
  std::string capture_id;
  std::string subject_id;
  GroundTruth label;
  std::vector<std::string> frames;
  std::optional<std::vector<std::int64_t>> timestamps_ms;
  std::optional<std::string> static_frame;
};

struct Manifest {
  int version = 1;
  std::vector<ManifestEntry> entries;
};

// Parses the JSON manifest. Relative frame paths resolve against
// `base_dir`. Throws ManifestError naming the entry and field at fault.
Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir = {});
Manifest read_manifest(const std::filesystem::path& path);
std::string manifest_to_json(const Manifest& manifest);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

// CSV with header capture_id,subject_id,class,mold,material,frame0..frameN[,static].
Manifest manifest_from_csv(const std::string& csv_text, const std::filesystem::path& base_dir = {});

bool is_blank(const GrayFrame& gray, double sigma_threshold);
bool is_blank(const Frame& frame, double sigma_threshold);

enum class CleanVerdict { keep, drop };

inline constexpr std::size_t kRequiredNonBlankRun = 7;

std::size_t longest_nonblank_run(const std::vector<bool>& blank_flags);
std::vector<bool> blank_flags(const CaptureSequence& seq, double sigma_threshold);
CleanVerdict clean_sequence(const CaptureSequence& seq, double sigma_threshold);

struct CleaningReport {
  std::size_t total_in = 0;
  std::size_t removed = 0;
  std::vector<std::string> removed_ids;
  std::string rule;
};

struct EntryError {
  std::string capture_id;
  std::string message;
};

struct LoadedDataset {
  std::vector<CaptureSequence> sequences;
  // Manifest entries of the kept sequences, in manifest order.
  Manifest kept;
  CleaningReport report;
  std::vector<EntryError> errors;
};

CaptureSequence load_sequence(const ManifestEntry& entry);

// Loads, cleans and reports. Unreadable entries land in `errors` and are
// excluded from both the kept list and the cleaning counts.
LoadedDataset load_dataset(const Manifest& manifest, double sigma_threshold = kDefaultBlankSigma,
                           unsigned workers = 1);
LoadedDataset load_dataset(const std::filesystem::path& manifest_path,
                           double sigma_threshold = kDefaultBlankSigma, unsigned workers = 1);

std::string cleaning_report_to_json(const CleaningReport& report);

// Writes frames as `<capture_id>_f<k>.png` under `dir` and returns the
// matching manifest entry (paths relative to `dir`).
ManifestEntry save_sequence(const std::filesystem::path& dir, const CaptureSequence& seq);

}  // namespace pad
