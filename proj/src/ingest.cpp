#include "padpipe/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "padpipe/capture_io.hpp"
#include "padpipe/errors.hpp"
#include "padpipe/feature_table.hpp"
#include "padpipe/parallel.hpp"

namespace pad {

using nlohmann::json;

namespace {

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal().string();
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ManifestError(where + ": missing field '" + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) throw ManifestError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string optional_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw ManifestError(where + ": field '" + key + "' must be a string");
  return it->get<std::string>();
}

GroundTruth make_label(const std::string& cls, const std::string& mold, const std::string& material,
                       const std::string& where) {
  GroundTruth gt;
  try {
    gt.cls = parse_class(cls);
    gt.mold = parse_mold(mold);
  } catch (const ManifestError& e) {
    throw ManifestError(where + ": " + e.what());
  }
  gt.material = material;
  if (!gt.valid()) throw ManifestError(where + ": live entry must not carry mold or material");
  return gt;
}

}  // namespace

Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ManifestError("manifest line " + std::to_string(line_of(json_text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) throw ManifestError("manifest: top level must be an object");
  Manifest m;
  const auto& version = require(doc, "version", "manifest");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw ManifestError("manifest: field 'version' must be 1");
  }
  const auto& entries = require(doc, "entries", "manifest");
  if (!entries.is_array()) throw ManifestError("manifest: field 'entries' must be an array");

  std::vector<std::string> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    std::string where = "entry " + std::to_string(i);
    if (!e.is_object()) throw ManifestError(where + ": must be an object");
    ManifestEntry entry;
    entry.capture_id = require_string(e, "capture_id", where);
    where += " (" + entry.capture_id + ")";
    if (entry.capture_id.empty()) throw ManifestError(where + ": empty capture_id");
    if (std::find(seen.begin(), seen.end(), entry.capture_id) != seen.end()) {
      throw ManifestError(where + ": duplicate capture_id");
    }
    seen.push_back(entry.capture_id);
    entry.subject_id = require_string(e, "subject_id", where);
    entry.label = make_label(require_string(e, "class", where), optional_string(e, "mold", where),
                             optional_string(e, "material", where), where);

    const auto& frames = require(e, "frames", where);
    if (!frames.is_array() || frames.empty()) throw ManifestError(where + ": field 'frames' must be a nonempty array");
    for (const auto& f : frames) {
      if (!f.is_string()) throw ManifestError(where + ": field 'frames' must hold strings");
      entry.frames.push_back(resolve(base_dir, f.get<std::string>()));
    }
    if (auto it = e.find("timestamps_ms"); it != e.end() && !it->is_null()) {
      if (!it->is_array() || it->size() != entry.frames.size()) {
        throw ManifestError(where + ": field 'timestamps_ms' must match 'frames' in length");
      }
      std::vector<std::int64_t> ts;
      for (const auto& t : *it) {
        if (!t.is_number_integer()) throw ManifestError(where + ": field 'timestamps_ms' must hold integers");
        ts.push_back(t.get<std::int64_t>());
      }
      entry.timestamps_ms = std::move(ts);
    }
    if (auto s = optional_string(e, "static", where); !s.empty()) entry.static_frame = resolve(base_dir, s);
    m.entries.push_back(std::move(entry));
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw ManifestError(e.what());
  }
  return parse_manifest(text, path.parent_path());
}

std::string manifest_to_json(const Manifest& manifest) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    json j;
    j["capture_id"] = e.capture_id;
    j["subject_id"] = e.subject_id;
    j["class"] = std::string(to_string(e.label.cls));
    j["mold"] = std::string(to_string(e.label.mold));
    j["material"] = e.label.material;
    j["frames"] = e.frames;
    if (e.timestamps_ms) j["timestamps_ms"] = *e.timestamps_ms;
    if (e.static_frame) j["static"] = *e.static_frame;
    entries.push_back(std::move(j));
  }
  json doc;
  doc["version"] = manifest.version;
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  write_text_file(path, manifest_to_json(manifest));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Manifest manifest_from_csv(const std::string& csv_text, const std::filesystem::path& base_dir) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw ManifestError("csv: empty input");
  const auto header = split_csv_line(line);
  auto col = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int c_id = col("capture_id");
  const int c_subject = col("subject_id");
  const int c_class = col("class");
  const int c_mold = col("mold");
  const int c_material = col("material");
  const int c_static = col("static");
  if (c_id < 0 || c_subject < 0 || c_class < 0) {
    throw ManifestError("csv line 1: header needs capture_id, subject_id and class");
  }
  std::vector<int> frame_cols;
  for (int k = 0;; ++k) {
    const int c = col("frame" + std::to_string(k));
    if (c < 0) break;
    frame_cols.push_back(c);
  }
  if (frame_cols.empty()) throw ManifestError("csv line 1: header needs frame0..frameN columns");

  Manifest m;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    const std::string where = "csv line " + std::to_string(line_no);
    if (cells.size() < header.size()) throw ManifestError(where + ": expected " + std::to_string(header.size()) + " cells");
    ManifestEntry e;
    e.capture_id = cells[c_id];
    e.subject_id = cells[c_subject];
    e.label = make_label(cells[c_class], c_mold >= 0 ? cells[c_mold] : "", c_material >= 0 ? cells[c_material] : "",
                         where);
    for (int c : frame_cols) {
      if (!cells[c].empty()) e.frames.push_back(resolve(base_dir, cells[c]));
    }
    if (e.frames.empty()) throw ManifestError(where + ": no frame paths");
    if (c_static >= 0 && !cells[c_static].empty()) e.static_frame = resolve(base_dir, cells[c_static]);
    m.entries.push_back(std::move(e));
  }
  return m;
}

bool is_blank(const GrayFrame& gray, double sigma_threshold) {
  if (gray.height() < 1 || gray.width() < 1) return true;
  const auto row = gray.row(gray.height() / 2);
  double mean = 0.0;
  for (auto v : row) mean += v;
  mean /= static_cast<double>(row.size());
  double var = 0.0;
  for (auto v : row) var += (v - mean) * (v - mean);
  var /= static_cast<double>(row.size());
  return std::sqrt(var) < sigma_threshold;
}

bool is_blank(const Frame& frame, double sigma_threshold) { return is_blank(to_grayscale(frame), sigma_threshold); }

std::size_t longest_nonblank_run(const std::vector<bool>& blank_flags) {
  std::size_t best = 0;
  std::size_t run = 0;
  for (bool blank : blank_flags) {
    run = blank ? 0 : run + 1;
    best = std::max(best, run);
  }
  return best;
}

std::vector<bool> blank_flags(const CaptureSequence& seq, double sigma_threshold) {
  std::vector<bool> flags;
  flags.reserve(seq.frames.size());
  for (const auto& f : seq.frames) flags.push_back(is_blank(f, sigma_threshold));
  return flags;
}

CleanVerdict clean_sequence(const CaptureSequence& seq, double sigma_threshold) {
  return longest_nonblank_run(blank_flags(seq, sigma_threshold)) >= kRequiredNonBlankRun ? CleanVerdict::keep
                                                                                     : CleanVerdict::drop;
}

CaptureSequence load_sequence(const ManifestEntry& entry) {
  CaptureSequence seq;
  seq.capture_id = entry.capture_id;
  seq.subject_id = entry.subject_id;
  seq.label = entry.label;
  seq.frames.reserve(entry.frames.size());
  for (std::size_t k = 0; k < entry.frames.size(); ++k) {
    const std::int64_t ts = entry.timestamps_ms ? (*entry.timestamps_ms)[k]
                                                : static_cast<std::int64_t>(k) * kNominalFrameGapMs;
    if (!std::filesystem::exists(entry.frames[k])) throw Error("missing frame file " + entry.frames[k]);
    seq.frames.push_back(read_frame(entry.frames[k], ts));
  }
  if (entry.static_frame) {
    if (!std::filesystem::exists(*entry.static_frame)) throw Error("missing static file " + *entry.static_frame);
    seq.static_image = read_frame(*entry.static_frame);
  }
  try {
    seq.validate();
  } catch (const std::invalid_argument& e) {
    throw Error(e.what());
  }
  return seq;
}

LoadedDataset load_dataset(const Manifest& manifest, double sigma_threshold, unsigned workers) {
  const std::size_t n = manifest.entries.size();
  struct Slot {
    std::optional<CaptureSequence> seq;
    std::string error;
    CleanVerdict verdict = CleanVerdict::drop;
  };
  std::vector<Slot> slots(n);
  parallel_for(n, workers, [&](std::size_t i) {
    try {
      auto seq = load_sequence(manifest.entries[i]);
      slots[i].verdict = clean_sequence(seq, sigma_threshold);
      slots[i].seq = std::move(seq);
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });

  LoadedDataset out;
  out.kept.version = manifest.version;
  std::ostringstream rule;
  rule << "keep iff >= " << kRequiredNonBlankRun << " consecutive frames with middle-row grey std >= "
       << format_double(sigma_threshold);
  out.report.rule = rule.str();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& id = manifest.entries[i].capture_id;
    if (!slots[i].seq) {
      out.errors.push_back({id, slots[i].error});
      continue;
    }
    ++out.report.total_in;
    if (slots[i].verdict == CleanVerdict::drop) {
      ++out.report.removed;
      out.report.removed_ids.push_back(id);
      continue;
    }
    out.sequences.push_back(std::move(*slots[i].seq));
    out.kept.entries.push_back(manifest.entries[i]);
  }
  return out;
}

LoadedDataset load_dataset(const std::filesystem::path& manifest_path, double sigma_threshold, unsigned workers) {
  return load_dataset(read_manifest(manifest_path), sigma_threshold, workers);
}

std::string cleaning_report_to_json(const CleaningReport& report) {
  json j;
  j["total_in"] = report.total_in;
  j["removed"] = report.removed;
  j["removed_ids"] = report.removed_ids;
  j["rule"] = report.rule;
  return j.dump(2) + "\n";
}

ManifestEntry save_sequence(const std::filesystem::path& dir, const CaptureSequence& seq) {
  std::filesystem::create_directories(dir);
  ManifestEntry e;
  e.capture_id = seq.capture_id;
  e.subject_id = seq.subject_id;
  e.label = seq.label;
  std::vector<std::int64_t> ts;
  for (std::size_t k = 0; k < seq.frames.size(); ++k) {
    const auto name = frame_file_name(seq.capture_id, k);
    write_frame(dir / name, seq.frames[k]);
    e.frames.push_back(name);
    ts.push_back(seq.frames[k].timestamp_ms());
  }
  e.timestamps_ms = std::move(ts);
  if (seq.static_image) {
    const auto name = seq.capture_id + "_static.png";
    write_frame(dir / name, *seq.static_image);
    e.static_frame = name;
  }
  return e;
}

}  // namespace pad
