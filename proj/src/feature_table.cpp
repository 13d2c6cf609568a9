#include "padpipe/feature_table.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "padpipe/errors.hpp"

namespace pad {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error("feature csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

constexpr std::string_view kProvenancePrefix = "# padpipe-features";

}  // namespace

FeatureTable FeatureTable::select(FeatureSet set) const {
  const auto& layout = FeatureLayout::of(set);
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < names.size(); ++i) column.emplace(names[i], i);
  std::vector<std::size_t> picks;
  picks.reserve(layout.size());
  for (const auto& n : layout.names()) {
    auto it = column.find(n);
    if (it == column.end()) {
      throw LayoutMismatch("feature table lacks column '" + n + "' required by the " +
                           std::string(to_string(set)) + " set");
    }
    picks.push_back(it->second);
  }
  FeatureTable out;
  out.names = layout.names();
  out.config_hash = config_hash;
  out.rows.reserve(rows.size());
  for (const auto& r : rows) {
    FeatureRow row{r.capture_id, r.subject_id, r.cls, {}};
    row.values.reserve(picks.size());
    for (auto p : picks) row.values.push_back(r.values[p]);
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string to_csv(const FeatureTable& table) {
  std::string out;
  out += std::string(kProvenancePrefix) + " layout=" + hex64(table.layout()) + " config=" + hex64(table.config_hash) +
         "\n";
  out += "capture_id,subject_id,class";
  for (const auto& n : table.names) out += "," + n;
  out += "\n";
  for (const auto& r : table.rows) {
    out += r.capture_id + "," + r.subject_id + "," + std::string(to_string(r.cls));
    for (double v : r.values) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

FeatureTable parse_feature_csv(const std::string& text) {
  FeatureTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.starts_with(kProvenancePrefix)) {
        if (auto pos = line.find("config="); pos != std::string::npos) {
          table.config_hash = std::stoull(line.substr(pos + 7, 16), nullptr, 16);
        }
      }
      continue;
    }
    const auto cells = split(line);
    if (!have_header) {
      if (cells.size() < 3 || cells[0] != "capture_id" || cells[1] != "subject_id" || cells[2] != "class") {
        throw Error("feature csv line " + std::to_string(line_no) + ": header must start capture_id,subject_id,class");
      }
      for (std::size_t i = 3; i < cells.size(); ++i) table.names.emplace_back(cells[i]);
      have_header = true;
      continue;
    }
    if (cells.size() != table.names.size() + 3) {
      throw Error("feature csv line " + std::to_string(line_no) + ": expected " +
                  std::to_string(table.names.size() + 3) + " cells, got " + std::to_string(cells.size()));
    }
    FeatureRow row;
    row.capture_id = cells[0];
    row.subject_id = cells[1];
    try {
      row.cls = parse_class(cells[2]);
    } catch (const Error& e) {
      throw Error("feature csv line " + std::to_string(line_no) + ": " + e.what());
    }
    row.values.reserve(table.names.size());
    for (std::size_t i = 3; i < cells.size(); ++i) row.values.push_back(parse_double(cells[i], line_no));
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw Error("feature csv: missing header");
  return table;
}

FeatureTable read_feature_csv(const std::filesystem::path& path) { return parse_feature_csv(read_text_file(path)); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pad
