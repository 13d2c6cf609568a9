#include <doctest.h>

#include <fstream>

#include "padpipe/capture_io.hpp"
#include "padpipe/errors.hpp"
#include "padpipe/ingest.hpp"
#include "test_support.hpp"

using namespace pad;
using padtest::flat_frame;

TEST_CASE("luma matches hand evaluation") {
  CHECK(luma(0, 0, 0) == 0);
  CHECK(luma(255, 255, 255) == 255);
  CHECK(luma(100, 200, 50) == 153);
  for (int v = 0; v < 256; ++v) {
    const auto u = static_cast<std::uint8_t>(v);
    CHECK(luma(u, u, u) == u);
  }
}

TEST_CASE("grayscale of a gray frame is the frame") {
  Rng rng(3);
  const GrayFrame g = padtest::random_gray(17, 9, rng);
  CHECK(to_grayscale(padtest::frame_from_gray(g)) == g);
}

TEST_CASE("PNG round trip is lossless") {
  padtest::TempDir dir("png");
  Rng rng(11);
  Frame f(23, 19, 0);
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      f.set_rgb(x, y, static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
                static_cast<std::uint8_t>(rng.below(256)));
    }
  }
  write_frame(dir.path / "a.png", f);
  CHECK(read_frame(dir.path / "a.png", 0) == f);
  CHECK_THROWS_AS(read_frame(dir.path / "missing.png"), Error);
}

TEST_CASE("sequence serialisation round trip") {
  padtest::TempDir dir("seq");
  CaptureSequence seq;
  seq.capture_id = "c1";
  seq.subject_id = "s9";
  seq.label = GroundTruth::spoof(MoldType::dental, "playdoh");
  Rng rng(5);
  for (int k = 0; k < 8; ++k) {
    const GrayFrame g = padtest::random_gray(12, 10, rng);
    seq.frames.push_back(Frame({g, padtest::random_gray(12, 10, rng), g}, 100 * k + 7));
  }
  Manifest m;
  m.entries.push_back(save_sequence(dir.path, seq));
  write_manifest(dir.path / "m.json", m);
  const Manifest back = read_manifest(dir.path / "m.json");
  REQUIRE(back.entries.size() == 1);
  CHECK(load_sequence(back.entries[0]) == seq);
}

TEST_CASE("is_blank inspects only the middle row") {
  CHECK(is_blank(flat_frame(8, 8, 128, 128, 128), 3.0));
  GrayFrame alt = padtest::gray_from(8, 8, [](int x, int) { return x % 2 ? 255 : 0; });
  CHECK_FALSE(is_blank(alt, 3.0));
  GrayFrame top = padtest::gray_from(8, 8, [](int x, int y) { return y < 3 ? (x % 2) * 255 : 40; });
  CHECK(is_blank(top, 3.0));
  // Row std exactly 127.5 for the alternating row.
  CHECK(is_blank(alt, 127.6));
  CHECK_FALSE(is_blank(alt, 127.5));
}

namespace {

std::vector<bool> pattern(const std::string& p) {
  std::vector<bool> out;
  for (char c : p) out.push_back(c == '.');
  return out;
}

CaptureSequence burst(const std::string& p) {
  const Frame textured = padtest::frame_from_gray(padtest::ridges(32, 32));
  const Frame blank = flat_frame(32, 32, 90, 90, 90);
  CaptureSequence seq;
  seq.capture_id = "b";
  seq.subject_id = "s";
  for (std::size_t i = 0; i < p.size(); ++i) {
    Frame f = p[i] == '.' ? blank : textured;
    f.set_timestamp_ms(static_cast<std::int64_t>(i) * 125);
    seq.frames.push_back(f);
  }
  return seq;
}

}  // namespace

TEST_CASE("cleaning keeps exactly the bursts with seven consecutive non-blank frames") {
  // '#' non-blank, '.' blank
  const std::vector<std::pair<std::string, bool>> table = {
      {"########", true}, {".#######", true}, {"#######.", true}, {"###.####", false},
      {"#.######", false}, {"..######", false}, {"#######", true}, {"######", false},
      {"........", false}, {"#########", true}, {"##.#######", true}, {"#", false},
  };
  for (const auto& [p, keep] : table) {
    CAPTURE(p);
    CHECK((longest_nonblank_run(pattern(p)) >= kRequiredNonBlankRun) == keep);
    CHECK((clean_sequence(burst(p), 3.0) == CleanVerdict::keep) == keep);
  }
}

TEST_CASE("manifest parse errors name the entry and field") {
  auto message = [](const std::string& text) {
    try {
      parse_manifest(text);
    } catch (const ManifestError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("{\"version\":1,\n\"entries\":[\n{oops}]}").find("line 3") != std::string::npos);
  CHECK(message(R"({"version":2,"entries":[]})").find("version") != std::string::npos);
  const std::string dup =
      R"({"version":1,"entries":[{"capture_id":"a","subject_id":"s","class":"live","frames":["x.png"]},
                                {"capture_id":"a","subject_id":"s","class":"live","frames":["y.png"]}]})";
  CHECK(message(dup).find("duplicate") != std::string::npos);
  const std::string bad_live =
      R"({"version":1,"entries":[{"capture_id":"a","subject_id":"s","class":"live","mold":"3d","frames":["x.png"]}]})";
  CHECK(message(bad_live).find("entry 0 (a)") != std::string::npos);
  const std::string no_frames = R"({"version":1,"entries":[{"capture_id":"a","subject_id":"s","class":"spoof"}]})";
  CHECK(message(no_frames).find("'frames'") != std::string::npos);
  const std::string bad_ts =
      R"({"version":1,"entries":[{"capture_id":"a","subject_id":"s","class":"live","frames":["x.png"],"timestamps_ms":[1,2]}]})";
  CHECK(message(bad_ts).find("timestamps_ms") != std::string::npos);
}

TEST_CASE("dataset loading: cleaning report, per-entry errors, order and synthesized timestamps") {
  padtest::TempDir dir("load");
  Manifest m;
  const std::vector<std::string> patterns = {"########", "###.####", ".#######", "........"};
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    CaptureSequence seq = burst(patterns[i]);
    seq.capture_id = "cap" + std::to_string(i);
    ManifestEntry e = save_sequence(dir.path, seq);
    e.timestamps_ms.reset();
    m.entries.push_back(e);
  }
  ManifestEntry missing = m.entries[0];
  missing.capture_id = "ghost";
  missing.frames[3] = "nope.png";
  m.entries.insert(m.entries.begin() + 1, missing);
  write_manifest(dir.path / "m.json", m);

  const LoadedDataset one = load_dataset(dir.path / "m.json", 3.0, 1);
  const LoadedDataset many = load_dataset(dir.path / "m.json", 3.0, 3);
  CHECK(one.report.total_in == 4);
  CHECK(one.report.removed == 2);
  CHECK(one.report.removed_ids == std::vector<std::string>{"cap1", "cap3"});
  REQUIRE(one.errors.size() == 1);
  CHECK(one.errors[0].capture_id == "ghost");
  REQUIRE(one.sequences.size() == 2);
  CHECK(one.sequences[0].capture_id == "cap0");
  CHECK(one.sequences[1].capture_id == "cap2");
  CHECK(one.sequences[0].frames[7].timestamp_ms() == 875);
  CHECK(many.sequences == one.sequences);
  CHECK(cleaning_report_to_json(many.report) == cleaning_report_to_json(one.report));
  for (const auto& s : one.sequences) CHECK(clean_sequence(s, 3.0) == CleanVerdict::keep);
}

TEST_CASE("CSV manifest import") {
  const std::string csv =
      "capture_id,subject_id,class,mold,material,frame0,frame1\n"
      "a,s1,spoof,dental,ecoflex,a0.png,a1.png\n"
      "b,s2,live,,,b0.png,b1.png\n";
  const Manifest m = manifest_from_csv(csv, "base");
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].label == GroundTruth::spoof(MoldType::dental, "ecoflex"));
  CHECK(m.entries[1].label == GroundTruth::live());
  CHECK(m.entries[1].frames[1] == "base/b1.png");
}

TEST_CASE("sequence validation") {
  CaptureSequence seq = padtest::repeated(flat_frame(4, 4, 1, 2, 3), 3);
  CHECK_NOTHROW(seq.validate());
  seq.frames[2].set_timestamp_ms(seq.frames[1].timestamp_ms());
  CHECK_THROWS_AS(seq.validate(), std::invalid_argument);
  seq = padtest::repeated(flat_frame(4, 4, 1, 2, 3), 3);
  seq.frames[1] = flat_frame(5, 4, 1, 2, 3, 125);
  CHECK_THROWS_AS(seq.validate(), std::invalid_argument);
  seq = padtest::repeated(flat_frame(4, 4, 1, 2, 3), 3);
  seq.label.material = "gel";
  CHECK_THROWS_AS(seq.validate(), std::invalid_argument);
}
