// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "padpipe/dynamic_features.hpp"
#include "padpipe/extractor.hpp"
#include "padpipe/feature_table.hpp"
#include "padpipe/ingest.hpp"
#include "padpipe/network.hpp"
#include "padpipe/static_features.hpp"
#include "padpipe/synth.hpp"
#include "test_support.hpp"

using namespace pad;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

int padpipe(const std::string& args) {
  const std::string cmd = std::string(PADPIPE_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void null_dynamics() {
  const auto t0 = Clock::now();
  const auto& layout = FeatureLayout::of(FeatureSet::dynamic_only);
  const auto r1_index = *layout.index_of("mask_r1");
  double worst = 0.0;
  int captures = 0;
  bool threw = false;
  for (auto preset : {SynthPreset::live, SynthPreset::spoof}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto src = generate_one(preset_params(preset), GroundTruth::live(), derive_seed(11, s));
      try {
        const auto f = extract_capture(padtest::repeated(src.frames[s % src.frames.size()]));
        const double r1 = f.dynamic_block[r1_index];
        for (std::size_t i = 0; i < layout.size(); ++i) {
          const double v = f.dynamic_block[i];
          switch (layout.features()[i].identity) {
            case Identity::zero: worst = std::max(worst, std::fabs(v)); break;
            case Identity::one: worst = std::max(worst, std::fabs(v - 1.0)); break;
            case Identity::mask_ratio: worst = std::max(worst, std::fabs(v - r1 / (r1 + kMaskRatioEpsilon))); break;
            case Identity::none: break;
          }
        }
        ++captures;
      } catch (const std::exception&) {
        threw = true;
      }
    }
  }
  const double secs = seconds_since(t0);
  report("null-dynamics", !threw && worst <= 1e-9 && secs < 10.0,
         std::to_string(captures) + " repeated-frame captures, max identity deviation " + fmt(worst) + " in " +
             fmt(secs) + " s (limits 1e-9, 10 s)");
}

void oracle_equivalence() {
  Rng rng(20261016);
  int lbp_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(16));
    const int h = 1 + static_cast<int>(rng.below(16));
    GrayFrame g(w, h);
    const bool low_contrast = trial % 2 == 1;
    for (auto& v : g.data()) v = static_cast<std::uint8_t>(low_contrast ? 60 + rng.below(3) : rng.below(256));
    Mask m(w, h);
    for (auto& v : m.data()) v = rng.uniform() < 0.85 ? 1 : 0;
    for (int r : {1, 2}) {
      const auto got = lbp_histogram(g, m, r);
      const auto want = padtest::oracle_histogram(g, m, r);
      for (int k = 0; k < kLbpClasses; ++k) lbp_mismatch += got[k] != want[k];
    }
  }

  int roc_mismatch = 0;
  double worst_apcer = 0.0, worst_auc = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(49);
    std::vector<double> s(n);
    for (auto& v : s) v = trial % 2 ? rng.uniform() : static_cast<double>(rng.below(5));
    std::vector<int> l(n);
    for (auto& v : l) v = static_cast<int>(rng.below(2));
    l[0] = 0;
    l[1] = 1;
    const auto roc = roc_curve(s, l);
    const auto oracle = padtest::oracle_roc(s, l);
    if (roc.size() != oracle.size()) {
      ++roc_mismatch;
      continue;
    }
    for (std::size_t i = 0; i < roc.size(); ++i) {
      roc_mismatch += roc[i].threshold != oracle[i].threshold || roc[i].bpcer != oracle[i].bpcer ||
                      roc[i].apcer != oracle[i].apcer;
    }
    for (double target : {0.0, 0.002, 0.01, 0.1, 0.3}) {
      worst_apcer = std::max(worst_apcer,
                             std::fabs(apcer_at_bpcer(roc, target) - padtest::oracle_apcer_at(s, l, target)));
    }
    worst_auc = std::max(worst_auc, std::fabs(roc_auc(roc) - padtest::oracle_auc(s, l)));
  }

  double worst_energy = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> sig(std::size_t{1} << (7 + rng.below(4)));
    for (auto& v : sig) v = rng.normal(0.0, 1.0 + 50.0 * rng.uniform());
    const auto d = haar_decompose(sig, kWaveletLevels);
    double e_in = 0.0, e_out = 0.0;
    for (double v : sig) e_in += v * v;
    for (const auto& level : d.details) {
      for (double v : level) e_out += v * v;
    }
    for (double v : d.approximation) e_out += v * v;
    worst_energy = std::max(worst_energy, std::fabs(e_in - e_out) / e_in);
  }
  report("oracle-equivalence",
         lbp_mismatch == 0 && roc_mismatch == 0 && worst_apcer <= 1e-12 && worst_auc <= 1e-12 && worst_energy <= 1e-9,
         "LBP bins differing " + std::to_string(lbp_mismatch) + "/7200, ROC points differing " +
             std::to_string(roc_mismatch) + ", max APCER gap " + fmt(worst_apcer) + ", max AUC gap " +
             fmt(worst_auc) + ", max Haar energy error " + fmt(worst_energy) + " (limit 1e-9)");
}

void gradient_check() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(404, seed));
    const int h1 = 2 + static_cast<int>(rng.below(7));
    const int h2 = 2 + static_cast<int>(rng.below(7));
    auto net = Network::xavier(NetworkSpec{{5, h1, h2, 2}}, rng);
    for (auto& b : net.params().biases) {
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.normal(0.0, 0.1);
    }
    Eigen::MatrixXd x(5, 6);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    std::vector<int> y;
    for (int i = 0; i < 6; ++i) y.push_back(static_cast<int>(rng.below(2)));
    worst = std::max(worst, padtest::gradient_check(net, x, y, 1e-5));
  }
  report("gradient-check", worst < 1e-4,
         "max per-layer relative error " + fmt(worst) + " over 10 micro-nets, h=1e-5 (limit 1e-4)");
}

void spot_checks() {
  int total = 0, passed = 0;
  std::string failed;
  auto check = [&](const std::string& name, double got, double want, double tol) {
    ++total;
    if (std::fabs(got - want) <= tol) {
      ++passed;
    } else {
      failed += " " + name + "=" + fmt(got);
    }
  };
  using padtest::flat_frame;
  const Mask all4 = padtest::full_mask(4, 4);
  check("ratio 100/50", color_ratio_image(flat_frame(4, 4, 50, 100, 0), Channel::green, Channel::red, all4)[5],
        1.99996, 1e-5);
  check("ratio 5/0", color_ratio_image(flat_frame(4, 4, 0, 5, 0), Channel::green, Channel::red, all4)[0], 5000.0,
        1e-9);
  check("measure 120/60", color_ratio_measure(flat_frame(4, 4, 60, 120, 0), Channel::green, Channel::red, all4),
        1.99997, 1e-5);
  const auto pm = pair_metrics(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6});
  check("pair diff", pm.diff, 2.0, 1e-12);
  check("pair ratio", pm.ratio, 2.0, 1e-9);
  check("pair sumsquare", pm.sumsquare, 3.7417, 1e-4);
  const auto ps = pair_metrics(2.0, 3.0);
  check("scalar diff", ps.diff, 1.0, 1e-12);
  check("scalar ratio", ps.ratio, 1.5, 1e-9);
  const Frame base = flat_frame(4, 4, 10, 20, 30);
  check("euclid 3-4-5", sequence_euclid(base, flat_frame(4, 4, 13, 24, 30), all4), 5.0, 1e-12);
  check("euclid 1-1-1", sequence_euclid(base, flat_frame(4, 4, 11, 21, 31), all4), 1.7321, 1e-4);

  Mask m(10, 10, 0);
  for (int i = 0; i < 40; ++i) m.data()[static_cast<std::size_t>(i)] = 1;
  auto mf = mask_features(m, m);
  check("R1", mf.values[0], 0.6667, 1e-4);
  check("RS", mf.values[2], 0.99985, 1e-5);
  check("delta back same", mf.values[3], 0.0, 0.0);
  check("MS same", mf.values[4], 0.0, 0.0);
  Mask more = m;
  for (int i = 40; i < 45; ++i) more.data()[static_cast<std::size_t>(i)] = 1;
  mf = mask_features(m, more);
  check("MS xor count", mf.values[4], 5.0, 0.0);
  check("delta back", mf.values[3], -5.0, 0.0);
  check("delta fore", mf.values[5], 5.0, 0.0);

  std::vector<Frame> steps;
  for (int i = 0; i < 8; ++i) steps.push_back(flat_frame(6, 5, static_cast<std::uint8_t>(100 + i % 2), 7, 7));
  check("delta sqrt7", delta_image_feature(steps, Mask()), 2.6458, 1e-4);
  std::vector<Frame> spike(2, flat_frame(5, 5, 0, 0, 0));
  spike[1].set_rgb(3, 1, 255, 0, 0);
  const auto d = delta_image(spike);
  check("delta clamp", d(3, 1), std::sqrt(255.0), 1e-12);
  check("delta clamp elsewhere", d(0, 0), 0.0, 0.0);

  // Intensity shift of a uniform darkening by 32 grey levels.
  const auto g1 = padtest::gray_from(32, 32, [](int x, int y) { return 64.0 + 4.0 * ((x + y) % 32); });
  const auto g2 = padtest::gray_from(32, 32, [](int x, int y) { return 32.0 + 4.0 * ((x + y) % 32); });
  const auto idf = intensity_dynamic_features(g1, g2, padtest::full_mask(32, 32), padtest::full_mask(32, 32));
  check("mean shift -32", idf[3], -32.0, 4.0);

  // Perspiration: offset and scale cases.
  std::vector<double> s1(128), s2(128), s3(128);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    s1[i] = 128.0 + 40.0 * std::sin(2.0 * std::numbers::pi * i / 8.0);
    s2[i] = s1[i] + 10.0;
    s3[i] = 2.0 * (s1[i] - 128.0);
  }
  const auto pf = perspiration_features(s1, s2);
  check("DM1 offset", pf.values[1], 0.0, 1e-9);
  check("DM3 offset", pf.values[3], 10.0, 1e-9);
  check("DM4 offset", pf.values[4], 0.0, 1e-9);
  std::vector<double> zero_mean(128);
  for (std::size_t i = 0; i < zero_mean.size(); ++i) zero_mean[i] = s1[i] - 128.0;
  check("DM4 scale", perspiration_features(zero_mean, s3).values[4], 300.0, 1e-6);

  check("luma 100,200,50", luma(100, 200, 50), 153.0, 0.0);
  report("spot-checks", passed == total,
         std::to_string(passed) + "/" + std::to_string(total) + " hand-derived values reproduced" +
             (failed.empty() ? "" : "; off:" + failed));
}

void cleaning_table() {
  const Frame textured = padtest::frame_from_gray(padtest::ridges(32, 32));
  const Frame blank = padtest::flat_frame(32, 32, 128, 128, 128);
  int total = 0, agree = 0;
  // Every blank/non-blank pattern for bursts of 1 to 10 frames.
  for (int len = 1; len <= 10; ++len) {
    for (int bits = 0; bits < (1 << len); ++bits) {
      CaptureSequence seq;
      int run = 0, best = 0;
      for (int i = 0; i < len; ++i) {
        const bool is_blank_frame = (bits >> i) & 1;
        Frame f = is_blank_frame ? blank : textured;
        f.set_timestamp_ms(i * kNominalFrameGapMs);
        seq.frames.push_back(f);
        run = is_blank_frame ? 0 : run + 1;
        best = std::max(best, run);
      }
      const auto want = best >= 7 ? CleanVerdict::keep : CleanVerdict::drop;
      ++total;
      agree += clean_sequence(seq, kDefaultBlankSigma) == want;
    }
  }
  // The documented table rows.
  auto pattern = [&](const std::string& p) {
    CaptureSequence seq;
    for (std::size_t i = 0; i < p.size(); ++i) {
      Frame f = p[i] == 'B' ? blank : textured;
      f.set_timestamp_ms(static_cast<std::int64_t>(i) * kNominalFrameGapMs);
      seq.frames.push_back(f);
    }
    return clean_sequence(seq, kDefaultBlankSigma);
  };
  const bool rows = pattern("NNNNNNNN") == CleanVerdict::keep && pattern("BNNNNNNN") == CleanVerdict::keep &&
                    pattern("NNNBNNNN") == CleanVerdict::drop;
  report("cleaning-rule", agree == total && rows,
         std::to_string(agree) + "/" + std::to_string(total) + " fabricated bursts classified as the run-of-7 rule " +
             "predicts; table rows " + (rows ? "match" : "differ"));
}

struct RunOutcome {
  bool ok = false;
  double seconds = 0.0;
};

RunOutcome full_run(const fs::path& out, const std::string& extra) {
  const auto t0 = Clock::now();
  const int code = padpipe(extra + " --seed 7 run --synth-live 200 --synth-spoof 200 --out-dir " + q(out));
  return {code == 0, seconds_since(t0)};
}

std::string slurp(const fs::path& p) {
  try {
    return read_text_file(p);
  } catch (const std::exception&) {
    return "<missing " + p.filename().string() + ">";
  }
}

void corpus_criteria() {
  padtest::TempDir dir("acceptance");
  const auto a = full_run(dir.path / "a", "--jobs 1");
  if (!a.ok) {
    report("qualitative-ordering", false, "padpipe run failed");
    report("determinism", false, "padpipe run failed");
    return;
  }
  const auto rep = nlohmann::json::parse(read_text_file(dir.path / "a" / "report.json"));
  const auto& ev = rep["evaluations"];
  const double auc_s = ev["static"]["pooled_auc"], auc_d = ev["dynamic"]["pooled_auc"];
  const double auc_f = ev["fused"]["pooled_auc"];
  const double apcer_f = ev["fused"]["mean_apcer_at_1pct_bpcer"];
  const bool ordering = auc_f >= auc_d - 0.02 && auc_f >= auc_s - 0.02;
  report("qualitative-ordering", ordering && apcer_f <= 0.05 && a.seconds < 600.0,
         "pooled AUC static " + fmt(auc_s) + ", dynamic " + fmt(auc_d) + ", fused " + fmt(auc_f) +
             " (slack 0.02); fused mean APCER@1% BPCER " + fmt(apcer_f) + " (limit 0.05); run took " +
             fmt(a.seconds) + " s (limit 600)");

  const auto b = full_run(dir.path / "b", "--jobs 2");
  bool same = b.ok;
  std::string diffs;
  for (const char* f : {"features_fused.csv", "extraction_log.json", "report.json", "roc_static.csv",
                        "roc_dynamic.csv", "roc_fused.csv"}) {
    if (slurp(dir.path / "a" / f) != slurp(dir.path / "b" / f)) {
      same = false;
      diffs += std::string(" ") + f;
    }
  }
  const auto feats = q(dir.path / "a" / "features_fused.csv");
  const bool trained = padpipe("train --features " + feats + " --out " + q(dir.path / "m1.bin")) == 0 &&
                       padpipe("--jobs 2 train --features " + feats + " --out " + q(dir.path / "m2.bin")) == 0;
  const bool models_same = trained && slurp(dir.path / "m1.bin") == slurp(dir.path / "m2.bin");
  report("determinism", same && models_same,
         std::string("two runs (jobs 1 vs 2) ") + (same ? "byte-identical" : "differ in" + diffs) +
             "; two trained models " + (models_same ? "byte-identical" : "differ"));
}

}  // namespace

int main() {
  null_dynamics();
  oracle_equivalence();
  gradient_check();
  spot_checks();
  corpus_criteria();
  cleaning_table();
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
