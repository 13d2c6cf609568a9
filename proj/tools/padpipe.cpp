#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "padpipe/capture_io.hpp"
#include "padpipe/cross_validation.hpp"
#include "padpipe/errors.hpp"
#include "padpipe/extractor.hpp"
#include "padpipe/feature_table.hpp"
#include "padpipe/ingest.hpp"
#include "padpipe/model_io.hpp"
#include "padpipe/parallel.hpp"
#include "padpipe/rng.hpp"
#include "padpipe/synth.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kDataQuality = 3, kDiverged = 4 };

std::string g_stage = "setup";

void stage(std::string name) { g_stage = std::move(name); }

void note(const std::string& msg) { std::cerr << "padpipe: " << msg << "\n"; }

void write_json(const fs::path& path, const ordered_json& j) { pad::write_text_file(path, j.dump(2) + "\n"); }

ordered_json provenance(const padcli::RunConfig& cfg) {
  return {{"config_hash", cfg.hash_hex()}, {"config", cfg.to_json()}};
}

pad::Manifest read_any_manifest(const fs::path& path) {
  if (path.extension() == ".csv") {
    std::string text;
    try {
      text = pad::read_text_file(path);
    } catch (const pad::Error& e) {
      throw pad::ManifestError(e.what());
    }
    return pad::manifest_from_csv(text, path.parent_path());
  }
  return pad::read_manifest(path);
}

// Rewrites frame paths so they resolve from `dir`.
pad::Manifest relocate(pad::Manifest m, const fs::path& dir) {
  const fs::path base = fs::absolute(dir.empty() ? fs::path(".") : dir).lexically_normal();
  auto rel = [&](const std::string& p) {
    return fs::absolute(p).lexically_normal().lexically_relative(base).generic_string();
  };
  for (auto& e : m.entries) {
    for (auto& f : e.frames) f = rel(f);
    if (e.static_frame) e.static_frame = rel(*e.static_frame);
  }
  return m;
}

ordered_json entry_errors_json(const std::vector<pad::EntryError>& errors) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : errors) arr.push_back({{"capture_id", e.capture_id}, {"error", e.message}});
  return arr;
}

ordered_json cleaning_json(const pad::LoadedDataset& data) {
  return {{"total_in", data.report.total_in},
          {"removed", data.report.removed},
          {"removed_ids", data.report.removed_ids},
          {"rule", data.report.rule},
          {"load_errors", entry_errors_json(data.errors)}};
}

pad::LoadedDataset load(const fs::path& manifest, const padcli::RunConfig& cfg) {
  stage("ingest");
  pad::LoadedDataset data = pad::load_dataset(read_any_manifest(manifest), cfg.blank_sigma, cfg.jobs);
  for (const auto& e : data.errors) note("cannot load " + e.capture_id + ": " + e.message);
  note("loaded " + std::to_string(data.report.total_in) + " captures, removed " +
       std::to_string(data.report.removed) + " by the cleaning rule");
  return data;
}

void dump_debug(const fs::path& dir, const std::vector<pad::CaptureSequence>& sequences,
                const padcli::RunConfig& cfg) {
  const auto ecfg = cfg.extraction();
  fs::create_directories(dir);
  for (const auto& seq : sequences) {
    try {
      const auto pair = pad::select_frames(seq, ecfg.sigma_threshold);
      const auto gray = pad::to_grayscale(seq.frames[pair.f1_index]);
      const auto regions = pad::compute_regions(gray, ecfg.foreground, ecfg.ridges);
      pad::write_mask(dir / (seq.capture_id + "_foreground.png"), regions.foreground);
      pad::write_mask(dir / (seq.capture_id + "_ridges.png"), regions.ridge_pixels);
      std::string csv = "ridge,index,x,y,value\n";
      for (std::size_t r = 0; r < regions.ridge_signals.size(); ++r) {
        const auto& sig = regions.ridge_signals[r];
        for (std::size_t i = 0; i < sig.size(); ++i) {
          csv += std::to_string(r) + "," + std::to_string(i) + "," + std::to_string(sig.path[i].x) + "," +
                 std::to_string(sig.path[i].y) + "," + pad::format_double(sig.samples[i]) + "\n";
        }
      }
      pad::write_text_file(dir / (seq.capture_id + "_signals.csv"), csv);
    } catch (const pad::Error& e) {
      note("debug dump skipped " + seq.capture_id + ": " + e.what());
    }
  }
}

ordered_json extraction_log_json(const pad::ExtractionResult& result, const pad::LoadedDataset& data,
                                 const padcli::RunConfig& cfg) {
  ordered_json j = provenance(cfg);
  j["captures"] = nlohmann::ordered_json::parse(pad::extraction_log_to_json(result.log));
  j["failures"] = result.failures;
  j["load_errors"] = entry_errors_json(data.errors);
  return j;
}

// Extraction over the loaded data. Load errors count as failures.
pad::ExtractionResult extract(const pad::LoadedDataset& data, pad::FeatureSet set, const padcli::RunConfig& cfg) {
  stage("extract");
  pad::ExtractionResult result = pad::extract_features(data.sequences, set, cfg.extraction(), cfg.jobs);
  result.table.config_hash = cfg.hash();
  for (const auto& e : result.log) {
    if (!e.ok) note("extraction failed for " + e.capture_id + ": " + e.error);
  }
  return result;
}

void check_quality(const pad::ExtractionResult& result, const pad::LoadedDataset& data) {
  const std::size_t attempted = result.log.size() + data.errors.size();
  const std::size_t failed = result.failures + data.errors.size();
  if (attempted == 0) return;
  const double rate = static_cast<double>(failed) / static_cast<double>(attempted);
  if (rate > pad::kMaxExtractionFailureRate) {
    throw pad::DataQualityError(std::to_string(failed) + " of " + std::to_string(attempted) +
                                " captures failed extraction (limit 10%)");
  }
}

pad::LabeledData labeled(const pad::FeatureTable& table) {
  pad::LabeledData d;
  d.features.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.names.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < table.names.size(); ++j) {
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table.rows[i].values[j];
    }
    d.labels.push_back(table.rows[i].cls == pad::PresentationClass::spoof ? 1 : 0);
  }
  return d;
}

std::vector<std::string> subjects(const pad::FeatureTable& table) {
  std::vector<std::string> s;
  for (const auto& r : table.rows) s.push_back(r.subject_id);
  return s;
}

std::string percent_key(double target) {
  std::string p = pad::format_double(target * 100.0);
  return "mean_apcer_at_" + p + "pct_bpcer";
}

ordered_json roc_json(const std::vector<pad::RocPoint>& roc) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : roc) {
    arr.push_back({std::isinf(p.threshold) ? ordered_json("inf") : ordered_json(p.threshold), p.bpcer, p.apcer});
  }
  return arr;
}

ordered_json cv_report_json(const pad::EvalReport& r, pad::FeatureSet set, std::size_t n_features,
                            std::size_t n_rows) {
  ordered_json j;
  j["feature_set"] = std::string(pad::to_string(set));
  j["features"] = n_features;
  j["rows"] = n_rows;
  for (std::size_t t = 0; t < r.bpcer_targets.size(); ++t) j[percent_key(r.bpcer_targets[t])] = r.mean_apcer[t];
  j["std_apcer_at_1pct_bpcer"] = r.std_apcer_at_1pct;
  j["mean_auc"] = r.mean_auc;
  j["pooled_auc"] = r.pooled_auc;
  ordered_json pooled = ordered_json::array();
  for (std::size_t t = 0; t < r.bpcer_targets.size(); ++t) {
    pooled.push_back({{"bpcer", r.bpcer_targets[t]}, {"apcer", r.pooled_apcer[t]}});
  }
  j["pooled_apcer"] = pooled;
  j["subject_grouped_folds"] = r.subject_grouped;
  j["warnings"] = r.warnings;
  ordered_json folds = ordered_json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"fold", f.fold},
                     {"test_size", f.test_size},
                     {"apcer", f.apcer},
                     {"auc", f.auc},
                     {"epochs", f.epochs_run},
                     {"final_learning_rate", f.final_learning_rate},
                     {"roc", roc_json(f.roc)}});
  }
  j["folds"] = folds;
  return j;
}

std::string roc_file(const std::vector<pad::RocPoint>& roc, const padcli::RunConfig& cfg) {
  return "# padpipe-roc config=" + cfg.hash_hex() + "\n" + pad::roc_to_csv(roc);
}

pad::FeatureTable read_features(const fs::path& path, pad::FeatureSet set) {
  stage("read features");
  const pad::FeatureTable table = pad::read_feature_csv(path);
  if (table.names == pad::FeatureLayout::of(set).names()) return table;
  return table.select(set);
}

pad::EvalReport cross_validate(const pad::FeatureTable& table, pad::FeatureSet set, const padcli::RunConfig& cfg) {
  stage(std::string("cross-validate ") + std::string(pad::to_string(set)));
  const auto t0 = std::chrono::steady_clock::now();
  pad::EvalReport report = pad::kfold_cv(labeled(table), subjects(table), cfg.cross_validation());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  note(std::string(pad::to_string(set)) + ": pooled AUC " + pad::format_double(report.pooled_auc) + " (" +
       std::to_string(static_cast<int>(secs)) + " s)");
  for (const auto& w : report.warnings) note("warning: " + w);
  return report;
}

// ---- subcommands ----

int cmd_clean(const padcli::RunConfig& cfg, const fs::path& manifest, const fs::path& out,
              const std::optional<fs::path>& report) {
  const pad::LoadedDataset data = load(manifest, cfg);
  stage("write");
  pad::write_manifest(out, relocate(data.kept, out.parent_path()));
  if (report) {
    ordered_json j = provenance(cfg);
    j["cleaning"] = cleaning_json(data);
    write_json(*report, j);
  }
  return kOk;
}

int cmd_extract(const padcli::RunConfig& cfg, const fs::path& manifest, const fs::path& out,
                std::optional<fs::path> log, const std::optional<fs::path>& debug_dir) {
  const pad::LoadedDataset data = load(manifest, cfg);
  const pad::ExtractionResult result = extract(data, cfg.set(), cfg);
  stage("write");
  pad::write_text_file(out, pad::to_csv(result.table));
  if (!log) log = fs::path(out.string() + ".log.json");
  write_json(*log, extraction_log_json(result, data, cfg));
  if (debug_dir) {
    stage("debug dump");
    dump_debug(*debug_dir, data.sequences, cfg);
  }
  check_quality(result, data);
  return kOk;
}

int cmd_train(const padcli::RunConfig& cfg, const fs::path& features, const fs::path& out,
              const std::optional<fs::path>& report, const std::optional<fs::path>& history) {
  const pad::FeatureSet set = cfg.set();
  const pad::FeatureTable table = read_features(features, set);
  if (report) {
    const pad::EvalReport cv = cross_validate(table, set, cfg);
    ordered_json j = provenance(cfg);
    j["evaluation"] = cv_report_json(cv, set, table.names.size(), table.rows.size());
    stage("write");
    write_json(*report, j);
  }
  stage("train");
  std::vector<pad::EpochRecord> epochs;
  pad::ModelBundle model = pad::fit_model(table.names, labeled(table), cfg.training(), cfg.hidden, &epochs);
  model.config_hash = cfg.hash();
  stage("write");
  pad::save_model(out, model);
  if (history) {
    ordered_json j = provenance(cfg);
    ordered_json arr = ordered_json::array();
    for (const auto& e : epochs) {
      arr.push_back({{"epoch", e.epoch},
                     {"learning_rate", e.learning_rate},
                     {"train_loss", e.train_loss},
                     {"val_loss", e.val_loss}});
    }
    j["epochs"] = arr;
    write_json(*history, j);
  }
  return kOk;
}

int cmd_eval(const padcli::RunConfig& cfg, const fs::path& model_path, const fs::path& features,
             const std::optional<fs::path>& roc_path, const std::optional<fs::path>& report,
             const std::optional<fs::path>& scores_path) {
  stage("load model");
  const pad::ModelBundle model = pad::load_model(model_path);
  stage("read features");
  const pad::FeatureTable table = pad::read_feature_csv(features);
  stage("predict");
  const pad::LabeledData data = labeled(table);
  const std::vector<double> scores = pad::predict(model, table.layout(), data.features);
  if (scores_path) {
    std::string csv = "# padpipe-scores config=" + cfg.hash_hex() + " model_config=" + pad::hex64(model.config_hash) +
                      "\ncapture_id,class,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
      csv += table.rows[i].capture_id + "," + std::string(pad::to_string(table.rows[i].cls)) + "," +
             pad::format_double(scores[i]) + "\n";
    }
    pad::write_text_file(*scores_path, csv);
  }
  stage("metrics");
  const auto roc = pad::roc_curve(scores, data.labels);
  ordered_json j = provenance(cfg);
  j["model_config_hash"] = pad::hex64(model.config_hash);
  j["rows"] = scores.size();
  j["auc"] = pad::roc_auc(roc);
  ordered_json ops = ordered_json::array();
  for (double t : cfg.bpcer) {
    const double a = pad::apcer_at_bpcer(roc, t);
    ops.push_back({{"bpcer", t}, {"apcer", a}});
    std::cout << "APCER @ " << pad::format_double(t * 100.0) << "% BPCER = " << pad::format_double(a) << "\n";
  }
  j["apcer"] = ops;
  stage("write");
  if (roc_path) pad::write_text_file(*roc_path, roc_file(roc, cfg));
  if (report) write_json(*report, j);
  return kOk;
}

struct SynthArgs {
  std::string preset = "live";
  std::size_t n = 200;
  std::string id_prefix;
  std::size_t subject_pool = 0;
  int width = 128;
  int height = 128;
  std::vector<std::size_t> blank_frames;
  std::size_t truncate_to = 0;
  std::string material = "synthetic";
  std::string mold = "3d";
  std::optional<double> blood_shift, perspiration, shift_px, contact_growth, noise_sigma;
};

pad::PhenomenaParams synth_params(const SynthArgs& a) {
  pad::PhenomenaParams p = pad::preset_params(pad::parse_preset(a.preset));
  if (a.blood_shift) p.blood_shift = *a.blood_shift;
  if (a.perspiration) p.perspiration = *a.perspiration;
  if (a.shift_px) p.shift_px = *a.shift_px;
  if (a.contact_growth) p.contact_growth = *a.contact_growth;
  if (a.noise_sigma) p.noise_sigma = *a.noise_sigma;
  p.validate();
  return p;
}

pad::GroundTruth synth_label(const SynthArgs& a) {
  if (a.preset == "spoof") return pad::GroundTruth::spoof(pad::parse_mold(a.mold), a.material);
  return pad::GroundTruth::live();
}

// Writes frames under `dir` and returns manifest entries relative to it.
std::vector<pad::ManifestEntry> write_synth(const fs::path& dir, const pad::PhenomenaParams& params,
                                            const pad::GroundTruth& label, std::uint64_t seed, std::size_t n,
                                            const pad::SynthOptions& opts, const std::string& prefix,
                                            std::size_t pool, unsigned jobs) {
  std::vector<pad::ManifestEntry> entries(n);
  pad::parallel_for(n, jobs, [&](std::size_t i) {
    pad::CaptureSequence seq = pad::generate_one(params, label, pad::derive_seed(seed, i), opts);
    seq.capture_id = prefix + std::to_string(i);
    seq.subject_id = "subj" + std::to_string(pool > 0 ? i % pool : i);
    entries[i] = pad::save_sequence(dir, seq);
  });
  return entries;
}

int cmd_synth(const padcli::RunConfig& cfg, const SynthArgs& a, const fs::path& out_dir,
              const std::optional<fs::path>& manifest_path) {
  stage("synth");
  const pad::PhenomenaParams params = synth_params(a);
  pad::SynthOptions opts;
  opts.width = a.width;
  opts.height = a.height;
  opts.faults.blank_frames = a.blank_frames;
  opts.faults.truncate_to = a.truncate_to;
  pad::Manifest m;
  const std::string prefix = a.id_prefix.empty() ? a.preset + "_" : a.id_prefix;
  m.entries = write_synth(out_dir, params, synth_label(a), cfg.seed, a.n, opts, prefix, a.subject_pool, cfg.jobs);
  const fs::path mp = manifest_path ? *manifest_path : out_dir / "manifest.json";
  for (auto& e : m.entries) {
    for (auto& f : e.frames) f = (out_dir / f).string();
  }
  pad::write_manifest(mp, relocate(m, mp.parent_path()));
  note("wrote " + std::to_string(a.n) + " " + a.preset + " captures to " + out_dir.string());
  return kOk;
}

struct RunArgs {
  std::optional<fs::path> manifest;
  std::size_t synth_live = 200;
  std::size_t synth_spoof = 200;
  std::size_t subject_pool = 0;
};

int cmd_run(const padcli::RunConfig& cfg, const RunArgs& a, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  fs::path manifest;
  if (a.manifest) {
    manifest = *a.manifest;
  } else {
    stage("synth");
    const fs::path corpus = out_dir / "corpus";
    pad::Manifest m;
    const std::uint64_t synth_seed = pad::derive_seed(cfg.seed, 0x73796e);
    auto live = write_synth(corpus, pad::preset_params(pad::SynthPreset::live), pad::GroundTruth::live(),
                            pad::derive_seed(synth_seed, 0), a.synth_live, {}, "live_", a.subject_pool, cfg.jobs);
    auto spoof = write_synth(corpus, pad::preset_params(pad::SynthPreset::spoof),
                             pad::GroundTruth::spoof(pad::MoldType::three_d, "synthetic"),
                             pad::derive_seed(synth_seed, 1), a.synth_spoof, {}, "spoof_", a.subject_pool, cfg.jobs);
    m.entries = std::move(live);
    m.entries.insert(m.entries.end(), spoof.begin(), spoof.end());
    manifest = corpus / "manifest.json";
    pad::write_manifest(manifest, m);
  }

  const pad::LoadedDataset data = load(manifest, cfg);
  const pad::ExtractionResult result = extract(data, pad::FeatureSet::fused, cfg);
  stage("write");
  pad::write_text_file(out_dir / "features_fused.csv", pad::to_csv(result.table));
  write_json(out_dir / "extraction_log.json", extraction_log_json(result, data, cfg));
  check_quality(result, data);

  ordered_json report = provenance(cfg);
  report["seeds"] = {{"master", cfg.seed},
                     {"folds", cfg.cross_validation().seed},
                     {"training", cfg.training().seed},
                     {"synth", a.manifest ? ordered_json(nullptr) : ordered_json(pad::derive_seed(cfg.seed, 0x73796e))}};
  report["cleaning"] = cleaning_json(data);
  report["extraction_failures"] = result.failures;
  ordered_json sets;
  for (pad::FeatureSet set : {pad::FeatureSet::static_only, pad::FeatureSet::dynamic_only, pad::FeatureSet::fused}) {
    const pad::FeatureTable table = result.table.select(set);
    const pad::EvalReport cv = cross_validate(table, set, cfg);
    stage("write");
    pad::write_text_file(out_dir / ("roc_" + std::string(pad::to_string(set)) + ".csv"),
                         roc_file(cv.pooled_roc, cfg));
    sets[std::string(pad::to_string(set))] = cv_report_json(cv, set, table.names.size(), table.rows.size());
  }
  report["evaluations"] = sets;
  write_json(out_dir / "report.json", report);
  return kOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const pad::ConfigError*>(&e)) return kConfig;
  if (dynamic_cast<const pad::DataQualityError*>(&e)) return kDataQuality;
  if (dynamic_cast<const pad::TrainingDiverged*>(&e)) return kDiverged;
  return kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fingerprint presentation-attack detection pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML file of option values; command-line flags win");
  padcli::RunConfig cfg;
  cfg.add_options(app);

  fs::path manifest, out, features, model, out_dir;
  std::optional<fs::path> report, log, debug_dir, history, roc, scores, manifest_out;

  auto* clean = app.add_subcommand("clean", "Drop captures without seven consecutive non-blank frames");
  clean->add_option("--manifest", manifest, "Input manifest (JSON or CSV)")->required();
  clean->add_option("--out", out, "Manifest of kept captures")->required();
  clean->add_option("--report", report, "Cleaning report JSON");

  auto* extract_cmd = app.add_subcommand("extract", "Compute the feature CSV for a manifest");
  extract_cmd->add_option("--manifest", manifest, "Input manifest (JSON or CSV)")->required();
  extract_cmd->add_option("--out", out, "Feature CSV")->required();
  extract_cmd->add_option("--log", log, "Extraction log JSON (default <out>.log.json)");
  extract_cmd->add_option("--debug-dir", debug_dir, "Write masks and ridge signals here");

  auto* train_cmd = app.add_subcommand("train", "Train a model; optionally cross-validate first");
  train_cmd->add_option("--features", features, "Feature CSV")->required();
  train_cmd->add_option("--out", out, "Model file")->required();
  train_cmd->add_option("--report", report, "Run k-fold cross-validation and write its report here");
  train_cmd->add_option("--history", history, "Per-epoch loss and learning-rate trace JSON");

  auto* eval_cmd = app.add_subcommand("eval", "Score a feature CSV with a trained model");
  eval_cmd->add_option("--model", model, "Model file")->required();
  eval_cmd->add_option("--features", features, "Feature CSV")->required();
  eval_cmd->add_option("--roc", roc, "ROC CSV");
  eval_cmd->add_option("--report", report, "Metrics JSON");
  eval_cmd->add_option("--scores", scores, "Per-capture spoof scores CSV");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic capture corpus");
  synth_cmd->add_option("--preset", synth_args.preset, "live, spoof or null")
      ->check(CLI::IsMember({"live", "spoof", "null"}))
      ->capture_default_str();
  synth_cmd->add_option("--n", synth_args.n, "Number of captures")->capture_default_str();
  synth_cmd->add_option("--out", out_dir, "Frame directory")->required();
  synth_cmd->add_option("--manifest", manifest_out, "Manifest path (default <out>/manifest.json)");
  synth_cmd->add_option("--id-prefix", synth_args.id_prefix, "Capture id prefix (default <preset>_)");
  synth_cmd->add_option("--subject-pool", synth_args.subject_pool, "Cycle subject ids through this many (0 = one each)");
  synth_cmd->add_option("--width", synth_args.width, "Frame width")->capture_default_str();
  synth_cmd->add_option("--height", synth_args.height, "Frame height")->capture_default_str();
  synth_cmd->add_option("--blank-frames", synth_args.blank_frames, "Frame indices to blank")->delimiter(',');
  synth_cmd->add_option("--truncate", synth_args.truncate_to, "Keep only the first N frames");
  synth_cmd->add_option("--material", synth_args.material, "Spoof material label")->capture_default_str();
  synth_cmd->add_option("--mold", synth_args.mold, "Spoof mold type: 3d or dental")->capture_default_str();
  synth_cmd->add_option("--blood-shift", synth_args.blood_shift, "Override the final G/B gain");
  synth_cmd->add_option("--perspiration", synth_args.perspiration, "Override the perspiration rate");
  synth_cmd->add_option("--shift-px", synth_args.shift_px, "Override the per-frame shift");
  synth_cmd->add_option("--contact-growth", synth_args.contact_growth, "Override the contact growth");
  synth_cmd->add_option("--noise-sigma", synth_args.noise_sigma, "Override the sensor noise");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Synth or load, clean, extract, cross-validate all three feature sets");
  run_cmd->add_option("--manifest", run_args.manifest, "Use this manifest instead of a synthetic corpus");
  run_cmd->add_option("--synth-live", run_args.synth_live, "Synthetic live captures")->capture_default_str();
  run_cmd->add_option("--synth-spoof", run_args.synth_spoof, "Synthetic spoof captures")->capture_default_str();
  run_cmd->add_option("--subject-pool", run_args.subject_pool, "Synthetic subjects per class (0 = one each)");
  run_cmd->add_option("--out-dir", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    stage("config");
    cfg.validate();
    if (*clean) return cmd_clean(cfg, manifest, out, report);
    if (*extract_cmd) return cmd_extract(cfg, manifest, out, log, debug_dir);
    if (*train_cmd) return cmd_train(cfg, features, out, report, history);
    if (*eval_cmd) return cmd_eval(cfg, model, features, roc, report, scores);
    if (*synth_cmd) return cmd_synth(cfg, synth_args, out_dir, manifest_out);
    if (*run_cmd) return cmd_run(cfg, run_args, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "padpipe: " << g_stage << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kFailure;
}
