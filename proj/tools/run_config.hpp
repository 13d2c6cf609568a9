#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "padpipe/cross_validation.hpp"
#include "padpipe/extractor.hpp"
#include "padpipe/feature_layout.hpp"
#include "padpipe/synth.hpp"

namespace padcli {

// Every tunable the pipeline reads. Paths and worker count are not part of
// it: they cannot change results.
struct RunConfig {
  std::uint64_t seed = 7;
  unsigned jobs = 1;

  double blank_sigma = pad::kDefaultBlankSigma;
  int fg_block = 16;
  double fg_var_threshold = 100.0;
  int ridge_block = 16;
  std::size_t ridge_min_length = 16;
  std::string ridge_polarity = "dark";
  int max_lag = pad::kDefaultMaxLag;
  std::size_t top_ridges = pad::kDefaultTopRidges;
  double ratio_epsilon = pad::kRatioEpsilon;
  double dry_threshold = 0.1 * 255.0;
  double wet_threshold = 0.9 * 255.0;

  std::string feature_set = "fused";
  int folds = 10;
  std::vector<double> bpcer = pad::kDefaultBpcerTargets;
  std::vector<int> hidden = {400, 400};
  double learning_rate = 0.001;
  int patience = 10;
  double reduce_factor = 0.1;
  double min_delta = 1e-6;
  int epochs = 50;
  int batch_size = 128;
  double validation_fraction = 0.1;

  // Registers the shared options on the top-level app.
  void add_options(CLI::App& app);

  // Throws pad::ConfigError on out-of-range values.
  void validate() const;

  pad::ExtractionConfig extraction() const;
  pad::TrainConfig training() const;
  pad::CvConfig cross_validation() const;
  pad::FeatureSet set() const { return pad::parse_feature_set(feature_set); }

  nlohmann::ordered_json to_json() const;
  std::uint64_t hash() const;
  std::string hash_hex() const { return pad::hex64(hash()); }
};

}  // namespace padcli
