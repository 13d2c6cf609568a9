#include "run_config.hpp"

#include "padpipe/errors.hpp"

namespace padcli {

void RunConfig::add_options(CLI::App& app) {
  app.add_option("--seed", seed, "Master seed for every random stream")->capture_default_str();
  app.add_option("--jobs", jobs, "Worker threads (results do not depend on it)")->capture_default_str();

  app.add_option("--blank-sigma", blank_sigma, "Middle-row std below which a frame is blank")->capture_default_str();
  app.add_option("--fg-block", fg_block, "Foreground block size (px)")->capture_default_str();
  app.add_option("--fg-var-threshold", fg_var_threshold, "Foreground block variance threshold")
      ->capture_default_str();
  app.add_option("--ridge-block", ridge_block, "Ridge orientation block size (px)")->capture_default_str();
  app.add_option("--ridge-min-length", ridge_min_length, "Shortest traced ridge kept (px)")->capture_default_str();
  app.add_option("--ridge-polarity", ridge_polarity, "Whether ridges are the dark or bright phase")
      ->check(CLI::IsMember({"dark", "bright"}))
      ->capture_default_str();
  app.add_option("--max-lag", max_lag, "Largest ridge-signal realignment lag")->capture_default_str();
  app.add_option("--top-ridges", top_ridges, "Longest ridges concatenated into the ridge signal")
      ->capture_default_str();
  app.add_option("--ratio-epsilon", ratio_epsilon, "Color ratio denominator offset")->capture_default_str();
  app.add_option("--dry-threshold", dry_threshold, "Gray level below which a ridge sample counts as dry")
      ->capture_default_str();
  app.add_option("--wet-threshold", wet_threshold, "Gray level above which a ridge sample counts as wet")
      ->capture_default_str();

  app.add_option("--set", feature_set, "Feature set: static, dynamic or fused")
      ->check(CLI::IsMember({"static", "dynamic", "fused"}))
      ->capture_default_str();
  app.add_option("--k", folds, "Cross-validation folds")->capture_default_str();
  app.add_option("--bpcer", bpcer, "BPCER operating points")->delimiter(',')->capture_default_str();
  app.add_option("--hidden", hidden, "Hidden layer widths")->delimiter(',')->capture_default_str();
  app.add_option("--learning-rate", learning_rate, "Initial Adam learning rate")->capture_default_str();
  app.add_option("--patience", patience, "Plateau epochs before the rate drops")->capture_default_str();
  app.add_option("--reduce-factor", reduce_factor, "Learning-rate multiplier on plateau")->capture_default_str();
  app.add_option("--min-delta", min_delta, "Smallest validation-loss drop that counts as improvement")
      ->capture_default_str();
  app.add_option("--epochs", epochs, "Training epochs")->capture_default_str();
  app.add_option("--batch-size", batch_size, "Mini-batch size")->capture_default_str();
  app.add_option("--validation-fraction", validation_fraction, "Share of each training fold held out")
      ->capture_default_str();
}

void RunConfig::validate() const {
  if (jobs < 1) throw pad::ConfigError("--jobs must be >= 1");
  if (!(blank_sigma >= 0.0)) throw pad::ConfigError("--blank-sigma must be >= 0");
  if (fg_block < 2 || ridge_block < 4) throw pad::ConfigError("block sizes are too small");
  if (!(fg_var_threshold >= 0.0)) throw pad::ConfigError("--fg-var-threshold must be >= 0");
  if (max_lag < 0) throw pad::ConfigError("--max-lag must be >= 0");
  if (top_ridges < 1) throw pad::ConfigError("--top-ridges must be >= 1");
  if (!(ratio_epsilon > 0.0)) throw pad::ConfigError("--ratio-epsilon must be positive");
  if (!(dry_threshold < wet_threshold)) throw pad::ConfigError("--dry-threshold must be below --wet-threshold");
  if (folds < 2) throw pad::ConfigError("--k must be >= 2");
  if (bpcer.empty()) throw pad::ConfigError("--bpcer needs at least one value");
  for (double b : bpcer) {
    if (!(b >= 0.0 && b <= 1.0)) throw pad::ConfigError("--bpcer values must lie in [0, 1]");
  }
  for (int h : hidden) {
    if (h < 1) throw pad::ConfigError("--hidden widths must be positive");
  }
  (void)set();
  training().validate();
}

pad::ExtractionConfig RunConfig::extraction() const {
  pad::ExtractionConfig c;
  c.sigma_threshold = blank_sigma;
  c.foreground.block = fg_block;
  c.foreground.var_threshold = fg_var_threshold;
  c.ridges.block = ridge_block;
  c.ridges.min_length = ridge_min_length;
  c.ridges.polarity = ridge_polarity == "bright" ? pad::RidgePolarity::bright : pad::RidgePolarity::dark;
  c.max_lag = max_lag;
  c.top_ridges = top_ridges;
  c.perspiration.dry_threshold = dry_threshold;
  c.perspiration.wet_threshold = wet_threshold;
  c.color.epsilon = ratio_epsilon;
  return c;
}

pad::TrainConfig RunConfig::training() const {
  pad::TrainConfig t;
  t.learning_rate = learning_rate;
  t.patience = patience;
  t.reduce_factor = reduce_factor;
  t.min_delta = min_delta;
  t.epochs = epochs;
  t.batch_size = batch_size;
  t.validation_fraction = validation_fraction;
  t.seed = pad::derive_seed(seed, 0x7261696e);
  return t;
}

pad::CvConfig RunConfig::cross_validation() const {
  pad::CvConfig c;
  c.k = folds;
  c.seed = pad::derive_seed(seed, 0x666f6c64);
  c.bpcer_targets = bpcer;
  c.train = training();
  c.hidden = hidden;
  c.workers = jobs;
  return c;
}

nlohmann::ordered_json RunConfig::to_json() const {
  return {{"seed", seed},
          {"blank_sigma", blank_sigma},
          {"fg_block", fg_block},
          {"fg_var_threshold", fg_var_threshold},
          {"ridge_block", ridge_block},
          {"ridge_min_length", ridge_min_length},
          {"ridge_polarity", ridge_polarity},
          {"max_lag", max_lag},
          {"top_ridges", top_ridges},
          {"ratio_epsilon", ratio_epsilon},
          {"dry_threshold", dry_threshold},
          {"wet_threshold", wet_threshold},
          {"set", feature_set},
          {"k", folds},
          {"bpcer", bpcer},
          {"hidden", hidden},
          {"learning_rate", learning_rate},
          {"patience", patience},
          {"reduce_factor", reduce_factor},
          {"min_delta", min_delta},
          {"epochs", epochs},
          {"batch_size", batch_size},
          {"validation_fraction", validation_fraction}};
}

std::uint64_t RunConfig::hash() const {
  const std::string text = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace padcli
