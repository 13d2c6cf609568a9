#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "padpipe/network.hpp"

namespace pad {

struct TrainConfig {
  AdamConfig adam;
  double learning_rate = 0.001;
  int patience = 10;
  double reduce_factor = 0.1;
  double min_delta = 1e-6;
  int epochs = 50;
  int batch_size = 128;
  double validation_fraction = 0.1;
  std::uint64_t seed = 7;

  // Throws ConfigError when out of range.
  void validate() const;
};

// Reduce-on-plateau: the rate is multiplied by `factor` once the monitored
// loss has failed to beat its best by more than `min_delta` for `patience`
// consecutive epochs; the counter then restarts.
class PlateauScheduler {
 public:
  PlateauScheduler(double lr, int patience, double factor, double min_delta);

  // Feeds one epoch's monitored loss; returns true when the rate dropped.
  bool observe(double loss);
  double learning_rate() const { return lr_; }

 private:
  double lr_;
  int patience_;
  double factor_;
  double min_delta_;
  double best_;
  int wait_ = 0;
};

struct LabeledData {
  // One sample per row.
  Eigen::MatrixXd features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  LabeledData subset(std::span<const std::size_t> rows) const;
};

struct EpochRecord {
  int epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  Network network;
  std::vector<EpochRecord> history;
};

// Mini-batch Adam on cross-entropy. Inputs must already be normalised.
// When `val` is empty the plateau monitor watches the training loss.
// Throws TrainingDiverged on a non-finite batch loss.
TrainResult train(const NetworkSpec& spec, const TrainConfig& cfg, const LabeledData& train_set,
                  const LabeledData& val);

// Stratified hold-out of `fraction` of each class, chosen with `seed`.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> validation_split(std::span<const int> labels,
                                                                               double fraction,
                                                                               std::uint64_t seed);

}  // namespace pad
