#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "padpipe/metrics.hpp"
#include "padpipe/trainer.hpp"

namespace pad {

struct FoldAssignment {
  std::vector<int> fold_of_row;
  int k = 0;
  bool subject_grouped = true;
  std::vector<std::string> warnings;

  std::vector<std::size_t> test_rows(int fold) const;
  std::vector<std::size_t> train_rows(int fold) const;
};

// Stratified by class and grouped by subject. Falls back to stratified-only
// (with a warning) when grouping cannot give every fold both classes.
// Throws std::invalid_argument when a class has fewer than k rows.
FoldAssignment assign_folds(std::span<const int> labels, std::span<const std::string> subjects, int k,
                            std::uint64_t seed);

inline const std::vector<double> kDefaultBpcerTargets{0.002, 0.01};

struct FoldResult {
  int fold = 0;
  std::size_t test_size = 0;
  std::vector<RocPoint> roc;
  std::vector<double> apcer;  // one per target
  double auc = 0.0;
  int epochs_run = 0;
  double final_learning_rate = 0.0;
};

struct EvalReport {
  std::vector<double> bpcer_targets;
  std::vector<FoldResult> folds;
  std::vector<double> mean_apcer;
  // Population std over folds at the 1% target (or the last target).
  double std_apcer_at_1pct = 0.0;
  double mean_auc = 0.0;
  std::vector<RocPoint> pooled_roc;
  double pooled_auc = 0.0;
  std::vector<double> pooled_apcer;
  bool subject_grouped = true;
  std::vector<std::string> warnings;
};

struct CvConfig {
  int k = 10;
  std::uint64_t seed = 7;
  std::vector<double> bpcer_targets = kDefaultBpcerTargets;
  TrainConfig train;
  std::vector<int> hidden = {400, 400};
  unsigned workers = 1;
};

// Per fold: fit the normaliser on the training rows, train with a held-out
// validation slice, score the test rows.
EvalReport kfold_cv(const LabeledData& data, std::span<const std::string> subjects, const CvConfig& cfg);

}  // namespace pad
