#include "padpipe/cross_validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#include "padpipe/errors.hpp"
#include "padpipe/normalizer.hpp"
#include "padpipe/parallel.hpp"
#include "padpipe/rng.hpp"

namespace pad {

std::vector<std::size_t> FoldAssignment::test_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i) {
    if (fold_of_row[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldAssignment::train_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i) {
    if (fold_of_row[i] != fold) rows.push_back(i);
  }
  return rows;
}

namespace {

FoldAssignment stratified_only(std::span<const int> labels, int k, Rng& rng) {
  FoldAssignment a;
  a.k = k;
  a.subject_grouped = false;
  a.fold_of_row.assign(labels.size(), -1);
  int offset = 0;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    rng.shuffle(idx.begin(), idx.end());
    for (std::size_t j = 0; j < idx.size(); ++j) {
      a.fold_of_row[idx[j]] = static_cast<int>((j + static_cast<std::size_t>(offset)) % static_cast<std::size_t>(k));
    }
    offset += static_cast<int>(idx.size() % static_cast<std::size_t>(k));
  }
  return a;
}

}  // namespace

FoldAssignment assign_folds(std::span<const int> labels, std::span<const std::string> subjects, int k,
                            std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("assign_folds: k must be >= 2");
  if (subjects.size() != labels.size()) throw std::invalid_argument("assign_folds: subjects and labels differ");
  std::array<std::size_t, 2> class_total{0, 0};
  for (int l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("assign_folds: labels must be 0 or 1");
    ++class_total[static_cast<std::size_t>(l)];
  }
  for (std::size_t c = 0; c < 2; ++c) {
    if (class_total[c] < static_cast<std::size_t>(k)) {
      throw std::invalid_argument("assign_folds: class " + std::to_string(c) + " has fewer than k rows");
    }
  }

  Rng rng(seed);
  struct Group {
    std::vector<std::size_t> rows;
    std::array<std::size_t, 2> count{0, 0};
  };
  std::vector<Group> groups;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, fresh] = index.try_emplace(subjects[i], groups.size());
    if (fresh) groups.emplace_back();
    auto& g = groups[it->second];
    g.rows.push_back(i);
    ++g.count[static_cast<std::size_t>(labels[i])];
  }

  if (groups.size() >= static_cast<std::size_t>(k)) {
    rng.shuffle(groups.begin(), groups.end());
    std::stable_sort(groups.begin(), groups.end(),
                     [](const Group& a, const Group& b) { return a.rows.size() > b.rows.size(); });
    std::vector<std::array<std::size_t, 2>> fold_count(static_cast<std::size_t>(k), {0, 0});
    FoldAssignment a;
    a.k = k;
    a.fold_of_row.assign(labels.size(), -1);
    const double target0 = static_cast<double>(class_total[0]) / k;
    const double target1 = static_cast<double>(class_total[1]) / k;
    for (const auto& g : groups) {
      int best = 0;
      double best_cost = 0.0;
      for (int f = 0; f < k; ++f) {
        const auto& fc = fold_count[static_cast<std::size_t>(f)];
        const double r0 = static_cast<double>(fc[0] + g.count[0]) / target0;
        const double r1 = static_cast<double>(fc[1] + g.count[1]) / target1;
        const double cost = r0 * r0 + r1 * r1;
        if (f == 0 || cost < best_cost) {
          best = f;
          best_cost = cost;
        }
      }
      fold_count[static_cast<std::size_t>(best)][0] += g.count[0];
      fold_count[static_cast<std::size_t>(best)][1] += g.count[1];
      for (std::size_t r : g.rows) a.fold_of_row[r] = best;
    }
    const bool feasible = std::all_of(fold_count.begin(), fold_count.end(),
                                      [](const auto& fc) { return fc[0] > 0 && fc[1] > 0; });
    if (feasible) return a;
  }

  FoldAssignment a = stratified_only(labels, k, rng);
  a.warnings.push_back("subject grouping could not give every fold both classes; folds are stratified only");
  return a;
}

EvalReport kfold_cv(const LabeledData& data, std::span<const std::string> subjects, const CvConfig& cfg) {
  cfg.train.validate();
  if (cfg.bpcer_targets.empty()) throw ConfigError("at least one BPCER target is required");
  const FoldAssignment folds = assign_folds(data.labels, subjects, cfg.k, cfg.seed);

  NetworkSpec spec;
  spec.layer_sizes.push_back(static_cast<int>(data.features.cols()));
  spec.layer_sizes.insert(spec.layer_sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  spec.layer_sizes.push_back(2);

  EvalReport report;
  report.bpcer_targets = cfg.bpcer_targets;
  report.subject_grouped = folds.subject_grouped;
  report.warnings = folds.warnings;
  report.folds.resize(static_cast<std::size_t>(cfg.k));
  std::vector<double> pooled_scores(data.size(), 0.0);

  parallel_for(static_cast<std::size_t>(cfg.k), cfg.workers, [&](std::size_t f) {
    const int fold = static_cast<int>(f);
    const auto train_rows = folds.train_rows(fold);
    const auto test_rows = folds.test_rows(fold);
    LabeledData train_raw = data.subset(train_rows);
    LabeledData test_raw = data.subset(test_rows);

    const NormalizationStats stats = fit_normalizer(train_raw.features);
    train_raw.features = apply_normalizer(stats, train_raw.features);
    const Eigen::MatrixXd test_x = apply_normalizer(stats, test_raw.features);

    const auto [fit_rows, val_rows] =
        validation_split(train_raw.labels, cfg.train.validation_fraction, derive_seed(cfg.seed, 1000 + f));
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.seed, f);
    const TrainResult trained = train(spec, tc, train_raw.subset(fit_rows), train_raw.subset(val_rows));

    const Eigen::MatrixXd probs = trained.network.forward(test_x.transpose());
    std::vector<double> scores(test_rows.size());
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      scores[i] = probs(1, static_cast<Eigen::Index>(i));
      pooled_scores[test_rows[i]] = scores[i];
    }

    FoldResult& r = report.folds[f];
    r.fold = fold;
    r.test_size = test_rows.size();
    r.roc = roc_curve(scores, test_raw.labels);
    for (double t : cfg.bpcer_targets) r.apcer.push_back(apcer_at_bpcer(r.roc, t));
    r.auc = roc_auc(r.roc);
    r.epochs_run = static_cast<int>(trained.history.size());
    r.final_learning_rate = trained.history.empty() ? tc.learning_rate : trained.history.back().learning_rate;
  });

  const auto n_targets = cfg.bpcer_targets.size();
  std::size_t one_pct = n_targets - 1;
  for (std::size_t t = 0; t < n_targets; ++t) {
    if (std::abs(cfg.bpcer_targets[t] - 0.01) < 1e-12) one_pct = t;
  }
  report.mean_apcer.assign(n_targets, 0.0);
  for (const auto& r : report.folds) {
    for (std::size_t t = 0; t < n_targets; ++t) report.mean_apcer[t] += r.apcer[t] / cfg.k;
    report.mean_auc += r.auc / cfg.k;
  }
  double var = 0.0;
  for (const auto& r : report.folds) {
    const double d = r.apcer[one_pct] - report.mean_apcer[one_pct];
    var += d * d / cfg.k;
  }
  report.std_apcer_at_1pct = std::sqrt(var);

  report.pooled_roc = roc_curve(pooled_scores, data.labels);
  report.pooled_auc = roc_auc(report.pooled_roc);
  for (double t : cfg.bpcer_targets) report.pooled_apcer.push_back(apcer_at_bpcer(report.pooled_roc, t));
  return report;
}

}  // namespace pad
