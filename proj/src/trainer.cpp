#include "padpipe/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "padpipe/errors.hpp"
#include "padpipe/rng.hpp"

namespace pad {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(reduce_factor > 0.0 && reduce_factor < 1.0)) throw ConfigError("reduce factor must lie in (0, 1)");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation fraction must lie in [0, 1)");
  }
}

PlateauScheduler::PlateauScheduler(double lr, int patience, double factor, double min_delta)
    : lr_(lr), patience_(patience), factor_(factor), min_delta_(min_delta),
      best_(std::numeric_limits<double>::infinity()) {}

bool PlateauScheduler::observe(double loss) {
  if (loss < best_ - min_delta_) {
    best_ = loss;
    wait_ = 0;
    return false;
  }
  if (++wait_ >= patience_) {
    lr_ *= factor_;
    wait_ = 0;
    return true;
  }
  return false;
}

LabeledData LabeledData::subset(std::span<const std::size_t> rows) const {
  LabeledData out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> validation_split(std::span<const int> labels,
                                                                               double fraction,
                                                                               std::uint64_t seed) {
  std::vector<std::size_t> train_rows, val_rows;
  Rng rng(seed);
  for (int cls : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    rng.shuffle(idx.begin(), idx.end());
    auto take = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(idx.size())));
    if (take >= idx.size()) take = idx.size() > 1 ? idx.size() - 1 : 0;
    val_rows.insert(val_rows.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
    train_rows.insert(train_rows.end(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(val_rows.begin(), val_rows.end());
  return {train_rows, val_rows};
}

TrainResult train(const NetworkSpec& spec, const TrainConfig& cfg, const LabeledData& train_set,
                  const LabeledData& val) {
  cfg.validate();
  if (train_set.size() == 0) throw std::invalid_argument("train: empty training set");
  if (train_set.features.cols() != spec.input_dim()) throw std::invalid_argument("train: feature width mismatch");

  Rng init_rng(derive_seed(cfg.seed, 0));
  Rng order_rng(derive_seed(cfg.seed, 1));
  TrainResult result{Network::xavier(spec, init_rng), {}};
  Network& net = result.network;
  Adam adam(spec, cfg.adam);
  PlateauScheduler scheduler(cfg.learning_rate, cfg.patience, cfg.reduce_factor, cfg.min_delta);

  const Eigen::MatrixXd xt = train_set.features.transpose();
  const Eigen::MatrixXd val_xt = val.features.transpose();
  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  NetworkParams grad = NetworkParams::zeros_like(spec);
  Eigen::MatrixXd batch_x;
  std::vector<int> batch_y;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = scheduler.learning_rate();
    order_rng.shuffle(order.begin(), order.end());
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      batch_x.resize(xt.rows(), static_cast<Eigen::Index>(end - start));
      batch_y.resize(end - start);
      for (std::size_t i = start; i < end; ++i) {
        batch_x.col(static_cast<Eigen::Index>(i - start)) = xt.col(static_cast<Eigen::Index>(order[i]));
        batch_y[i - start] = train_set.labels[order[i]];
      }
      const double loss = net.loss(batch_x, batch_y, &grad);
      if (!std::isfinite(loss)) {
        throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                               std::to_string(batch_index) + " (rows " + std::to_string(start) + ".." +
                               std::to_string(end - 1) + " of the shuffled order)");
      }
      adam.step(net.params(), grad, lr);
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.learning_rate = lr;
    rec.train_loss = net.loss(xt, train_set.labels);
    rec.val_loss = val.size() ? net.loss(val_xt, val.labels) : rec.train_loss;
    if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.val_loss)) {
      throw TrainingDiverged("non-finite epoch loss at epoch " + std::to_string(epoch + 1));
    }
    scheduler.observe(rec.val_loss);
    result.history.push_back(rec);
  }
  return result;
}

}  // namespace pad
