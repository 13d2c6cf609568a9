#include "padpipe/network.hpp"

#include <cmath>
#include <stdexcept>

namespace pad {

NetworkParams NetworkParams::zeros_like(const NetworkSpec& spec) {
  NetworkParams p;
  for (std::size_t l = 0; l < spec.layers(); ++l) {
    p.weights.push_back(Eigen::MatrixXd::Zero(spec.layer_sizes[l + 1], spec.layer_sizes[l]));
    p.biases.push_back(Eigen::VectorXd::Zero(spec.layer_sizes[l + 1]));
  }
  return p;
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) {
  if (spec_.layer_sizes.size() < 2) throw std::invalid_argument("network needs at least two layer sizes");
  for (int s : spec_.layer_sizes) {
    if (s < 1) throw std::invalid_argument("layer sizes must be positive");
  }
  params_ = NetworkParams::zeros_like(spec_);
}

Network Network::xavier(NetworkSpec spec, Rng& rng) {
  Network net(std::move(spec));
  for (auto& w : net.params_.weights) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
    }
  }
  return net;
}

namespace {

// Column-wise softmax of logits.
Eigen::MatrixXd softmax(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd p = z.rowwise() - z.colwise().maxCoeff();
  p = p.array().exp();
  return p.array().rowwise() / p.colwise().sum().array();
}

}  // namespace

Eigen::MatrixXd Network::forward(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != spec_.input_dim()) throw std::invalid_argument("network input dimension mismatch");
  Eigen::MatrixXd a = inputs;
  const std::size_t last = spec_.layers() - 1;
  for (std::size_t l = 0; l < spec_.layers(); ++l) {
    Eigen::MatrixXd z = params_.weights[l] * a;
    z.colwise() += params_.biases[l];
    if (l == last) return softmax(z);
    a = z.cwiseMax(0.0);
  }
  return a;
}

double Network::loss(const Eigen::MatrixXd& inputs, std::span<const int> labels, NetworkParams* grad) const {
  if (inputs.rows() != spec_.input_dim()) throw std::invalid_argument("network input dimension mismatch");
  if (static_cast<std::size_t>(inputs.cols()) != labels.size()) throw std::invalid_argument("label count mismatch");
  const std::size_t layers = spec_.layers();
  const auto batch = static_cast<double>(inputs.cols());

  std::vector<Eigen::MatrixXd> acts;  // inputs to each layer
  std::vector<Eigen::MatrixXd> pre;   // pre-activations of hidden layers
  acts.reserve(layers);
  acts.push_back(inputs);
  Eigen::MatrixXd logits;
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = params_.weights[l] * acts.back();
    z.colwise() += params_.biases[l];
    if (l + 1 == layers) {
      logits = std::move(z);
    } else {
      acts.push_back(z.cwiseMax(0.0));
      pre.push_back(std::move(z));
    }
  }

  const Eigen::RowVectorXd maxes = logits.colwise().maxCoeff();
  double total = 0.0;
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double lse = maxes(c) + std::log((logits.col(c).array() - maxes(c)).exp().sum());
    total += lse - logits(labels[c], c);
  }
  const double mean_loss = total / batch;
  if (!grad) return mean_loss;

  if (grad->weights.size() != layers) *grad = NetworkParams::zeros_like(spec_);
  Eigen::MatrixXd delta = softmax(logits);
  for (Eigen::Index c = 0; c < delta.cols(); ++c) delta(labels[c], c) -= 1.0;
  delta /= batch;
  for (std::size_t l = layers; l-- > 0;) {
    grad->weights[l].noalias() = delta * acts[l].transpose();
    grad->biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = params_.weights[l].transpose() * delta;
    delta = (pre[l - 1].array() > 0.0).select(back, 0.0);
  }
  return mean_loss;
}

Adam::Adam(const NetworkSpec& spec, AdamConfig cfg)
    : cfg_(cfg), m_(NetworkParams::zeros_like(spec)), v_(NetworkParams::zeros_like(spec)) {}

void Adam::step(NetworkParams& params, const NetworkParams& grad, double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.epsilon);
  };
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    update(params.weights[l], grad.weights[l], m_.weights[l], v_.weights[l]);
    update(params.biases[l], grad.biases[l], m_.biases[l], v_.biases[l]);
  }
}

}  // namespace pad
