#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "padpipe/rng.hpp"

namespace pad {

// Fully connected net: ReLU on hidden layers, softmax on the output.
struct NetworkSpec {
  std::vector<int> layer_sizes;

  static NetworkSpec dnn1(int input_dim) { return {{input_dim, 400, 400, 2}}; }
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  std::size_t layers() const { return layer_sizes.size() - 1; }
};

struct NetworkParams {
  // weights[l] is out x in; biases[l] has `out` entries.
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static NetworkParams zeros_like(const NetworkSpec& spec);
  std::size_t parameter_count() const;
};

class Network {
 public:
  Network() = default;
  explicit Network(NetworkSpec spec);  // all-zero parameters

  // Xavier-uniform weights, zero biases.
  static Network xavier(NetworkSpec spec, Rng& rng);

  const NetworkSpec& spec() const { return spec_; }
  const NetworkParams& params() const { return params_; }
  NetworkParams& params() { return params_; }

  // inputs: one sample per column. Returns class probabilities per column.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;

  // Mean cross-entropy over the columns of `inputs`; fills `grad` with its
  // gradient when non-null.
  double loss(const Eigen::MatrixXd& inputs, std::span<const int> labels, NetworkParams* grad = nullptr) const;

 private:
  NetworkSpec spec_;
  NetworkParams params_;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(const NetworkSpec& spec, AdamConfig cfg = {});
  void step(NetworkParams& params, const NetworkParams& grad, double lr);

 private:
  AdamConfig cfg_;
  NetworkParams m_;
  NetworkParams v_;
  long t_ = 0;
};

}  // namespace pad
