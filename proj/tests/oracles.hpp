#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <vector>

#include "padpipe/image.hpp"
#include "padpipe/metrics.hpp"
#include "padpipe/network.hpp"

namespace padtest {

// Brute force LBP: textbook bilinear sampling in long double. With integer
// pixels a sample either equals the centre exactly or differs by far more
// than the tolerance, so ties resolve as "not brighter".
inline int oracle_lbp_code(const pad::GrayFrame& g, int x, int y, int r) {
  int code = 0;
  for (int p = 0; p < 8; ++p) {
    const long double a = 2.0L * std::numbers::pi_v<long double> * p / 8.0L;
    long double sx = x + r * std::cos(a);
    long double sy = y - r * std::sin(a);
    if (std::fabs(sx - std::round(sx)) < 1e-12L) sx = std::round(sx);
    if (std::fabs(sy - std::round(sy)) < 1e-12L) sy = std::round(sy);
    const int x0 = static_cast<int>(std::floor(sx));
    const int y0 = static_cast<int>(std::floor(sy));
    const long double fx = sx - x0;
    const long double fy = sy - y0;
    auto at = [&](int xx, int yy) -> long double { return g.contains(xx, yy) ? g(xx, yy) : 0.0L; };
    const long double v = (1 - fx) * (1 - fy) * at(x0, y0) + fx * (1 - fy) * at(x0 + 1, y0) +
                          (1 - fx) * fy * at(x0, y0 + 1) + fx * fy * at(x0 + 1, y0 + 1);
    if (v - g(x, y) > 1e-9L) code |= 1 << p;
  }
  return code;
}

// Classes numbered by ascending minimal rotation, found by enumeration.
inline std::map<int, int> oracle_classes() {
  auto min_rot = [](int c) {
    int best = c;
    for (int k = 1; k < 8; ++k) best = std::min(best, ((c >> k) | (c << (8 - k))) & 0xff);
    return best;
  };
  std::set<int> reps;
  for (int c = 0; c < 256; ++c) reps.insert(min_rot(c));
  std::map<int, int> cls_of_rep;
  int i = 0;
  for (int rep : reps) cls_of_rep[rep] = i++;
  std::map<int, int> out;
  for (int c = 0; c < 256; ++c) out[c] = cls_of_rep[min_rot(c)];
  return out;
}

inline std::vector<double> oracle_histogram(const pad::GrayFrame& g, const pad::Mask& m, int r) {
  static const auto classes = oracle_classes();
  std::vector<double> h(36, 0.0);
  int n = 0;
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      if (!m(x, y) || x < r || y < r || x + r >= g.width() || y + r >= g.height()) continue;
      h[classes.at(oracle_lbp_code(g, x, y, r))] += 1.0;
      ++n;
    }
  }
  if (n) {
    for (auto& v : h) v /= n;
  }
  return h;
}

// Error rates counted directly at threshold t (score >= t is an attack).
struct OraclePoint {
  double threshold;
  double bpcer;
  double apcer;
};

inline OraclePoint oracle_rates(const std::vector<double>& scores, const std::vector<int>& labels, double t) {
  int live = 0, spoof = 0, live_rejected = 0, spoof_accepted = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == 1) {
      ++spoof;
      if (scores[i] < t) ++spoof_accepted;
    } else {
      ++live;
      if (scores[i] >= t) ++live_rejected;
    }
  }
  return {t, static_cast<double>(live_rejected) / live, static_cast<double>(spoof_accepted) / spoof};
}

// Every candidate threshold: +inf and each distinct score, descending.
inline std::vector<OraclePoint> oracle_roc(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::set<double, std::greater<>> thresholds(scores.begin(), scores.end());
  std::vector<OraclePoint> out{oracle_rates(scores, labels, std::numeric_limits<double>::infinity())};
  for (double t : thresholds) out.push_back(oracle_rates(scores, labels, t));
  return out;
}

// Lowest threshold whose BPCER stays within the target, then linear
// interpolation toward the next lower threshold.
inline double oracle_apcer_at(const std::vector<double>& scores, const std::vector<int>& labels, double target) {
  const auto roc = oracle_roc(scores, labels);
  std::size_t best = 0;
  for (std::size_t i = 0; i < roc.size(); ++i) {
    if (roc[i].bpcer <= target) best = i;
  }
  if (best + 1 == roc.size()) return roc[best].apcer;
  const auto& a = roc[best];
  const auto& b = roc[best + 1];
  return a.apcer + (target - a.bpcer) / (b.bpcer - a.bpcer) * (b.apcer - a.apcer);
}

// P(attack > bona fide) with ties counted one half.
inline double oracle_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      wins += scores[i] > scores[j] ? 1.0 : scores[i] == scores[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

// Largest per-layer relative error ||g_analytic - g_numeric|| / (||g_analytic|| + ||g_numeric||)
// over every weight matrix and bias vector, with central differences of step h.
inline double gradient_check(const pad::Network& net, const Eigen::MatrixXd& inputs, const std::vector<int>& labels,
                             double h = 1e-5) {
  pad::NetworkParams analytic;
  net.loss(inputs, labels, &analytic);
  pad::Network probe = net;
  auto numeric_of = [&](double& param) {
    const double saved = param;
    param = saved + h;
    const double up = probe.loss(inputs, labels);
    param = saved - h;
    const double down = probe.loss(inputs, labels);
    param = saved;
    return (up - down) / (2.0 * h);
  };
  auto rel = [](const Eigen::ArrayXd& a, const Eigen::ArrayXd& n) {
    const double denom = a.matrix().norm() + n.matrix().norm();
    return denom == 0.0 ? 0.0 : (a - n).matrix().norm() / denom;
  };
  double worst = 0.0;
  for (std::size_t l = 0; l < net.spec().layers(); ++l) {
    auto& w = probe.params().weights[l];
    Eigen::ArrayXd num_w(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) num_w[i] = numeric_of(w.data()[i]);
    const Eigen::ArrayXd ana_w = Eigen::Map<const Eigen::ArrayXd>(analytic.weights[l].data(), w.size());
    worst = std::max(worst, rel(ana_w, num_w));
    auto& b = probe.params().biases[l];
    Eigen::ArrayXd num_b(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) num_b[i] = numeric_of(b[i]);
    worst = std::max(worst, rel(analytic.biases[l].array(), num_b));
  }
  return worst;
}

}  // namespace padtest
