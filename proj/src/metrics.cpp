#include "padpipe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "padpipe/errors.hpp"
#include "padpipe/feature_table.hpp"

namespace pad {

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("roc_curve: scores and labels differ in length");
  std::size_t n_spoof = 0;
  for (double s : scores) {
    if (!std::isfinite(s)) throw MetricsUndefined("roc_curve: non-finite score");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("roc_curve: labels must be 0 or 1");
    n_spoof += static_cast<std::size_t>(l);
  }
  const std::size_t n_live = labels.size() - n_spoof;
  if (n_spoof == 0 || n_live == 0) throw MetricsUndefined("ROC needs both bona fide and attack samples");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> roc;
  roc.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  std::size_t live_above = 0;
  std::size_t spoof_above = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = scores[order[i]];
    while (i < order.size() && scores[order[i]] == t) {
      if (labels[order[i]] == 1) {
        ++spoof_above;
      } else {
        ++live_above;
      }
      ++i;
    }
    roc.push_back({t, static_cast<double>(live_above) / static_cast<double>(n_live),
                   static_cast<double>(n_spoof - spoof_above) / static_cast<double>(n_spoof)});
  }
  return roc;
}

double apcer_at_bpcer(std::span<const RocPoint> roc, double target) {
  if (roc.empty()) throw MetricsUndefined("apcer_at_bpcer: empty ROC");
  std::size_t i = 0;
  while (i + 1 < roc.size() && roc[i + 1].bpcer <= target) ++i;
  if (i + 1 == roc.size()) return roc[i].apcer;
  const RocPoint& a = roc[i];
  const RocPoint& b = roc[i + 1];
  const double w = (target - a.bpcer) / (b.bpcer - a.bpcer);
  return a.apcer + w * (b.apcer - a.apcer);
}

double roc_auc(std::span<const RocPoint> roc) {
  double area = 0.0;
  for (std::size_t i = 1; i < roc.size(); ++i) {
    const double width = roc[i].bpcer - roc[i - 1].bpcer;
    area += width * ((1.0 - roc[i].apcer) + (1.0 - roc[i - 1].apcer)) / 2.0;
  }
  return area;
}

std::string roc_to_csv(std::span<const RocPoint> roc) {
  std::string out = "threshold,bpcer,apcer\n";
  for (const auto& p : roc) {
    out += std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold);
    out += ',';
    out += format_double(p.bpcer);
    out += ',';
    out += format_double(p.apcer);
    out += '\n';
  }
  return out;
}

}  // namespace pad
