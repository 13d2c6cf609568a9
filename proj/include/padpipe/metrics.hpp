#pragma once

#include <span>
#include <string>
#include <vector>

namespace pad {

// Labels: 1 = attack (spoof), 0 = bona fide (live). A score >= threshold is
// classified as an attack.
struct RocPoint {
  double threshold = 0.0;
  double bpcer = 0.0;
  double apcer = 0.0;
};

// One point per distinct score plus a leading +inf threshold, ordered by
// decreasing threshold (non-decreasing BPCER, non-increasing APCER).
// Throws MetricsUndefined unless both classes are present.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);

// APCER on the piecewise-linear ROC at BPCER = target: starts from the
// lowest-APCER point with BPCER <= target and interpolates toward the next
// point.
double apcer_at_bpcer(std::span<const RocPoint> roc, double target);

// Area under (BPCER, 1 - APCER); equals P(attack score > bona fide score)
// with ties counted one half.
double roc_auc(std::span<const RocPoint> roc);

std::string roc_to_csv(std::span<const RocPoint> roc);

}  // namespace pad
