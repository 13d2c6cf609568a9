#pragma once

#include <vector>

#include <Eigen/Dense>

namespace pad {

inline constexpr double kStdFloor = 1e-8;
// Divisor used for features below the floor: constant training columns map
// to zero while unseen deviations keep their raw scale.
inline constexpr double kFlooredScale = 1.0;

// Per-feature population mean and standard deviation.
struct NormalizationStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  // Features whose deviation fell below kStdFloor (scaled by kFlooredScale).
  std::vector<int> floored;
};

// rows: one sample per row. Throws std::invalid_argument below two rows.
NormalizationStats fit_normalizer(const Eigen::MatrixXd& rows);
Eigen::MatrixXd apply_normalizer(const NormalizationStats& stats, const Eigen::MatrixXd& rows);

}  // namespace pad
