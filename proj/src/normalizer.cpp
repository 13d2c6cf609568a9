#include "padpipe/normalizer.hpp"

#include <stdexcept>

namespace pad {

NormalizationStats fit_normalizer(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) throw std::invalid_argument("fit_normalizer: need at least two rows");
  NormalizationStats stats;
  const auto n = static_cast<double>(rows.rows());
  stats.mean = rows.colwise().sum().transpose() / n;
  stats.stddev.resize(rows.cols());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const double var = (rows.col(j).array() - stats.mean(j)).square().sum() / n;
    double sd = std::sqrt(var);
    if (!(sd >= kStdFloor)) {
      sd = kFlooredScale;
      stats.floored.push_back(static_cast<int>(j));
    }
    stats.stddev(j) = sd;
  }
  return stats;
}

Eigen::MatrixXd apply_normalizer(const NormalizationStats& stats, const Eigen::MatrixXd& rows) {
  if (rows.cols() != stats.mean.size()) throw std::invalid_argument("apply_normalizer: column count mismatch");
  return (rows.rowwise() - stats.mean.transpose()).array().rowwise() / stats.stddev.transpose().array();
}

}  // namespace pad
