#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "padpipe/network.hpp"
#include "padpipe/normalizer.hpp"
#include "padpipe/trainer.hpp"

namespace pad {

struct ModelBundle {
  std::vector<std::string> feature_names;
  std::uint64_t layout_hash = 0;
  std::uint64_t config_hash = 0;
  NormalizationStats normalizer;
  Network network;
  TrainConfig train_config;
};

// Fits the normaliser on all rows, holds out a validation slice and trains.
ModelBundle fit_model(const std::vector<std::string>& feature_names, const LabeledData& raw,
                      const TrainConfig& cfg, const std::vector<int>& hidden = {400, 400},
                      std::vector<EpochRecord>* history = nullptr);

// Spoof probability per row of `raw`. Throws LayoutMismatch unless the
// layout hash equals the model's.
std::vector<double> predict(const ModelBundle& model, std::uint64_t layout, const Eigen::MatrixXd& raw);

// "PADMODEL" magic, version, hashes, feature names, normaliser, layer sizes
// and parameters as little-endian IEEE-754 doubles, config echo.
std::vector<std::uint8_t> serialize_model(const ModelBundle& model);
ModelBundle deserialize_model(std::span<const std::uint8_t> bytes);
void save_model(const std::filesystem::path& path, const ModelBundle& model);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace pad
