#pragma once

#include "fdaer/classify.hpp"
#include "fdaer/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace fdaer {

struct ExperimentConfig {
  FeatureConfig features;
  ModelConfig model;
  std::uint64_t seed = 1;
};

/// Applies one `key=value` setting. Keys: wavelet, boundary, levels, kmax,
/// kmax_raw, fd, frame_len, hop, pitch_fmin, pitch_fmax, voicing_threshold,
/// mmc_dim, knn_k, cascade (on|off), cascade_order
/// (emotion:feature:greater|less,...), mmc_features (fd|all), seed.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Reads `key=value` lines; blank lines and `#` comments are ignored.
void load_config_file(ExperimentConfig& config, const std::filesystem::path& path);

/// Every setting as it would be written to a config file.
std::map<std::string, std::string> snapshot(const ExperimentConfig& config);

/// Canonical text of the settings that change extracted features.
std::string feature_config_key(const FeatureConfig& config);

}  // namespace fdaer
