#pragma once

#include "fdaer/audio_io.hpp"
#include "fdaer/emotion.hpp"
#include "fdaer/time_features.hpp"
#include "fdaer/wavelet.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fdaer {

enum class FdMethod { Higuchi, Katz };

std::string_view to_string(FdMethod method);
std::optional<FdMethod> parse_fd_method(std::string_view name);

struct WaveletConfig {
  WaveletFamily family = WaveletFamily::Db4;
  BoundaryMode mode = BoundaryMode::Symmetric;
  int levels = 5;
};

struct FdConfig {
  FdMethod method = FdMethod::Higuchi;
  int k_max_subband = 8;
  int k_max_raw = 16;
};

struct FeatureConfig {
  WaveletConfig wavelet;
  FdConfig fd;
  FrameConfig frames;
  PitchConfig pitch;
};

inline constexpr int kLayoutVersion = 1;

// Substituted for the dimension of a band that is constant or numerically
// silent; it is the smooth-curve limit.
inline constexpr double kDegenerateFdSentinel = 1.0;

// Positions inside FeatureVector::screen.
enum ScreenFeature : std::size_t {
  kLeMean = 0,
  kLeStd,
  kTeoMean,
  kTeoStd,
  kZcrMean,
  kPitchMean,
  kScreenFeatureCount
};

/// Layout version 1:
///   fd     = [fd_d1 .. fd_dJ, fd_a1 .. fd_aJ, fd_raw]       (2J + 1 entries)
///   screen = [le_mean, le_std, teo_mean, teo_std, zcr_mean, pitch_mean]
/// pitch_mean is 0.0 when no frame was voiced.
struct FeatureVector {
  Eigen::VectorXd fd;
  Eigen::VectorXd screen;
  int levels = 0;
  int layout_version = kLayoutVersion;
  bool pitch_present = false;

  Eigen::VectorXd concatenated() const;
};

/// Column names for a layout with J levels, fd names first.
std::vector<std::string> feature_names(int levels);

/// Whole-sequence FD of the detail and approximation band of every level and
/// of the raw signal, plus
/// utterance-level statistics of the frame tracks. Missing levels (clamped
/// decomposition) and degenerate bands get kDegenerateFdSentinel and a warning.
FeatureVector extract_features(const AudioClip& clip, const FeatureConfig& config = {});

struct LabeledFeatures {
  FeatureVector features;
  Emotion emotion;
};

enum class Direction { Greater, Less };

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view name);

struct ScreeningStage {
  Emotion target;
  std::size_t feature_index;
  Direction direction;
  double threshold;
  double margin;

  // Strictly beyond the threshold, and only for stages with a positive margin.
  bool fires(const FeatureVector& v) const;
};

struct StageSpec {
  Emotion target;
  std::size_t feature_index;
  Direction direction;
};

struct ScreeningCascade {
  std::vector<ScreeningStage> stages;
  std::size_t screen_dim = kScreenFeatureCount;
};

/// angry by high TEO mean, then sad and disgust by low log-energy mean.
std::vector<StageSpec> default_cascade_order();

/// Fits each stage on the utterances that survived the previous ones:
/// threshold is the midpoint of the target and complement means, margin half
/// their gap.
ScreeningCascade fit_cascade(std::span<const LabeledFeatures> samples, std::span<const StageSpec> order);

/// First firing stage's target, or nullopt to pass the vector on.
std::optional<Emotion> apply_cascade(const ScreeningCascade& cascade, const FeatureVector& v);

/// A row of the feature table.
struct FeatureRecord {
  std::string path;
  std::string speaker;
  Emotion emotion;
  FeatureVector features;
  std::string cache_key;
};

/// Header: path,speaker,emotion,key, then feature_names(J). One row per record.
void write_feature_csv(const std::filesystem::path& path, std::span<const FeatureRecord> records);
std::vector<FeatureRecord> read_feature_csv(const std::filesystem::path& path);

}  // namespace fdaer
