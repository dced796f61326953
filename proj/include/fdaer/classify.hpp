#pragma once

#include "fdaer/emotion.hpp"
#include "fdaer/pipeline.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fdaer {

/// Class-prior weighted scatter: between = sum_c p_c (m_c - m)(m_c - m)^T,
/// within = sum_c p_c S_c with S_c the (1/n_c) class covariance.
struct ScatterMatrices {
  Eigen::MatrixXd between;
  Eigen::MatrixXd within;
};

/// samples holds one observation per row.
ScatterMatrices scatter_matrices(const Eigen::MatrixXd& samples, std::span<const Emotion> labels);

struct MmcProjection {
  Eigen::MatrixXd basis;        // input_dim x d, orthonormal columns
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_scale;

  Eigen::Index input_dim() const { return basis.rows(); }
  Eigen::Index output_dim() const { return basis.cols(); }
};

/// Z-scores the features, then keeps the top `dims` eigenvectors of
/// between - within. Each eigenvector is signed so its largest-magnitude entry
/// is positive.
MmcProjection mmc_fit(const Eigen::MatrixXd& samples, std::span<const Emotion> labels, int dims);

/// Rows of samples after the projection's standardisation (not projected).
Eigen::MatrixXd standardize(const MmcProjection& projection, const Eigen::MatrixXd& samples);

Eigen::VectorXd mmc_project(const MmcProjection& projection, const Eigen::Ref<const Eigen::VectorXd>& v);

/// trace(W^T (between - within) W).
double mmc_objective(const Eigen::MatrixXd& basis, const ScatterMatrices& scatter);

struct Exemplars {
  Eigen::MatrixXd points;  // one reduced vector per row
  std::vector<Emotion> labels;
};

/// Majority vote over the k nearest (Euclidean, index order on distance ties).
/// Vote ties go to the smaller summed distance, then to the
/// lexicographically smaller label.
Emotion knn_predict(const Exemplars& exemplars, const Eigen::Ref<const Eigen::VectorXd>& query, int k);

struct ModelConfig {
  int mmc_dim = 5;
  int knn_k = 3;
  bool use_cascade = true;
  std::vector<StageSpec> cascade_order = default_cascade_order();
  bool include_screen_features = false;  // MMC sees fd features only by default
};

struct EmotionModel {
  MmcProjection projection;
  Exemplars exemplars;
  int k = 3;
  std::optional<ScreeningCascade> cascade;
  bool include_screen_features = false;
  int levels = 0;
  int layout_version = kLayoutVersion;
};

EmotionModel fit_model(std::span<const LabeledFeatures> train, const ModelConfig& config = {});

/// The cascade decides first; pass-through vectors go to MMC + KNN.
Emotion predict(const EmotionModel& model, const FeatureVector& v);

/// Line-oriented text format, versioned by its first line `fdaer-model 1`.
/// The basis is written row-major: input_dim rows of d values, row i being
/// input feature i in feature_names() order. Doubles use 17 digits so a
/// reloaded model predicts identically. `metadata` is stored verbatim
/// (keys and values must not contain whitespace or newlines respectively).
void save_model(std::ostream& out, const EmotionModel& model, const std::map<std::string, std::string>& metadata = {});

struct LoadedModel {
  EmotionModel model;
  std::map<std::string, std::string> metadata;
};

LoadedModel load_model(std::istream& in);

}  // namespace fdaer
