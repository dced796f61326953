#pragma once

#include "fdaer/audio_io.hpp"
#include "fdaer/emotion.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

namespace fdaer {

/// Exact fractional Gaussian noise. Uses Davies-Harte circulant embedding of
/// the autocovariance 0.5(|k+1|^2H - 2|k|^2H + |k-1|^2H); lengths below 64
/// (or an embedding with a negative eigenvalue) fall back to a Cholesky
/// factor of the full covariance.
Eigen::VectorXd fractional_gaussian_noise(std::size_t n, double hurst, std::mt19937_64& rng);

/// Same process through the Cholesky route regardless of length.
Eigen::VectorXd fractional_gaussian_noise_cholesky(std::size_t n, double hurst, std::mt19937_64& rng);

/// Cumulative sum of fractional Gaussian noise; fractal dimension 2 - H.
Eigen::VectorXd fractional_brownian_motion(std::size_t n, double hurst, std::mt19937_64& rng);

struct SynthClass {
  Emotion emotion;
  double hurst;            // roughness of the fBm carrier
  double rms;              // carrier level after mean removal
  double burst_amplitude;  // peak of added tone bursts, 0 for none
};

struct SynthSpec {
  std::vector<SynthClass> classes;
  int per_class_count = 60;
  std::size_t length = 16384;
  int sample_rate = 16000;
  int speakers = 4;
  std::uint64_t seed = 2024;
};

/// Six classes separated by Hurst exponent, with sad and disgust quiet and
/// angry carrying high-TEO bursts.
SynthSpec default_synth_spec();

struct SyntheticCorpus {
  DatasetManifest manifest;
  std::vector<AudioClip> clips;  // parallel to manifest.entries
};

/// Clips are generated class by class from one seeded stream; clip i of a
/// class goes to pseudo-speaker spk(i mod speakers + 1).
SyntheticCorpus generate_synthetic(const SynthSpec& spec);

/// Writes one 32-bit float WAV per clip under dir/<speaker>/ and a
/// manifest.csv with paths relative to dir.
void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

}  // namespace fdaer
