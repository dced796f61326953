#pragma once

#include "fdaer/audio_io.hpp"
#include "fdaer/error.hpp"

#include <Eigen/Core>

#include <cmath>
#include <filesystem>
#include <optional>

namespace fdaer {

inline constexpr double kLogFloor = 1e-12;

/// Fraction of adjacent pairs whose signs differ; zero counts as positive.
template <typename Derived>
typename Derived::Scalar zero_crossing_rate(const Eigen::MatrixBase<Derived>& frame) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = frame.size();
  if (n < 2) throw Error(ErrorKind::TooShort, "zero-crossing rate needs at least 2 samples");
  Eigen::Index crossings = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if ((frame(i - 1) < Scalar(0)) != (frame(i) < Scalar(0))) ++crossings;
  }
  return static_cast<Scalar>(crossings) / static_cast<Scalar>(n - 1);
}

/// log(eps + sum x^2).
template <typename Derived>
typename Derived::Scalar log_energy(const Eigen::MatrixBase<Derived>& frame,
                                    typename Derived::Scalar eps = typename Derived::Scalar(kLogFloor)) {
  using std::log;
  if (frame.size() == 0) throw Error(ErrorKind::Empty, "log-energy of an empty frame");
  if (!(eps > 0)) throw Error(ErrorKind::Parameter, "log floor must be positive");
  return log(eps + frame.squaredNorm());
}

/// Teager energy psi[n] = x[n]^2 - x[n+1] x[n-1] for n = 1..N-2.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> teager_energy(const Eigen::MatrixBase<Derived>& frame) {
  const Eigen::Index n = frame.size();
  if (n < 3) throw Error(ErrorKind::TooShort, "Teager energy needs at least 3 samples");
  const auto mid = frame.segment(1, n - 2);
  return (mid.cwiseProduct(mid) - frame.segment(2, n - 2).cwiseProduct(frame.segment(0, n - 2))).eval();
}

struct PitchConfig {
  double f_min = 60.0;
  double f_max = 500.0;
  // Cepstral peak over RMS of quefrency bins 1..N/2. White-noise frames sit
  // below ~5, harmonic frames well above 10.
  double voicing_threshold = 6.0;
};

/// Real-cepstrum pitch in Hz, or nullopt when unvoiced. Frames whose length is
/// not a power of two are zero-padded.
std::optional<double> pitch_cepstral(const Eigen::Ref<const Eigen::VectorXd>& frame, double sample_rate,
                                     const PitchConfig& config = {});

enum class TrackKind { Pitch, Zcr, LogEnergy, TeoMean };

struct FrameConfig {
  std::size_t frame_len = 512;
  std::size_t hop = 256;
};

/// One value per frame. voiced is all-true except for unvoiced pitch frames,
/// whose value is stored as 0.
struct FrameFeatureTrack {
  Eigen::VectorXd values;
  Eigen::Array<bool, Eigen::Dynamic, 1> voiced;
  TrackKind kind = TrackKind::Zcr;
};

/// Pitch uses Hamming frames; the other tracks use rectangular frames.
FrameFeatureTrack compute_track(const AudioClip& clip, TrackKind kind, const FrameConfig& frames = {},
                                const PitchConfig& pitch = {});

struct TrackStats {
  double mean = 0, std = 0, min = 0, max = 0, median = 0;
  bool present = true;  // false when a pitch track has no voiced frame
};

/// Sample statistics over voiced entries; std uses n - 1 (0 for a single value).
TrackStats track_stats(const FrameFeatureTrack& track);

/// `frame_index,value`; unvoiced frames leave the value empty.
void write_track_csv(const std::filesystem::path& path, const FrameFeatureTrack& track);

}  // namespace fdaer
