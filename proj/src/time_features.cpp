#include "fdaer/time_features.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <complex>
#include <fstream>
#include <vector>

namespace fdaer {

std::optional<double> pitch_cepstral(const Eigen::Ref<const Eigen::VectorXd>& frame, double sample_rate,
                                     const PitchConfig& config) {
  if (!(sample_rate > 0) || !(config.f_min > 0) || !(config.f_min < config.f_max) ||
      !(config.f_max < sample_rate / 2)) {
    throw Error(ErrorKind::Parameter, "pitch band must satisfy 0 < f_min < f_max < sample_rate / 2");
  }
  if (frame.size() < 2) throw Error(ErrorKind::TooShort, "pitch needs at least 2 samples");

  Eigen::Index nfft = 1;
  while (nfft < frame.size()) nfft *= 2;
  std::vector<double> padded(static_cast<std::size_t>(nfft), 0.0);
  std::copy(frame.begin(), frame.end(), padded.begin());

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);
  std::vector<std::complex<double>> log_mag(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) log_mag[i] = std::log(std::abs(spectrum[i]) + kLogFloor);
  std::vector<std::complex<double>> cepstrum_c;
  fft.inv(cepstrum_c, log_mag);

  const Eigen::Index half = nfft / 2;
  const auto q_lo = static_cast<Eigen::Index>(std::ceil(sample_rate / config.f_max));
  const auto q_hi = std::min(static_cast<Eigen::Index>(std::floor(sample_rate / config.f_min)), half);
  if (q_lo > q_hi || q_lo < 1) {
    throw Error(ErrorKind::Parameter, "frame too short to resolve the pitch band");
  }

  double sum_sq = 0.0;
  for (Eigen::Index q = 1; q <= half; ++q) {
    const double c = cepstrum_c[static_cast<std::size_t>(q)].real();
    sum_sq += c * c;
  }
  const double rms = std::sqrt(sum_sq / static_cast<double>(half));
  if (!(rms > 0)) return std::nullopt;

  Eigen::Index best = q_lo;
  double peak = cepstrum_c[static_cast<std::size_t>(q_lo)].real();
  for (Eigen::Index q = q_lo + 1; q <= q_hi; ++q) {
    const double v = cepstrum_c[static_cast<std::size_t>(q)].real();
    if (v > peak) {
      peak = v;
      best = q;
    }
  }
  if (peak / rms < config.voicing_threshold) return std::nullopt;
  return sample_rate / static_cast<double>(best);
}

FrameFeatureTrack compute_track(const AudioClip& clip, TrackKind kind, const FrameConfig& frames,
                                const PitchConfig& pitch) {
  const WindowKind window_kind = kind == TrackKind::Pitch ? WindowKind::Hamming : WindowKind::Rectangular;
  const FrameSeries series = frame_signal(clip.samples, frames.frame_len, frames.hop, window_kind);

  FrameFeatureTrack track;
  track.kind = kind;
  track.values.resize(series.count());
  track.voiced.setConstant(series.count(), true);
  for (Eigen::Index i = 0; i < series.count(); ++i) {
    const auto frame = series.frames.col(i);
    switch (kind) {
      case TrackKind::Zcr: track.values[i] = zero_crossing_rate(frame); break;
      case TrackKind::LogEnergy: track.values[i] = log_energy(frame); break;
      case TrackKind::TeoMean: track.values[i] = teager_energy(frame).mean(); break;
      case TrackKind::Pitch: {
        auto hz = pitch_cepstral(frame, clip.sample_rate, pitch);
        track.voiced[i] = hz.has_value();
        track.values[i] = hz.value_or(0.0);
        break;
      }
    }
  }
  return track;
}

TrackStats track_stats(const FrameFeatureTrack& track) {
  if (track.values.size() == 0) throw Error(ErrorKind::Empty, "statistics of an empty track");
  std::vector<double> v;
  for (Eigen::Index i = 0; i < track.values.size(); ++i) {
    if (track.voiced.size() != track.values.size() || track.voiced[i]) v.push_back(track.values[i]);
  }
  TrackStats stats;
  if (v.empty()) {
    stats.present = false;
    return stats;
  }
  const Eigen::Map<const Eigen::VectorXd> values(v.data(), static_cast<Eigen::Index>(v.size()));
  stats.mean = values.mean();
  stats.std = v.size() > 1
                  ? std::sqrt((values.array() - stats.mean).square().sum() / static_cast<double>(v.size() - 1))
                  : 0.0;
  stats.min = values.minCoeff();
  stats.max = values.maxCoeff();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  stats.median = v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  return stats;
}

void write_track_csv(const std::filesystem::path& path, const FrameFeatureTrack& track) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.precision(17);
  out << "frame_index,value\n";
  for (Eigen::Index i = 0; i < track.values.size(); ++i) {
    out << i << ',';
    if (track.voiced.size() != track.values.size() || track.voiced[i]) out << track.values[i];
    out << '\n';
  }
}

}  // namespace fdaer
