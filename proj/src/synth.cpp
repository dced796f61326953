#include "fdaer/synth.hpp"

#include "fdaer/error.hpp"

#include <Eigen/Cholesky>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>

namespace fdaer {

namespace {

void check_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw Error(ErrorKind::Parameter, "Hurst exponent must lie in (0, 1)");
}

double fgn_autocovariance(std::size_t k, double hurst) {
  const double h2 = 2.0 * hurst;
  const double kd = static_cast<double>(k);
  return 0.5 * (std::pow(kd + 1.0, h2) - 2.0 * std::pow(kd, h2) + std::pow(std::abs(kd - 1.0), h2));
}

constexpr std::size_t kCirculantMinLength = 64;

}  // namespace

Eigen::VectorXd fractional_gaussian_noise_cholesky(std::size_t n, double hurst, std::mt19937_64& rng) {
  check_hurst(hurst);
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd cov(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) {
      cov(i, j) = fgn_autocovariance(static_cast<std::size_t>(std::abs(i - j)), hurst);
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::Parameter, "fGn covariance is not positive definite");
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(size);
  for (auto& v : z) v = normal(rng);
  return llt.matrixL() * z;
}

Eigen::VectorXd fractional_gaussian_noise(std::size_t n, double hurst, std::mt19937_64& rng) {
  check_hurst(hurst);
  if (n == 0) return {};
  if (n < kCirculantMinLength) return fractional_gaussian_noise_cholesky(n, hurst, rng);

  const std::size_t m = 2 * n;
  std::vector<double> row(m);
  for (std::size_t k = 0; k <= n; ++k) row[k] = fgn_autocovariance(k, hurst);
  for (std::size_t k = n + 1; k < m; ++k) row[k] = row[m - k];

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> eig;
  fft.fwd(eig, row);
  double largest = 0.0;
  for (const auto& e : eig) largest = std::max(largest, std::abs(e.real()));
  for (const auto& e : eig) {
    if (e.real() < -1e-10 * largest) return fractional_gaussian_noise_cholesky(n, hurst, rng);
  }

  std::normal_distribution<double> normal;
  std::vector<std::complex<double>> w(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double scale = std::sqrt(std::max(eig[k].real(), 0.0) / static_cast<double>(m));
    const double re = normal(rng);
    const double im = normal(rng);
    w[k] = scale * std::complex<double>(re, im);
  }
  std::vector<std::complex<double>> y;
  fft.fwd(y, w);

  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) out[static_cast<Eigen::Index>(k)] = y[k].real();
  return out;
}

Eigen::VectorXd fractional_brownian_motion(std::size_t n, double hurst, std::mt19937_64& rng) {
  Eigen::VectorXd path = fractional_gaussian_noise(n, hurst, rng);
  for (Eigen::Index i = 1; i < path.size(); ++i) path[i] += path[i - 1];
  return path;
}

SynthSpec default_synth_spec() {
  SynthSpec spec;
  spec.classes = {
      {Emotion::Angry, 0.40, 0.10, 0.60},  {Emotion::Disgust, 0.55, 0.035, 0.0},
      {Emotion::Fear, 0.10, 0.10, 0.0},    {Emotion::Happy, 0.25, 0.10, 0.0},
      {Emotion::Sad, 0.70, 0.006, 0.0},    {Emotion::Surprise, 0.85, 0.10, 0.0},
  };
  return spec;
}

SyntheticCorpus generate_synthetic(const SynthSpec& spec) {
  if (spec.classes.empty()) throw Error(ErrorKind::Parameter, "synthetic spec has no classes");
  if (spec.per_class_count < 2) throw Error(ErrorKind::Parameter, "at least 2 clips per class required");
  if (spec.speakers < 1) throw Error(ErrorKind::Parameter, "at least one pseudo-speaker required");
  if (spec.sample_rate <= 0) throw Error(ErrorKind::Parameter, "sample rate must be positive");
  constexpr std::size_t kBurstLength = 256;
  if (spec.length < 2 * kBurstLength) throw Error(ErrorKind::Parameter, "synthetic clips must be >= 512 samples");
  for (const auto& c : spec.classes) {
    check_hurst(c.hurst);
    if (!(c.rms > 0) || c.burst_amplitude < 0) throw Error(ErrorKind::Parameter, "class levels must be positive");
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::VectorXd envelope = [] {
    Eigen::VectorXd w(static_cast<Eigen::Index>(kBurstLength));
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(w.size() - 1));
    }
    return w;
  }();

  SyntheticCorpus corpus;
  for (const auto& cls : spec.classes) {
    for (int i = 0; i < spec.per_class_count; ++i) {
      Eigen::VectorXd x = fractional_brownian_motion(spec.length, cls.hurst, rng);
      x.array() -= x.mean();
      x *= cls.rms / std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));

      if (cls.burst_amplitude > 0) {
        const std::size_t bursts = std::max<std::size_t>(1, spec.length / 4096);
        for (std::size_t b = 0; b < bursts; ++b) {
          const auto start = static_cast<Eigen::Index>(unit(rng) * static_cast<double>(spec.length - kBurstLength));
          const double omega = 1.2 + 1.2 * unit(rng);
          const double phase = 2.0 * std::numbers::pi * unit(rng);
          for (Eigen::Index t = 0; t < envelope.size(); ++t) {
            x[start + t] += cls.burst_amplitude * envelope[t] * std::sin(omega * static_cast<double>(t) + phase);
          }
        }
      }
      x = x.cwiseMax(-1.0).cwiseMin(1.0);

      const std::string speaker = "spk" + std::to_string(i % spec.speakers + 1);
      const std::string path = speaker + "/" + std::string(to_string(cls.emotion)) + "_" +
                               (i < 10 ? "0" : "") + std::to_string(i) + ".wav";
      AudioClip clip;
      clip.samples = std::move(x);
      clip.sample_rate = spec.sample_rate;
      clip.speaker = speaker;
      clip.emotion = cls.emotion;
      clip.source_path = path;
      corpus.manifest.entries.push_back({path, speaker, cls.emotion});
      corpus.clips.push_back(std::move(clip));
    }
  }
  return corpus;
}

void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string());
  for (const auto& clip : corpus.clips) {
    const fs::path target = dir / clip.source_path;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + target.parent_path().string());
    write_wav(target, clip.samples, clip.sample_rate, WavEncoding::Float32);
  }
  write_manifest_csv(dir / "manifest.csv", corpus.manifest);
}

}  // namespace fdaer
