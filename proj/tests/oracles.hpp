#pragma once

// Slow, literal reference implementations used only by the tests. None of
// them share code with the library.

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// 1-based transcription of the sub-sampled curve length, averaged over m.
inline double higuchi_mean_length(const std::vector<double>& x1, int k) {
  const long n = static_cast<long>(x1.size());
  auto X = [&](long i) { return x1[static_cast<std::size_t>(i - 1)]; };
  double acc = 0.0;
  for (long m = 1; m <= k; ++m) {
    const long count = (n - m) / k;
    double s = 0.0;
    for (long i = 1; i <= count; ++i) s += std::fabs(X(m + i * k) - X(m + (i - 1) * k));
    acc += s * static_cast<double>(n - 1) / (static_cast<double>(count) * k * k);
  }
  return acc / k;
}

// Slope of log<L(k)> on log k, by the textbook sums formula.
inline double higuchi_dimension(const std::vector<double>& x, int k_max) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 1; k <= k_max; ++k) {
    const double lx = std::log(static_cast<double>(k));
    const double ly = std::log(higuchi_mean_length(x, k));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = k_max;
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// D = log(L/a) / log(d/a) over the points (i, x_i).
inline double katz_dimension(const std::vector<double>& x) {
  const std::size_t n = x.size();
  double total = 0.0;
  double far = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    total += std::sqrt(1.0 + (x[i] - x[i - 1]) * (x[i] - x[i - 1]));
    const double di = static_cast<double>(i);
    far = std::max(far, std::sqrt(di * di + (x[i] - x[0]) * (x[i] - x[0])));
  }
  const double a = total / static_cast<double>(n - 1);
  return std::log(total / a) / std::log(far / a);
}

// Cyclic Jacobi rotations until the off-diagonal mass vanishes. Returns the
// eigenvalues sorted descending.
inline Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-26 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.rbegin(), ev.rend());
  return Eigen::Map<Eigen::VectorXd>(ev.data(), n);
}

// Lag of the autocorrelation maximum inside [sr/f_max, sr/f_min], as Hz.
inline double autocorrelation_pitch(const Eigen::VectorXd& x, double sr, double f_min, double f_max) {
  const auto lo = static_cast<Eigen::Index>(std::ceil(sr / f_max));
  const auto hi = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(sr / f_min)), x.size() - 1);
  Eigen::Index best = lo;
  double best_r = -1e300;
  for (Eigen::Index lag = lo; lag <= hi; ++lag) {
    double r = 0.0;
    for (Eigen::Index i = 0; i + lag < x.size(); ++i) r += x[i] * x[i + lag];
    if (r > best_r) {
      best_r = r;
      best = lag;
    }
  }
  return sr / static_cast<double>(best);
}

inline Eigen::VectorXd gaussian(Eigen::Index n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// A fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path = std::filesystem::temp_directory_path() / ("fdaer_" + tag + "_" + std::to_string(stamp));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace oracle
