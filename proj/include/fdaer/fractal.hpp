#pragma once

#include "fdaer/error.hpp"
#include "fdaer/log.hpp"

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace fdaer {

struct HiguchiConfig {
  int k_max = 16;
  // Inclusive [first, last] delays used in the regression; all of 1..k_max when unset.
  std::optional<std::pair<int, int>> fit_range;
};

template <typename Scalar = double>
struct FdEstimate {
  Scalar dimension = 0;
  Scalar fit_residual = 0;  // RMS of the log-log regression residuals
  int points_used = 0;
};

/// Katz dimension of the planar curve (i, x_i) with n = N - 1 steps:
/// log(n) / (log(n) + log(d / L)), where L is the curve length and d the
/// largest distance from the first point.
template <typename Derived>
typename Derived::Scalar katz_fd(const Eigen::MatrixBase<Derived>& series) {
  using Scalar = typename Derived::Scalar;
  using std::hypot;
  using std::log;
  const Eigen::Index n = series.size();
  if (n < 3) throw Error(ErrorKind::TooShort, "Katz dimension needs at least 3 samples");

  Scalar length = 0;
  Scalar extent = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    length += hypot(Scalar(1), series(i) - series(i - 1));
    extent = std::max(extent, hypot(static_cast<Scalar>(i), series(i) - series(0)));
  }
  const Scalar steps = static_cast<Scalar>(n - 1);
  return log(steps) / (log(steps) + log(extent / length));
}

/// Mean normalised curve length <L(k)> over the k offset sub-series
/// x(m), x(m+k), ..., m = 1..k (1-based), each scaled by
/// (N - 1) / (floor((N - m) / k) * k^2).
template <typename Derived>
typename Derived::Scalar higuchi_lengths(const Eigen::MatrixBase<Derived>& series, int k) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = series.size();
  if (k < 1 || k >= n) {
    throw Error(ErrorKind::Parameter, "delay k=" + std::to_string(k) + " invalid for " + std::to_string(n) + " samples");
  }
  if (n < 2 * static_cast<Eigen::Index>(k)) {
    throw Error(ErrorKind::Parameter, "delay k=" + std::to_string(k) + " leaves an offset without increments");
  }

  Scalar total = 0;
  for (Eigen::Index m = 0; m < k; ++m) {
    const Eigen::Index steps = (n - 1 - m) / k;
    Scalar sum = 0;
    for (Eigen::Index i = 1; i <= steps; ++i) {
      using std::abs;
      sum += abs(series(m + i * k) - series(m + (i - 1) * k));
    }
    total += sum * static_cast<Scalar>(n - 1) / (static_cast<Scalar>(steps) * static_cast<Scalar>(k) * k);
  }
  return total / static_cast<Scalar>(k);
}

/// Higuchi dimension: minus the least-squares slope of log <L(k)> on log k.
/// Series with N <= 2 k_max shrink the delay range to floor(N / 2).
template <typename Derived>
FdEstimate<typename Derived::Scalar> higuchi_fd(const Eigen::MatrixBase<Derived>& series, const HiguchiConfig& config) {
  using Scalar = typename Derived::Scalar;
  using std::log;
  using std::sqrt;
  if (config.k_max < 2) throw Error(ErrorKind::Parameter, "k_max must be >= 2");

  const Eigen::Index n = series.size();
  int k_max = config.k_max;
  if (n <= 2 * static_cast<Eigen::Index>(k_max)) {
    const int shrunk = static_cast<int>(n / 2);
    if (shrunk < 2) {
      throw Error(ErrorKind::TooShort, "series of " + std::to_string(n) + " samples is too short for Higuchi");
    }
    if (shrunk < k_max) {
      warn("Higuchi k_max reduced from " + std::to_string(k_max) + " to " + std::to_string(shrunk) +
           " for a series of " + std::to_string(n) + " samples");
      k_max = shrunk;
    }
  }

  int first = 1;
  int last = k_max;
  if (config.fit_range) {
    first = config.fit_range->first;
    last = std::min(config.fit_range->second, k_max);
    if (first < 1 || last - first < 1) throw Error(ErrorKind::Parameter, "fit range needs two delays within 1..k_max");
  }

  const int points = last - first + 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lk(points), ll(points);
  for (int k = first; k <= last; ++k) {
    const Scalar len = higuchi_lengths(series, k);
    if (!(len > 0)) throw Error(ErrorKind::DegenerateSignal, "zero curve length at k=" + std::to_string(k));
    lk[k - first] = log(static_cast<Scalar>(k));
    ll[k - first] = log(len);
  }

  const Scalar mean_k = lk.mean();
  const Scalar mean_l = ll.mean();
  const auto dk = (lk.array() - mean_k).matrix();
  const auto dl = (ll.array() - mean_l).matrix();
  const Scalar slope = dk.dot(dl) / dk.squaredNorm();
  const auto residuals = (dl - slope * dk).eval();

  FdEstimate<Scalar> est;
  est.dimension = -slope;
  est.fit_residual = sqrt(residuals.squaredNorm() / static_cast<Scalar>(points));
  est.points_used = points;
  return est;
}

}  // namespace fdaer
