#pragma once

#include "fdaer/error.hpp"
#include "fdaer/log.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fdaer {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class WaveletFamily { Haar, Db2, Db4, Db8 };

// periodic is periodization: ceil(N/2) coefficients per band, odd inputs are
// padded by repeating the last sample. symmetric (half-sample reflection) and
// zero produce floor((N + L - 1) / 2) coefficients per band.
enum class BoundaryMode { Symmetric, Periodic, Zero };

std::string_view to_string(WaveletFamily family);
std::string_view to_string(BoundaryMode mode);
std::optional<WaveletFamily> parse_wavelet_family(std::string_view name);
std::optional<BoundaryMode> parse_boundary_mode(std::string_view name);

/// Orthonormal two-channel filter bank. highpass[i] = (-1)^i lowpass[L-1-i].
template <typename Scalar = double>
struct WaveletFilterPair {
  Vector<Scalar> lowpass;
  Vector<Scalar> highpass;
  std::string family_name;

  Eigen::Index length() const { return lowpass.size(); }
};

namespace detail {

// Daubechies scaling filters, sum sqrt(2), computed by spectral factorisation
// at 50 digits.
inline constexpr std::array<long double, 2> kHaar = {
    0.7071067811865475244008443621048490L, 0.7071067811865475244008443621048490L};
inline constexpr std::array<long double, 4> kDb2 = {
    0.4829629131445341433748715998644486L, 0.8365163037378079055752937809168732L,
    0.2241438680420133810259727622404003L, -0.1294095225512603811744494188120241L};
inline constexpr std::array<long double, 8> kDb4 = {
    0.2303778133088965008632911830440708L,  0.7148465705529156470899219552739927L,
    0.6308807679298589078817163383006152L,  -0.02798376941685985421141374718007538L,
    -0.1870348117190930840795706727890814L, 0.03084138183556076362721936253495905L,
    0.03288301166688519973540751354924439L, -0.01059740178506903210488320852402722L};
inline constexpr std::array<long double, 16> kDb8 = {
    0.05441584224310400995500940520299935L,  0.3128715909142999706591623755057177L,
    0.6756307362972898068078007670471831L,   0.5853546836542067127712995285360205L,
    -0.01582910525634930566738054787646630L, -0.2840155429615469265162031323741647L,
    0.0004724845739132827703605900098258949L, 0.1287474266204784588570292875097083L,
    -0.01736930100180754616961614886809598L, -0.04408825393079475150676372323896350L,
    0.01398102791739828164872293057263346L,  0.008746094047405776716382743246475640L,
    -0.004870352993451574310422181557109824L, -0.0003917403733769470462980803573167983L,
    0.0006754494064505693663695475738106496L, -0.0001174767841247695337306282316988909L};

template <typename Scalar, std::size_t N>
WaveletFilterPair<Scalar> make_pair(const std::array<long double, N>& lo, std::string name) {
  WaveletFilterPair<Scalar> f;
  f.lowpass.resize(N);
  f.highpass.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    f.lowpass[static_cast<Eigen::Index>(i)] = static_cast<Scalar>(lo[i]);
    const long double sign = (i % 2 == 0) ? 1.0L : -1.0L;
    f.highpass[static_cast<Eigen::Index>(i)] = static_cast<Scalar>(sign * lo[N - 1 - i]);
  }
  f.family_name = std::move(name);
  return f;
}

inline Eigen::Index wrap_symmetric(Eigen::Index i, Eigen::Index n) {
  const Eigen::Index period = 2 * n;
  Eigen::Index p = i % period;
  if (p < 0) p += period;
  return p < n ? p : period - 1 - p;
}

}  // namespace detail

template <typename Scalar = double>
WaveletFilterPair<Scalar> filter_coeffs(WaveletFamily family) {
  switch (family) {
    case WaveletFamily::Haar: return detail::make_pair<Scalar>(detail::kHaar, "haar");
    case WaveletFamily::Db2: return detail::make_pair<Scalar>(detail::kDb2, "db2");
    case WaveletFamily::Db4: return detail::make_pair<Scalar>(detail::kDb4, "db4");
    case WaveletFamily::Db8: return detail::make_pair<Scalar>(detail::kDb8, "db8");
  }
  throw Error(ErrorKind::Parameter, "unknown wavelet family");
}

template <typename Scalar = double>
WaveletFilterPair<Scalar> filter_coeffs(std::string_view family) {
  auto f = parse_wavelet_family(family);
  if (!f) throw Error(ErrorKind::Parameter, "unknown wavelet family '" + std::string(family) + "'");
  return filter_coeffs<Scalar>(*f);
}

/// Number of coefficients per band for one analysis step.
inline std::size_t dwt_length(std::size_t n, std::size_t filter_len, BoundaryMode mode) {
  if (mode == BoundaryMode::Periodic) return (n + 1) / 2;
  return (n + filter_len - 1) / 2;
}

template <typename Scalar>
struct DwtLevel {
  Vector<Scalar> approx;
  Vector<Scalar> detail;
};

/// One analysis step: boundary-extended correlation with each filter,
/// keeping every second output.
template <typename Derived, typename Scalar = typename Derived::Scalar>
DwtLevel<Scalar> dwt_single(const Eigen::MatrixBase<Derived>& signal, const WaveletFilterPair<Scalar>& filter,
                            BoundaryMode mode) {
  const Eigen::Index n = signal.size();
  const Eigen::Index f = filter.length();
  if (n < f) {
    throw Error(ErrorKind::TooShort, "signal of length " + std::to_string(n) + " is shorter than the " +
                                         filter.family_name + " filter");
  }
  const auto out_len = static_cast<Eigen::Index>(dwt_length(static_cast<std::size_t>(n),
                                                            static_cast<std::size_t>(f), mode));

  // ext[j] holds the extended signal at position j - offset.
  Vector<Scalar> ext;
  if (mode == BoundaryMode::Periodic) {
    const Eigen::Index m = 2 * out_len;
    ext.resize(m + f - 1);
    for (Eigen::Index j = 0; j < ext.size(); ++j) {
      const Eigen::Index k = j % m;
      ext[j] = signal(k < n ? k : n - 1);
    }
  } else {
    const Eigen::Index offset = f - 2;
    ext.resize(n + 2 * f - 3);
    for (Eigen::Index j = 0; j < ext.size(); ++j) {
      const Eigen::Index i = j - offset;
      if (i >= 0 && i < n) {
        ext[j] = signal(i);
      } else {
        ext[j] = mode == BoundaryMode::Zero ? Scalar(0) : signal(detail::wrap_symmetric(i, n));
      }
    }
  }

  DwtLevel<Scalar> out;
  out.approx.resize(out_len);
  out.detail.resize(out_len);
  for (Eigen::Index o = 0; o < out_len; ++o) {
    const auto window = ext.segment(2 * o, f);
    out.approx[o] = filter.lowpass.dot(window);
    out.detail[o] = filter.highpass.dot(window);
  }
  return out;
}

/// Inverse of dwt_single: the transposed analysis operator restricted to the
/// original support.
template <typename DerivedA, typename DerivedD, typename Scalar = typename DerivedA::Scalar>
Vector<Scalar> idwt_single(const Eigen::MatrixBase<DerivedA>& approx, const Eigen::MatrixBase<DerivedD>& detail,
                           const WaveletFilterPair<Scalar>& filter, BoundaryMode mode, std::size_t target_length) {
  const Eigen::Index f = filter.length();
  const auto expected = static_cast<Eigen::Index>(dwt_length(target_length, static_cast<std::size_t>(f), mode));
  if (approx.size() != detail.size() || approx.size() != expected) {
    throw Error(ErrorKind::Shape, "coefficient lengths " + std::to_string(approx.size()) + "/" +
                                      std::to_string(detail.size()) + " do not match target length " +
                                      std::to_string(target_length));
  }
  const auto n = static_cast<Eigen::Index>(target_length);
  const Eigen::Index len = approx.size();
  Vector<Scalar> acc = Vector<Scalar>::Zero(2 * (len - 1) + f);
  for (Eigen::Index o = 0; o < len; ++o) {
    acc.segment(2 * o, f) += approx(o) * filter.lowpass + detail(o) * filter.highpass;
  }

  if (mode == BoundaryMode::Periodic) {
    const Eigen::Index m = 2 * len;
    Vector<Scalar> folded = Vector<Scalar>::Zero(m);
    for (Eigen::Index j = 0; j < acc.size(); ++j) folded[j % m] += acc[j];
    return folded.head(n);
  }
  return acc.segment(f - 2, n);
}

/// a_J plus d_1..d_J, where details[0] is the finest band d_1.
template <typename Scalar = double>
struct WaveletDecomposition {
  int levels = 0;
  std::vector<Vector<Scalar>> details;
  Vector<Scalar> approx;
  BoundaryMode boundary_mode = BoundaryMode::Symmetric;
  WaveletFilterPair<Scalar> filter;
  std::size_t original_length = 0;

  /// Input length seen by each analysis step (entry 0 is the original signal).
  std::vector<std::size_t> input_lengths() const {
    std::vector<std::size_t> lengths{original_length};
    for (int j = 1; j < levels; ++j) {
      lengths.push_back(dwt_length(lengths.back(), static_cast<std::size_t>(filter.length()), boundary_mode));
    }
    return lengths;
  }
};

/// Deepest level reachable when every analysed input must be at least as long
/// as the filter and the final approximation must keep min_approx_length
/// samples. Zero means not even one step fits.
inline int max_wavedec_level(std::size_t n, std::size_t filter_len, BoundaryMode mode, std::size_t min_approx_length) {
  int level = 0;
  while (n >= filter_len) {
    const std::size_t next = dwt_length(n, filter_len, mode);
    if (next < min_approx_length) break;
    ++level;
    n = next;
    if (level >= 64) break;
  }
  return level;
}

/// Multilevel analysis. Requests deeper than the signal supports are clamped
/// with a warning.
template <typename Derived, typename Scalar = typename Derived::Scalar>
WaveletDecomposition<Scalar> wavedec(const Eigen::MatrixBase<Derived>& signal, const WaveletFilterPair<Scalar>& filter,
                                     BoundaryMode mode, int levels, std::size_t min_approx_length = 4) {
  if (levels <= 0) throw Error(ErrorKind::Parameter, "decomposition level must be >= 1");
  const auto n = static_cast<std::size_t>(signal.size());
  const int reachable = max_wavedec_level(n, static_cast<std::size_t>(filter.length()), mode, min_approx_length);
  if (reachable == 0) {
    throw Error(ErrorKind::TooShort, "signal of length " + std::to_string(n) + " cannot be decomposed with " +
                                         filter.family_name);
  }
  if (reachable < levels) {
    warn("wavelet depth clamped from " + std::to_string(levels) + " to " + std::to_string(reachable) +
         " for a signal of " + std::to_string(n) + " samples");
    levels = reachable;
  }

  WaveletDecomposition<Scalar> dec;
  dec.levels = levels;
  dec.boundary_mode = mode;
  dec.filter = filter;
  dec.original_length = n;
  dec.approx = signal;
  for (int j = 0; j < levels; ++j) {
    auto step = dwt_single(dec.approx, filter, mode);
    dec.details.push_back(std::move(step.detail));
    dec.approx = std::move(step.approx);
  }
  return dec;
}

template <typename Scalar>
Vector<Scalar> waverec(const WaveletDecomposition<Scalar>& dec) {
  if (static_cast<int>(dec.details.size()) != dec.levels) {
    throw Error(ErrorKind::Shape, "decomposition holds " + std::to_string(dec.details.size()) +
                                      " detail bands for " + std::to_string(dec.levels) + " levels");
  }
  const auto lengths = dec.input_lengths();
  Vector<Scalar> approx = dec.approx;
  for (int j = dec.levels - 1; j >= 0; --j) {
    approx = idwt_single(approx, dec.details[static_cast<std::size_t>(j)], dec.filter, dec.boundary_mode,
                         lengths[static_cast<std::size_t>(j)]);
  }
  return approx;
}

/// Text layout: a `family,mode,levels,original_length` header row, a
/// `band,length` table for a_J, d_J, ..., d_1, then every coefficient in that
/// order, one per line, printed with 17 significant digits.
void write_decomposition(std::ostream& out, const WaveletDecomposition<double>& dec);
WaveletDecomposition<double> read_decomposition(std::istream& in);

}  // namespace fdaer
