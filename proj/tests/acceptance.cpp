// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when any blocking criterion fails. The SAVEE check only runs when
// FDAER_SAVEE_DIR points at the corpus root and never affects the status.

#include "fdaer/classify.hpp"
#include "fdaer/eval.hpp"
#include "fdaer/fractal.hpp"
#include "fdaer/log.hpp"
#include "fdaer/synth.hpp"
#include "fdaer/wavelet.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

using namespace fdaer;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void verdict(int id, bool ok, const std::string& what, bool blocking = true) {
  std::printf("%s [%d] %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok && blocking) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void perfect_reconstruction() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<Eigen::Index> length(64, 22050);
  const WaveletFamily families[] = {WaveletFamily::Haar, WaveletFamily::Db2, WaveletFamily::Db4, WaveletFamily::Db8};
  const BoundaryMode modes[] = {BoundaryMode::Symmetric, BoundaryMode::Periodic, BoundaryMode::Zero};
  double worst = 0;
  long trips = 0;
  WarningCapture quiet;
  for (int s = 0; s < 1000; ++s) {
    const Eigen::VectorXd x = oracle::gaussian(length(rng), rng);
    for (auto fam : families) {
      const auto f = filter_coeffs(fam);
      for (auto mode : modes) {
        for (int j = 1; j <= 6; ++j) {
          const auto dec = wavedec(x, f, mode, j, 1);
          worst = std::max(worst, (waverec(dec) - x).cwiseAbs().maxCoeff());
          ++trips;
        }
      }
    }
  }
  const double t = seconds_since(t0);
  verdict(1, worst < 1e-8 && t < 60,
          fmt("perfect reconstruction: max abs error %.3e over %ld round trips (1000 signals x 4 families x 3 "
              "modes x J=1..6), %.1f s",
              worst, trips, t));
}

void higuchi_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<Eigen::Index> length(64, 2048);
  double worst_len = 0, worst_rel = 0, worst_fd = 0;
  for (int s = 0; s < 100; ++s) {
    const Eigen::VectorXd x = oracle::gaussian(length(rng), rng);
    const auto xs = oracle::to_std(x);
    for (int k = 1; k <= 16; ++k) {
      const double ref = oracle::higuchi_mean_length(xs, k);
      const double err = std::abs(higuchi_lengths(x, k) - ref);
      worst_len = std::max(worst_len, err);
      worst_rel = std::max(worst_rel, err / ref);
    }
    worst_fd = std::max(worst_fd, std::abs(higuchi_fd(x, {16, std::nullopt}).dimension -
                                           oracle::higuchi_dimension(xs, 16)));
  }
  verdict(2, worst_len < 1e-10 && worst_fd < 1e-10,
          fmt("Higuchi oracle: max |<L(k)> - ref| %.3e (relative %.3e), max |D - ref| %.3e over 100 series x "
              "k=1..16, %.2f s",
              worst_len, worst_rel, worst_fd, seconds_since(t0)));
}

void fd_calibration() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1003);
  const HiguchiConfig cfg{16, std::nullopt};
  bool ok = true;
  std::string detail;
  for (double h : {0.2, 0.5, 0.8}) {
    double mean = 0;
    for (int s = 0; s < 50; ++s) mean += higuchi_fd(fractional_brownian_motion(8192, h, rng), cfg).dimension;
    mean /= 50;
    ok = ok && std::abs(mean - (2 - h)) <= 0.10;
    detail += fmt("H=%.1f mean %.4f (target %.1f); ", h, mean, 2 - h);
  }
  double noise = 0;
  for (int s = 0; s < 50; ++s) noise += higuchi_fd(oracle::gaussian(8192, rng), cfg).dimension;
  noise /= 50;
  ok = ok && noise >= 1.9 && noise <= 2.05;
  detail += fmt("white noise %.4f", noise);
  const double t = seconds_since(t0);
  verdict(3, ok && t < 120, "FD calibration: " + detail + fmt(", %.1f s", t));
}

void katz_exactness() {
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> coeff(-1000.0, 1000.0);
  double worst = 0;
  int cases = 0;
  for (Eigen::Index n : {10, 100, 10000}) {
    for (int t = 0; t < 50; ++t) {
      const double slope = t == 0 ? 0.0 : coeff(rng) * std::pow(10.0, -(t % 7));
      const double intercept = coeff(rng);
      const Eigen::VectorXd x = (slope * Eigen::VectorXd::LinSpaced(n, 0, static_cast<double>(n - 1))).array() + intercept;
      worst = std::max(worst, std::abs(katz_fd(x) - 1.0));
      ++cases;
    }
  }
  verdict(4, worst < 1e-9, fmt("Katz exactness: max |D - 1| %.3e over %d affine series (N=10, 100, 10000)", worst, cases));
}

void mmc_identities() {
  std::mt19937_64 rng(1005);
  std::normal_distribution<double> normal;
  double ortho = 0, objective = 0, spectrum = 0;
  int cases = 0;
  for (Eigen::Index dim = 4; dim <= 17; ++dim) {
    for (int rep = 0; rep < 5; ++rep) {
      const Eigen::Index n = 12 * dim;
      Eigen::MatrixXd x(n, dim);
      std::vector<Emotion> y;
      for (Eigen::Index i = 0; i < n; ++i) {
        y.push_back(kAllEmotions[static_cast<std::size_t>(i % 6)]);
        for (Eigen::Index j = 0; j < dim; ++j) x(i, j) = normal(rng) * (1.0 + j) + 0.7 * static_cast<double>((i % 6) * (j % 3));
      }
      const int d = 1 + static_cast<int>((dim + rep) % dim);
      const auto p = mmc_fit(x, y, d);
      const auto scatter = scatter_matrices(standardize(p, x), y);
      ortho = std::max(ortho, (p.basis.transpose() * p.basis - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff());
      objective = std::max(objective, std::abs(mmc_objective(p.basis, scatter) - p.eigenvalues.head(d).sum()));
      const Eigen::VectorXd ref = oracle::jacobi_eigenvalues(scatter.between - scatter.within);
      spectrum = std::max(spectrum, (p.eigenvalues - ref.head(p.eigenvalues.size())).cwiseAbs().maxCoeff());
      ++cases;
    }
  }
  verdict(5, ortho < 1e-8 && objective < 1e-8 && spectrum < 1e-6,
          fmt("MMC identities: orthonormality %.3e, objective vs top-d eigenvalues %.3e, eigenvalues vs Jacobi "
              "%.3e over %d instances (4x4..17x17)",
              ortho, objective, spectrum, cases));
}

void synthetic_end_to_end() {
  const auto t0 = Clock::now();
  const auto corpus = [] {
    WarningCapture quiet;
    return extract_corpus(generate_synthetic(default_synth_spec()), FeatureConfig{});
  }();
  ExperimentConfig on;
  const auto with = run_protocol(corpus, ProtocolKind::OneVsThree, on);
  ExperimentConfig off;
  off.model.use_cascade = false;
  const auto without = run_protocol(corpus, ProtocolKind::OneVsThree, off);
  const double t = seconds_since(t0);
  verdict(6, with.mean_accuracy >= 0.90 && t < 300,
          fmt("synthetic end-to-end: one_vs_three mean accuracy %.4f (best %.4f) over %zu clips; cascade-off "
              "ablation mean %.4f (best %.4f); %.1f s",
              with.mean_accuracy, with.best_accuracy, corpus.records.size(), without.mean_accuracy,
              without.best_accuracy, t));
}

void savee_ranges() {
  const char* root = std::getenv("FDAER_SAVEE_DIR");
  if (!root || !*root) {
    std::printf("SKIP [7] SAVEE ranges: FDAER_SAVEE_DIR not set (non-blocking)\n");
    return;
  }
  try {
    WarningCapture quiet;
    const auto manifest = load_manifest(root, ManifestLayout::SaveeDirs);
    const auto corpus = extract_corpus(manifest, FeatureConfig{});
    const ExperimentConfig cfg;
    const auto one = run_protocol(corpus, ProtocolKind::OneVsThree, cfg);
    const auto two = run_protocol(corpus, ProtocolKind::TwoVsTwo, cfg);
    const bool ok = one.best_accuracy >= 0.35 && one.best_accuracy <= 0.55 && two.best_accuracy >= 0.40 &&
                    two.best_accuracy <= 0.60;
    verdict(7, ok,
            fmt("SAVEE ranges (non-blocking): one_vs_three best %.4f in [0.35, 0.55], two_vs_two best %.4f in "
                "[0.40, 0.60], %zu utterances",
                one.best_accuracy, two.best_accuracy, corpus.records.size()),
            false);
  } catch (const std::exception& e) {
    verdict(7, false, std::string("SAVEE ranges (non-blocking): ") + e.what(), false);
  }
}

}  // namespace

int main() {
  perfect_reconstruction();
  higuchi_oracle();
  fd_calibration();
  katz_exactness();
  mmc_identities();
  synthetic_end_to_end();
  savee_ranges();
  std::printf("%s: %d blocking failure(s)\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
