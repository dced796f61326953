#include <doctest.h>

#include "fdaer/classify.hpp"
#include "fdaer/log.hpp"
#include "oracles.hpp"

#include <numbers>
#include <sstream>

using namespace fdaer;

namespace {

Eigen::MatrixXd random_rows(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

// Class c is shifted by 0.5c on every fd feature and by a further 3c on
// feature c mod 5.
std::vector<LabeledFeatures> toy_corpus(int per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.3);
  std::vector<LabeledFeatures> out;
  for (auto e : kAllEmotions) {
    const auto c = static_cast<double>(index_of(e));
    for (int i = 0; i < per_class; ++i) {
      LabeledFeatures s{{}, e};
      s.features.levels = 2;
      s.features.fd.resize(5);
      for (Eigen::Index j = 0; j < 5; ++j) {
        const bool owned = j == static_cast<Eigen::Index>(index_of(e)) % 5;
        s.features.fd[j] = normal(rng) + 0.5 * c + (owned ? 3.0 * c : 0.0);
      }
      s.features.screen = Eigen::VectorXd::Zero(kScreenFeatureCount);
      for (Eigen::Index j = 0; j < kScreenFeatureCount; ++j) s.features.screen[j] = normal(rng);
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("scatter of a two-point, two-class example") {
  Eigen::MatrixXd x(4, 1);
  x << 0, 2, 10, 12;
  const std::vector<Emotion> y = {Emotion::Angry, Emotion::Angry, Emotion::Sad, Emotion::Sad};
  const auto s = scatter_matrices(x, y);
  CHECK(s.between(0, 0) == doctest::Approx(25.0));
  CHECK(s.within(0, 0) == doctest::Approx(1.0));
  const std::vector<Emotion> one(4, Emotion::Fear);
  CHECK_THROWS_AS(scatter_matrices(x, one), Error);
}

TEST_CASE("between plus within equals total scatter") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd x = random_rows(60, 4, rng);
  std::vector<Emotion> y;
  for (int i = 0; i < 60; ++i) y.push_back(kAllEmotions[static_cast<std::size_t>(i * 7 % 5)]);
  const auto s = scatter_matrices(x, y);
  const Eigen::MatrixXd centred = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd total = centred.transpose() * centred / 60.0;
  CHECK((s.between + s.within - total).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.between - s.between.transpose()).norm() == 0.0);
}

TEST_CASE("MMC recovers a tilted discriminant direction") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0.0, 0.05);
  const double angle = 5.0 * std::numbers::pi / 180.0;
  Eigen::MatrixXd x(200, 2);
  std::vector<Emotion> y;
  for (Eigen::Index i = 0; i < 200; ++i) {
    const double side = i < 100 ? -1.0 : 1.0;
    x(i, 0) = side * 10.0 * std::cos(angle) + noise(rng);
    x(i, 1) = side * 10.0 * std::sin(angle) + noise(rng);
    y.push_back(i < 100 ? Emotion::Happy : Emotion::Sad);
  }
  const auto p = mmc_fit(x, y, 1);
  // the class offset as seen after standardisation
  Eigen::Vector2d dir(std::cos(angle) / p.feature_scale[0], std::sin(angle) / p.feature_scale[1]);
  dir.normalize();
  const double cosine = std::abs(p.basis.col(0).dot(dir));
  CHECK(cosine > std::cos(std::numbers::pi / 180.0));
  CHECK(p.basis.col(0).cwiseAbs().maxCoeff() == p.basis.col(0).maxCoeff());
}

TEST_CASE("MMC basis, objective and spectrum") {
  std::mt19937_64 rng(3);
  for (Eigen::Index dim : {4, 9, 17}) {
    const Eigen::MatrixXd x = random_rows(120, dim, rng);
    std::vector<Emotion> y;
    for (int i = 0; i < 120; ++i) y.push_back(kAllEmotions[static_cast<std::size_t>(i % 6)]);
    const int d = 3;
    const auto p = mmc_fit(x, y, d);
    CHECK(p.basis.rows() == dim);
    CHECK(p.basis.cols() == d);
    CHECK((p.basis.transpose() * p.basis - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-8);
    const auto scatter = scatter_matrices(standardize(p, x), y);
    CHECK(std::abs(mmc_objective(p.basis, scatter) - p.eigenvalues.head(d).sum()) < 1e-8);
    const Eigen::VectorXd ref = oracle::jacobi_eigenvalues(scatter.between - scatter.within);
    CHECK((p.eigenvalues.head(d) - ref.head(d)).cwiseAbs().maxCoeff() < 1e-6);
    for (Eigen::Index i = 1; i < p.eigenvalues.size(); ++i) CHECK(p.eigenvalues[i] <= p.eigenvalues[i - 1]);
  }
}

TEST_CASE("MMC input checks and projection") {
  std::mt19937_64 rng(4);
  Eigen::MatrixXd x = random_rows(30, 4, rng);
  x.col(2).setConstant(5.0);
  std::vector<Emotion> y;
  for (int i = 0; i < 30; ++i) y.push_back(i % 2 ? Emotion::Fear : Emotion::Angry);
  CHECK_THROWS_AS(mmc_fit(x, y, 0), Error);
  CHECK_THROWS_AS(mmc_fit(x, y, 5), Error);
  WarningCapture warnings;
  const auto p = mmc_fit(x, y, 2);
  CHECK(warnings.contains("variance"));
  CHECK(p.feature_scale[2] == 1.0);
  CHECK(mmc_project(p, p.feature_mean).norm() < 1e-12);
  CHECK_THROWS_AS(mmc_project(p, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("KNN votes and tie rules") {
  Exemplars ex;
  ex.points.resize(4, 1);
  ex.points << 0, 1, 10, 12;
  ex.labels = {Emotion::Sad, Emotion::Sad, Emotion::Angry, Emotion::Angry};
  Eigen::VectorXd q(1);
  q << 2;
  CHECK(knn_predict(ex, q, 1) == Emotion::Sad);
  CHECK(knn_predict(ex, q, 3) == Emotion::Sad);
  q << 11;
  CHECK(knn_predict(ex, q, 2) == Emotion::Angry);

  // one vote each: the closer label wins
  q << 6;
  CHECK(knn_predict(ex, q, 2) == Emotion::Angry);
  ex.points << -1, 0, 2, 20;
  q << 1;
  // distances 2, 1, 1: neighbours {sad@0, angry@2} tie on votes and distance
  CHECK(knn_predict(ex, q, 2) == Emotion::Angry);

  CHECK_THROWS_AS(knn_predict(ex, q, 0), Error);
  CHECK_THROWS_AS(knn_predict(ex, q, 5), Error);
  CHECK_THROWS_AS(knn_predict(ex, Eigen::VectorXd::Zero(2), 1), Error);
  CHECK_THROWS_AS(knn_predict(Exemplars{}, q, 1), Error);
}

TEST_CASE("nearest neighbour reproduces its training set") {
  std::mt19937_64 rng(5);
  Exemplars ex;
  ex.points = random_rows(50, 3, rng);
  for (int i = 0; i < 50; ++i) ex.labels.push_back(kAllEmotions[static_cast<std::size_t>(i % 6)]);
  for (Eigen::Index i = 0; i < 50; ++i) {
    CHECK(knn_predict(ex, ex.points.row(i).transpose(), 1) == ex.labels[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("model fit and predict on separable clusters") {
  const auto train = toy_corpus(20, 6);
  const auto test = toy_corpus(10, 7);
  ModelConfig cfg;
  cfg.use_cascade = false;
  cfg.mmc_dim = 4;
  const auto model = fit_model(train, cfg);
  int correct = 0;
  for (const auto& s : test) correct += predict(model, s.features) == s.emotion;
  CHECK(correct >= 57);

  cfg.mmc_dim = 0;
  CHECK_THROWS_AS(fit_model(train, cfg), Error);
  cfg.mmc_dim = 4;
  cfg.include_screen_features = true;
  const auto wide = fit_model(train, cfg);
  CHECK(wide.projection.input_dim() == 11);
}

TEST_CASE("training order does not matter") {
  auto train = toy_corpus(15, 8);
  const auto test = toy_corpus(5, 9);
  ModelConfig cfg;
  cfg.use_cascade = false;
  const auto a = fit_model(train, cfg);
  std::mt19937_64 rng(10);
  std::shuffle(train.begin(), train.end(), rng);
  const auto b = fit_model(train, cfg);
  for (const auto& s : test) CHECK(predict(a, s.features) == predict(b, s.features));
}

TEST_CASE("saved models predict identically") {
  const auto train = toy_corpus(15, 11);
  const auto test = toy_corpus(5, 12);
  ModelConfig cfg;
  cfg.cascade_order = {{Emotion::Angry, kTeoMean, Direction::Greater}};
  const auto model = fit_model(train, cfg);
  std::stringstream ss;
  save_model(ss, model, {{"note", "toy"}});
  CHECK(ss.str().rfind("fdaer-model 1", 0) == 0);
  const auto loaded = load_model(ss);
  CHECK(loaded.metadata.at("note") == "toy");
  CHECK(loaded.model.cascade.has_value());
  for (const auto& s : test) CHECK(predict(model, s.features) == predict(loaded.model, s.features));

  std::stringstream bad("fdaer-model 9\n");
  CHECK_THROWS_AS(load_model(bad), Error);

  FeatureVector wrong = test.front().features;
  wrong.fd.resize(3);
  CHECK_THROWS_AS(predict(model, wrong), Error);
}

TEST_CASE("scatter hand examples") {
  Eigen::MatrixXd x(2, 2);
  x << -1, 0, 1, 0;
  const std::vector<Emotion> y = {Emotion::Fear, Emotion::Sad};
  const auto s = scatter_matrices(x, y);
  CHECK(s.within.isZero(0));
  CHECK(s.between.isApprox(Eigen::Matrix2d{{1, 0}, {0, 0}}));

  const Eigen::MatrixXd same = Eigen::MatrixXd::Constant(6, 3, 2.5);
  const std::vector<Emotion> z = {Emotion::Fear, Emotion::Sad, Emotion::Fear, Emotion::Sad, Emotion::Happy, Emotion::Happy};
  const auto t = scatter_matrices(same, z);
  CHECK(t.between.isZero(1e-15));
  CHECK(t.within.isZero(1e-15));

  std::mt19937_64 rng(40);
  const Eigen::MatrixXd r = random_rows(90, 7, rng);
  std::vector<Emotion> labels;
  for (int i = 0; i < 90; ++i) labels.push_back(kAllEmotions[static_cast<std::size_t>(i % 6)]);
  const auto u = scatter_matrices(r, labels);
  const Eigen::MatrixXd centred = r.rowwise() - r.colwise().mean();
  CHECK(std::abs(u.between.trace() + u.within.trace() - (centred.transpose() * centred).trace() / 90.0) < 1e-9);
}

TEST_CASE("MMC direction in five dimensions") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> noise(0.0, 0.2);
  Eigen::VectorXd offset(5);
  offset << 3.0, -1.0, 0.5, 2.0, 0.0;
  Eigen::MatrixXd x(300, 5);
  std::vector<Emotion> y;
  for (Eigen::Index i = 0; i < 300; ++i) {
    const double side = i % 2 ? 1.0 : -1.0;
    for (Eigen::Index j = 0; j < 5; ++j) x(i, j) = side * offset[j] + noise(rng);
    y.push_back(i % 2 ? Emotion::Happy : Emotion::Angry);
  }
  const auto p = mmc_fit(x, y, 1);
  const Eigen::MatrixXd z = standardize(p, x);
  Eigen::VectorXd diff = Eigen::VectorXd::Zero(5);
  for (Eigen::Index i = 0; i < 300; ++i) diff += (i % 2 ? 1.0 : -1.0) * z.row(i).transpose();
  diff.normalize();
  CHECK(std::abs(p.basis.col(0).dot(diff)) > std::cos(5.0 * std::numbers::pi / 180.0));

  const auto full = mmc_fit(x, y, 5);
  const auto scatter = scatter_matrices(z, y);
  CHECK(std::abs(mmc_objective(full.basis, scatter) - (scatter.between - scatter.within).trace()) < 1e-8);
}

TEST_CASE("KNN majority and label tie") {
  Exemplars ex;
  ex.points.resize(3, 1);
  ex.points << 0.0, 0.1, -0.2;
  ex.labels = {Emotion::Happy, Emotion::Happy, Emotion::Sad};
  CHECK(knn_predict(ex, Eigen::VectorXd::Zero(1), 3) == Emotion::Happy);

  Exemplars tie;
  tie.points.resize(2, 1);
  tie.points << 1.0, -1.0;
  tie.labels = {Emotion::Sad, Emotion::Fear};
  CHECK(knn_predict(tie, Eigen::VectorXd::Zero(1), 2) == Emotion::Fear);
}

TEST_CASE("KNN is unchanged by uniform scaling of the reduced space") {
  std::mt19937_64 rng(42);
  Exemplars ex;
  ex.points = random_rows(60, 4, rng);
  for (int i = 0; i < 60; ++i) ex.labels.push_back(kAllEmotions[static_cast<std::size_t>(i % 6)]);
  Exemplars scaled = ex;
  scaled.points *= 7.5;
  for (int t = 0; t < 40; ++t) {
    const Eigen::VectorXd q = random_rows(1, 4, rng).transpose();
    CHECK(knn_predict(ex, q, 3) == knn_predict(scaled, Eigen::VectorXd(7.5 * q), 3));
  }
}

TEST_CASE("single-speaker sized model") {
  auto train = toy_corpus(15, 43);
  REQUIRE(train.size() == 90);
  ModelConfig cfg;
  cfg.use_cascade = false;
  const auto model = fit_model(train, cfg);
  CHECK(model.exemplars.points.rows() == 90);
  CHECK(model.exemplars.points.cols() == 5);
  CHECK_FALSE(model.cascade.has_value());
  for (const auto& s : toy_corpus(3, 44)) {
    const Eigen::VectorXd z = mmc_project(model.projection, s.features.fd);
    CHECK(predict(model, s.features) == knn_predict(model.exemplars, z, model.k));
  }
}

TEST_CASE("cascade takes precedence over the classifier") {
  auto train = toy_corpus(15, 45);
  for (auto& s : train) s.features.screen[kTeoMean] = s.emotion == Emotion::Angry ? 10.0 : 0.0;
  ModelConfig cfg;
  cfg.cascade_order = {{Emotion::Angry, kTeoMean, Direction::Greater}};
  const auto model = fit_model(train, cfg);
  auto v = toy_corpus(1, 46)[2].features;  // the fear cluster
  v.screen[kTeoMean] = 9.0;
  CHECK(predict(model, v) == Emotion::Angry);
  v.screen[kTeoMean] = 1.0;
  CHECK(predict(model, v) != Emotion::Angry);
}

TEST_CASE("fit is order and scale invariant") {
  auto train = toy_corpus(15, 47);
  const auto test = toy_corpus(5, 48);
  ModelConfig cfg;
  cfg.use_cascade = false;
  const auto a = fit_model(train, cfg);
  std::mt19937_64 rng(49);
  std::shuffle(train.begin(), train.end(), rng);
  const auto b = fit_model(train, cfg);
  CHECK((a.projection.eigenvalues - b.projection.eigenvalues).cwiseAbs().maxCoeff() < 1e-8);

  for (auto& s : train) s.features.fd *= 3.0;
  const auto c = fit_model(train, cfg);
  for (const auto& s : test) {
    auto scaled = s.features;
    scaled.fd *= 3.0;
    CHECK(predict(a, s.features) == predict(c, scaled));
    CHECK(predict(a, s.features) == predict(a, s.features));
  }
}
