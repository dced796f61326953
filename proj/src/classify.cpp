#include "fdaer/classify.hpp"

#include "fdaer/error.hpp"
#include "fdaer/log.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace fdaer {

ScatterMatrices scatter_matrices(const Eigen::MatrixXd& samples, std::span<const Emotion> labels) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index dim = samples.cols();
  if (static_cast<std::size_t>(n) != labels.size()) throw Error(ErrorKind::Shape, "one label per sample required");

  std::array<Eigen::Index, kEmotionCount> counts{};
  for (Emotion e : labels) ++counts[index_of(e)];
  if (std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) < 2) {
    throw Error(ErrorKind::InsufficientClasses, "scatter needs at least two classes");
  }

  const Eigen::RowVectorXd mean = samples.colwise().mean();
  ScatterMatrices s{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
  for (Emotion e : kAllEmotions) {
    const Eigen::Index nc = counts[index_of(e)];
    if (nc == 0) continue;
    Eigen::MatrixXd members(nc, dim);
    Eigen::Index row = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] == e) members.row(row++) = samples.row(i);
    }
    const Eigen::RowVectorXd class_mean = members.colwise().mean();
    const double prior = static_cast<double>(nc) / static_cast<double>(n);
    const Eigen::RowVectorXd shift = class_mean - mean;
    s.between.noalias() += prior * shift.transpose() * shift;
    const Eigen::MatrixXd centered = members.rowwise() - class_mean;
    s.within.noalias() += (prior / static_cast<double>(nc)) * centered.transpose() * centered;
  }
  // Symmetric up to rounding; force it exactly.
  s.between = 0.5 * (s.between + s.between.transpose()).eval();
  s.within = 0.5 * (s.within + s.within.transpose()).eval();
  return s;
}

Eigen::MatrixXd standardize(const MmcProjection& projection, const Eigen::MatrixXd& samples) {
  if (samples.cols() != projection.feature_mean.size()) throw Error(ErrorKind::Shape, "feature dimension mismatch");
  return (samples.rowwise() - projection.feature_mean.transpose()).array().rowwise() /
         projection.feature_scale.transpose().array();
}

MmcProjection mmc_fit(const Eigen::MatrixXd& samples, std::span<const Emotion> labels, int dims) {
  const Eigen::Index dim = samples.cols();
  if (dims < 1 || dims > dim) {
    throw Error(ErrorKind::Parameter, "MMC dimension " + std::to_string(dims) + " must lie in 1.." + std::to_string(dim));
  }
  if (samples.rows() == 0) throw Error(ErrorKind::InsufficientData, "no training samples");

  MmcProjection p;
  p.feature_mean = samples.colwise().mean().transpose();
  p.feature_scale.resize(dim);
  const Eigen::MatrixXd centered = samples.rowwise() - p.feature_mean.transpose();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double var = samples.rows() > 1 ? centered.col(j).squaredNorm() / static_cast<double>(samples.rows() - 1) : 0.0;
    if (var > 0) {
      p.feature_scale[j] = std::sqrt(var);
    } else {
      warn("feature " + std::to_string(j) + " has zero variance; scale set to 1");
      p.feature_scale[j] = 1.0;
    }
  }

  const ScatterMatrices s = scatter_matrices(standardize(p, samples), labels);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s.between - s.within);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::Model, "eigendecomposition failed");

  // Eigen sorts ascending.
  p.basis.resize(dim, dims);
  p.eigenvalues.resize(dims);
  for (int c = 0; c < dims; ++c) {
    const Eigen::Index src = dim - 1 - c;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    p.basis.col(c) = v;
    p.eigenvalues[c] = solver.eigenvalues()[src];
  }
  return p;
}

Eigen::VectorXd mmc_project(const MmcProjection& projection, const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != projection.input_dim()) {
    throw Error(ErrorKind::Shape, "vector of length " + std::to_string(v.size()) + " does not match projection input " +
                                      std::to_string(projection.input_dim()));
  }
  const Eigen::VectorXd z = (v - projection.feature_mean).cwiseQuotient(projection.feature_scale);
  return projection.basis.transpose() * z;
}

double mmc_objective(const Eigen::MatrixXd& basis, const ScatterMatrices& scatter) {
  return (basis.transpose() * (scatter.between - scatter.within) * basis).trace();
}

Emotion knn_predict(const Exemplars& exemplars, const Eigen::Ref<const Eigen::VectorXd>& query, int k) {
  const Eigen::Index n = exemplars.points.rows();
  if (n == 0) throw Error(ErrorKind::Model, "no exemplars");
  if (k < 1 || k > n) throw Error(ErrorKind::Parameter, "k must lie in 1.." + std::to_string(n));
  if (query.size() != exemplars.points.cols()) throw Error(ErrorKind::Shape, "query dimension mismatch");

  const Eigen::VectorXd dist = (exemplars.points.rowwise() - query.transpose()).rowwise().norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  });

  std::array<int, kEmotionCount> votes{};
  std::array<double, kEmotionCount> summed{};
  for (int i = 0; i < k; ++i) {
    const Eigen::Index idx = order[static_cast<std::size_t>(i)];
    const std::size_t label = index_of(exemplars.labels[static_cast<std::size_t>(idx)]);
    ++votes[label];
    summed[label] += dist[idx];
  }

  std::optional<Emotion> best;
  for (Emotion e : kAllEmotions) {
    const std::size_t i = index_of(e);
    if (votes[i] == 0) continue;
    if (!best) {
      best = e;
      continue;
    }
    const std::size_t b = index_of(*best);
    const bool better = votes[i] > votes[b] || (votes[i] == votes[b] && summed[i] < summed[b]) ||
                        (votes[i] == votes[b] && summed[i] == summed[b] && to_string(e) < to_string(*best));
    if (better) best = e;
  }
  return *best;
}

namespace {

Eigen::VectorXd classifier_input(const FeatureVector& v, bool include_screen) {
  return include_screen ? v.concatenated() : v.fd;
}

}  // namespace

EmotionModel fit_model(std::span<const LabeledFeatures> train, const ModelConfig& config) {
  if (train.empty()) throw Error(ErrorKind::InsufficientData, "empty training set");
  if (config.mmc_dim < 1) throw Error(ErrorKind::Parameter, "MMC dimension must be >= 1");
  if (config.knn_k < 1 || static_cast<std::size_t>(config.knn_k) > train.size()) {
    throw Error(ErrorKind::Parameter, "k must lie in 1.." + std::to_string(train.size()));
  }

  EmotionModel model;
  model.levels = train.front().features.levels;
  model.layout_version = train.front().features.layout_version;
  model.include_screen_features = config.include_screen_features;
  model.k = config.knn_k;

  const Eigen::Index dim = classifier_input(train.front().features, config.include_screen_features).size();
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(train.size()), dim);
  std::vector<Emotion> labels;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& f = train[i].features;
    if (f.levels != model.levels || f.layout_version != model.layout_version) {
      throw Error(ErrorKind::Shape, "training vectors mix feature layouts");
    }
    samples.row(static_cast<Eigen::Index>(i)) = classifier_input(f, config.include_screen_features).transpose();
    labels.push_back(train[i].emotion);
  }

  if (config.use_cascade) model.cascade = fit_cascade(train, config.cascade_order);
  model.projection = mmc_fit(samples, labels, config.mmc_dim);
  model.exemplars.points = standardize(model.projection, samples) * model.projection.basis;
  model.exemplars.labels = std::move(labels);
  return model;
}

Emotion predict(const EmotionModel& model, const FeatureVector& v) {
  if (v.levels != model.levels || v.layout_version != model.layout_version ||
      v.fd.size() != 2 * model.levels + 1) {
    throw Error(ErrorKind::Shape, "feature vector layout does not match the model");
  }
  if (model.cascade) {
    if (auto screened = apply_cascade(*model.cascade, v)) return *screened;
  }
  return knn_predict(model.exemplars, mmc_project(model.projection, classifier_input(v, model.include_screen_features)),
                     model.k);
}

namespace {

void write_row(std::ostream& out, const char* key, const Eigen::VectorXd& v) {
  out << key;
  for (double x : v) out << ' ' << x;
  out << '\n';
}

std::istringstream next_record(std::istream& in, const std::string& key) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) break;
  }
  std::istringstream s(line);
  std::string found;
  s >> found;
  if (found != key) throw Error(ErrorKind::Format, "model file: expected '" + key + "', found '" + found + "'");
  return s;
}

template <typename T>
T read_value(std::istringstream& s, const std::string& what) {
  T v{};
  if (!(s >> v)) throw Error(ErrorKind::Format, "model file: bad value for " + what);
  return v;
}

Eigen::VectorXd read_vector(std::istream& in, const std::string& key, Eigen::Index n) {
  auto s = next_record(in, key);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = read_value<double>(s, key);
  return v;
}

Emotion read_emotion(std::istringstream& s) {
  auto e = parse_emotion(read_value<std::string>(s, "label"));
  if (!e) throw Error(ErrorKind::Format, "model file: unknown label");
  return *e;
}

}  // namespace

void save_model(std::ostream& out, const EmotionModel& model, const std::map<std::string, std::string>& metadata) {
  const auto& p = model.projection;
  out << std::setprecision(17);
  out << "fdaer-model 1\n";
  for (const auto& [key, value] : metadata) out << "meta " << key << ' ' << value << '\n';
  out << "layout_version " << model.layout_version << '\n'
      << "levels " << model.levels << '\n'
      << "feature_set " << (model.include_screen_features ? "all" : "fd") << '\n'
      << "input_dim " << p.input_dim() << '\n'
      << "reduced_dim " << p.output_dim() << '\n'
      << "k " << model.k << '\n';
  write_row(out, "feature_mean", p.feature_mean);
  write_row(out, "feature_scale", p.feature_scale);
  write_row(out, "eigenvalues", p.eigenvalues);
  out << "basis\n";
  for (Eigen::Index i = 0; i < p.basis.rows(); ++i) write_row(out, "row", p.basis.row(i).transpose());
  out << "exemplars " << model.exemplars.points.rows() << '\n';
  for (Eigen::Index i = 0; i < model.exemplars.points.rows(); ++i) {
    out << to_string(model.exemplars.labels[static_cast<std::size_t>(i)]);
    for (double x : model.exemplars.points.row(i)) out << ' ' << x;
    out << '\n';
  }
  const std::size_t stages = model.cascade ? model.cascade->stages.size() : 0;
  out << "cascade " << (model.cascade ? "on" : "off") << ' ' << stages << '\n';
  if (model.cascade) {
    for (const auto& s : model.cascade->stages) {
      out << "stage " << to_string(s.target) << ' ' << s.feature_index << ' ' << to_string(s.direction) << ' '
          << s.threshold << ' ' << s.margin << '\n';
    }
  }
  out << "end\n";
  if (!out) throw Error(ErrorKind::Io, "failed to write model");
}

LoadedModel load_model(std::istream& in) {
  LoadedModel loaded;
  EmotionModel& m = loaded.model;

  std::string line;
  if (!std::getline(in, line) || line.rfind("fdaer-model ", 0) != 0) throw Error(ErrorKind::Format, "not a model file");
  if (line != "fdaer-model 1") throw Error(ErrorKind::Format, "unsupported model version '" + line.substr(12) + "'");

  // Metadata lines precede the fixed body.
  std::streampos pos = in.tellg();
  while (std::getline(in, line)) {
    if (line.rfind("meta ", 0) != 0) break;
    std::istringstream s(line.substr(5));
    std::string key;
    s >> key;
    std::string value;
    std::getline(s >> std::ws, value);
    loaded.metadata[key] = value;
    pos = in.tellg();
  }
  in.clear();
  in.seekg(pos);

  { auto s = next_record(in, "layout_version"); m.layout_version = read_value<int>(s, "layout_version"); }
  { auto s = next_record(in, "levels"); m.levels = read_value<int>(s, "levels"); }
  {
    auto s = next_record(in, "feature_set");
    const auto set = read_value<std::string>(s, "feature_set");
    if (set != "fd" && set != "all") throw Error(ErrorKind::Format, "model file: bad feature_set");
    m.include_screen_features = set == "all";
  }
  Eigen::Index input_dim = 0, reduced = 0;
  { auto s = next_record(in, "input_dim"); input_dim = read_value<Eigen::Index>(s, "input_dim"); }
  { auto s = next_record(in, "reduced_dim"); reduced = read_value<Eigen::Index>(s, "reduced_dim"); }
  { auto s = next_record(in, "k"); m.k = read_value<int>(s, "k"); }
  if (input_dim < 1 || reduced < 1 || reduced > input_dim) throw Error(ErrorKind::Format, "model file: bad dimensions");

  auto& p = m.projection;
  p.feature_mean = read_vector(in, "feature_mean", input_dim);
  p.feature_scale = read_vector(in, "feature_scale", input_dim);
  p.eigenvalues = read_vector(in, "eigenvalues", reduced);
  next_record(in, "basis");
  p.basis.resize(input_dim, reduced);
  for (Eigen::Index i = 0; i < input_dim; ++i) p.basis.row(i) = read_vector(in, "row", reduced).transpose();

  Eigen::Index count = 0;
  { auto s = next_record(in, "exemplars"); count = read_value<Eigen::Index>(s, "exemplars"); }
  m.exemplars.points.resize(count, reduced);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw Error(ErrorKind::Format, "model file: truncated exemplars");
    std::istringstream s(line);
    m.exemplars.labels.push_back(read_emotion(s));
    for (Eigen::Index j = 0; j < reduced; ++j) m.exemplars.points(i, j) = read_value<double>(s, "exemplar");
  }

  auto s = next_record(in, "cascade");
  const auto state = read_value<std::string>(s, "cascade");
  const auto stages = read_value<std::size_t>(s, "cascade");
  if (state == "on") {
    ScreeningCascade cascade;
    for (std::size_t i = 0; i < stages; ++i) {
      auto r = next_record(in, "stage");
      ScreeningStage stage{};
      stage.target = read_emotion(r);
      stage.feature_index = read_value<std::size_t>(r, "stage");
      auto dir = parse_direction(read_value<std::string>(r, "stage"));
      if (!dir) throw Error(ErrorKind::Format, "model file: bad stage direction");
      stage.direction = *dir;
      stage.threshold = read_value<double>(r, "stage");
      stage.margin = read_value<double>(r, "stage");
      cascade.stages.push_back(stage);
    }
    m.cascade = std::move(cascade);
  }
  next_record(in, "end");
  if (m.k < 1 || m.k > count) throw Error(ErrorKind::Format, "model file: k exceeds exemplar count");
  return loaded;
}

}  // namespace fdaer
