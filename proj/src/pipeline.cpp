#include "fdaer/pipeline.hpp"

#include "fdaer/error.hpp"
#include "fdaer/fractal.hpp"
#include "fdaer/log.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fdaer {

std::string_view to_string(FdMethod method) { return method == FdMethod::Higuchi ? "higuchi" : "katz"; }

std::optional<FdMethod> parse_fd_method(std::string_view name) {
  if (name == "higuchi") return FdMethod::Higuchi;
  if (name == "katz") return FdMethod::Katz;
  return std::nullopt;
}

std::string_view to_string(Direction d) { return d == Direction::Greater ? "greater" : "less"; }

std::optional<Direction> parse_direction(std::string_view name) {
  if (name == "greater") return Direction::Greater;
  if (name == "less") return Direction::Less;
  return std::nullopt;
}

Eigen::VectorXd FeatureVector::concatenated() const {
  Eigen::VectorXd all(fd.size() + screen.size());
  all << fd, screen;
  return all;
}

std::vector<std::string> feature_names(int levels) {
  std::vector<std::string> names;
  for (int j = 1; j <= levels; ++j) names.push_back("fd_d" + std::to_string(j));
  for (int j = 1; j <= levels; ++j) names.push_back("fd_a" + std::to_string(j));
  names.emplace_back("fd_raw");
  for (const char* s : {"le_mean", "le_std", "teo_mean", "teo_std", "zcr_mean", "pitch_mean"}) names.emplace_back(s);
  return names;
}

namespace {

// Decides whether a band carries no structure relative to the input signal.
bool is_silent(const Eigen::VectorXd& band, double reference_peak) {
  if (band.size() == 0) return true;
  const double range = band.maxCoeff() - band.minCoeff();
  return reference_peak == 0.0 || range <= 1e-10 * reference_peak;
}

// Returns nullopt on the degenerate path.
std::optional<double> band_dimension(const Eigen::VectorXd& band, double reference_peak, FdMethod method, int k_max) {
  if (method == FdMethod::Katz) return katz_fd(band);
  if (is_silent(band, reference_peak)) return std::nullopt;
  try {
    return higuchi_fd(band, HiguchiConfig{k_max, std::nullopt}).dimension;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateSignal) throw;
    return std::nullopt;
  }
}

}  // namespace

FeatureVector extract_features(const AudioClip& clip, const FeatureConfig& config) {
  const Eigen::Index n = clip.samples.size();
  if (n == 0) throw Error(ErrorKind::EmptySignal, "clip " + clip.source_path + " has no samples");
  if (n < 3) throw Error(ErrorKind::TooShort, "clip " + clip.source_path + " is shorter than 3 samples");
  if (config.wavelet.levels <= 0) throw Error(ErrorKind::Parameter, "decomposition level must be >= 1");

  const int levels = config.wavelet.levels;
  const double peak = clip.samples.cwiseAbs().maxCoeff();
  const auto filter = filter_coeffs<double>(config.wavelet.family);
  const std::size_t min_approx =
      config.fd.method == FdMethod::Higuchi ? 2 * static_cast<std::size_t>(config.fd.k_max_subband) : 3;
  const int reachable = max_wavedec_level(static_cast<std::size_t>(n), static_cast<std::size_t>(filter.length()),
                                          config.wavelet.mode, min_approx);
  if (reachable == 0) {
    throw Error(ErrorKind::TooShort, "clip " + clip.source_path + " is too short for a wavelet decomposition");
  }
  if (reachable < levels) {
    warn("wavelet depth clamped from " + std::to_string(levels) + " to " + std::to_string(reachable) + " for " +
         clip.source_path);
  }

  FeatureVector v;
  v.levels = levels;
  v.fd.setConstant(2 * levels + 1, kDegenerateFdSentinel);
  int degenerate = 2 * (levels - std::min(levels, reachable));

  auto fill = [&](Eigen::Index slot, const Eigen::VectorXd& band, int k_max) {
    if (auto d = band_dimension(band, peak, config.fd.method, k_max)) {
      v.fd[slot] = *d;
    } else {
      ++degenerate;
    }
  };
  Eigen::VectorXd approx = clip.samples;
  for (int j = 0; j < std::min(levels, reachable); ++j) {
    auto step = dwt_single(approx, filter, config.wavelet.mode);
    fill(j, step.detail, config.fd.k_max_subband);
    fill(levels + j, step.approx, config.fd.k_max_subband);
    approx = std::move(step.approx);
  }
  fill(2 * levels, clip.samples, config.fd.k_max_raw);
  if (degenerate > 0) {
    warn(std::to_string(degenerate) + " degenerate band(s) in " +
         (clip.source_path.empty() ? std::string("clip") : clip.source_path) + "; FD set to " +
         std::to_string(kDegenerateFdSentinel));
  }

  FrameConfig frames = config.frames;
  if (frames.frame_len > static_cast<std::size_t>(n)) {
    warn("frame length reduced to " + std::to_string(n) + " samples for " + clip.source_path);
    frames.frame_len = static_cast<std::size_t>(n);
  }
  const TrackStats le = track_stats(compute_track(clip, TrackKind::LogEnergy, frames));
  const TrackStats teo = track_stats(compute_track(clip, TrackKind::TeoMean, frames));
  const TrackStats zcr = track_stats(compute_track(clip, TrackKind::Zcr, frames));
  const TrackStats pitch = track_stats(compute_track(clip, TrackKind::Pitch, frames, config.pitch));

  v.screen.resize(kScreenFeatureCount);
  v.screen << le.mean, le.std, teo.mean, teo.std, zcr.mean, pitch.present ? pitch.mean : 0.0;
  v.pitch_present = pitch.present;
  return v;
}

bool ScreeningStage::fires(const FeatureVector& v) const {
  if (!(margin > 0)) return false;
  const double x = v.screen[static_cast<Eigen::Index>(feature_index)];
  return direction == Direction::Greater ? x > threshold : x < threshold;
}

std::vector<StageSpec> default_cascade_order() {
  return {{Emotion::Angry, kTeoMean, Direction::Greater},
          {Emotion::Sad, kLeMean, Direction::Less},
          {Emotion::Disgust, kLeMean, Direction::Less}};
}

ScreeningCascade fit_cascade(std::span<const LabeledFeatures> samples, std::span<const StageSpec> order) {
  ScreeningCascade cascade;
  std::vector<const LabeledFeatures*> surviving;
  for (const auto& s : samples) {
    if (s.features.screen.size() != static_cast<Eigen::Index>(cascade.screen_dim)) {
      throw Error(ErrorKind::Shape, "screening features have the wrong length");
    }
    surviving.push_back(&s);
  }

  for (const auto& spec : order) {
    if (spec.feature_index >= cascade.screen_dim) throw Error(ErrorKind::Parameter, "screening feature index out of range");
    for (const auto& prior : cascade.stages) {
      if (prior.target == spec.target) throw Error(ErrorKind::Parameter, "screening stages must target distinct emotions");
    }

    double target_sum = 0, other_sum = 0;
    std::size_t target_n = 0, other_n = 0;
    for (const auto* s : surviving) {
      const double x = s->features.screen[static_cast<Eigen::Index>(spec.feature_index)];
      if (s->emotion == spec.target) {
        target_sum += x;
        ++target_n;
      } else {
        other_sum += x;
        ++other_n;
      }
    }
    if (target_n < 2 || other_n < 2) {
      throw Error(ErrorKind::InsufficientData, "screening stage for " + std::string(to_string(spec.target)) +
                                                   " needs at least 2 target and 2 other utterances");
    }
    const double target_mean = target_sum / static_cast<double>(target_n);
    const double other_mean = other_sum / static_cast<double>(other_n);
    ScreeningStage stage{spec.target, spec.feature_index, spec.direction, 0.5 * (target_mean + other_mean),
                         0.5 * std::abs(target_mean - other_mean)};
    cascade.stages.push_back(stage);

    std::erase_if(surviving, [&](const LabeledFeatures* s) { return stage.fires(s->features); });
  }
  return cascade;
}

std::optional<Emotion> apply_cascade(const ScreeningCascade& cascade, const FeatureVector& v) {
  if (v.screen.size() != static_cast<Eigen::Index>(cascade.screen_dim)) {
    throw Error(ErrorKind::Shape, "feature vector layout does not match the cascade");
  }
  for (const auto& stage : cascade.stages) {
    if (stage.fires(v)) return stage.target;
  }
  return std::nullopt;
}

void write_feature_csv(const std::filesystem::path& path, std::span<const FeatureRecord> records) {
  if (records.empty()) throw Error(ErrorKind::Empty, "no feature records to write");
  const int levels = records.front().features.levels;
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.precision(17);
    out << "path,speaker,emotion,key";
    for (const auto& name : feature_names(levels)) out << ',' << name;
    out << '\n';
    for (const auto& r : records) {
      if (r.features.levels != levels) throw Error(ErrorKind::Shape, "feature records mix decomposition depths");
      out << r.path << ',' << r.speaker << ',' << to_string(r.emotion) << ',' << r.cache_key;
      for (double x : r.features.concatenated()) out << ',' << x;
      out << '\n';
    }
    if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<FeatureRecord> read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());

  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream s(line);
    while (std::getline(s, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Format, path.string() + " is empty");
  const auto header = split(line);
  const auto fd_columns = static_cast<long>(header.size()) - 4 - static_cast<long>(kScreenFeatureCount);
  if (header.size() < 4 || header[0] != "path" || fd_columns < 3 || fd_columns % 2 == 0) {
    throw Error(ErrorKind::Format, path.string() + " is not a feature table");
  }
  const int levels = static_cast<int>((fd_columns - 1) / 2);
  const auto names = feature_names(levels);
  if (!std::equal(names.begin(), names.end(), header.begin() + 4)) {
    throw Error(ErrorKind::Format, "unexpected feature columns in " + path.string());
  }

  std::vector<FeatureRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) throw Error(ErrorKind::Format, "ragged row in " + path.string());
    auto emotion = parse_emotion(fields[2]);
    if (!emotion) throw Error(ErrorKind::Format, "unknown emotion '" + fields[2] + "'");

    FeatureRecord r{fields[0], fields[1], *emotion, {}, fields[3]};
    r.features.levels = levels;
    r.features.fd.resize(fd_columns);
    r.features.screen.resize(kScreenFeatureCount);
    try {
      for (long i = 0; i < fd_columns; ++i) r.features.fd[i] = std::stod(fields[static_cast<std::size_t>(4 + i)]);
      for (long i = 0; i < static_cast<long>(kScreenFeatureCount); ++i) {
        r.features.screen[i] = std::stod(fields[static_cast<std::size_t>(4 + fd_columns + i)]);
      }
    } catch (const std::exception&) {
      throw Error(ErrorKind::Format, "non-numeric feature in " + path.string());
    }
    r.features.pitch_present = r.features.screen[kPitchMean] != 0.0;
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace fdaer
