#include "fdaer/eval.hpp"

#include "fdaer/error.hpp"
#include "fdaer/log.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <unordered_map>

namespace fdaer {

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::OneVsThree: return "one_vs_three";
    case ProtocolKind::TwoVsTwo: return "two_vs_two";
    case ProtocolKind::Custom: return "custom";
  }
  return "?";
}

std::optional<ProtocolKind> parse_protocol(std::string_view name) {
  for (auto k : {ProtocolKind::OneVsThree, ProtocolKind::TwoVsTwo, ProtocolKind::Custom}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

std::vector<SplitProtocol> make_splits(const std::vector<std::string>& speakers_in, ProtocolKind kind) {
  const std::set<std::string> all(speakers_in.begin(), speakers_in.end());
  const std::vector<std::string> speakers(all.begin(), all.end());
  std::vector<SplitProtocol> splits;

  auto rest = [&](const std::set<std::string>& train) {
    std::set<std::string> test;
    std::set_difference(all.begin(), all.end(), train.begin(), train.end(), std::inserter(test, test.end()));
    return test;
  };

  if (kind == ProtocolKind::OneVsThree) {
    if (speakers.size() < 2) throw Error(ErrorKind::Protocol, "one_vs_three needs at least 2 speakers");
    for (const auto& s : speakers) {
      std::set<std::string> train{s};
      splits.push_back({kind, train, rest(train)});
    }
  } else if (kind == ProtocolKind::TwoVsTwo) {
    if (speakers.size() < 3) throw Error(ErrorKind::Protocol, "two_vs_two needs at least 3 speakers");
    for (std::size_t i = 0; i < speakers.size(); ++i) {
      for (std::size_t j = i + 1; j < speakers.size(); ++j) {
        std::set<std::string> train{speakers[i], speakers[j]};
        splits.push_back({kind, train, rest(train)});
      }
    }
  } else {
    throw Error(ErrorKind::Protocol, "custom splits are built by the caller");
  }
  return splits;
}

std::vector<SplitProtocol> make_splits(const DatasetManifest& manifest, ProtocolKind kind) {
  return make_splits(manifest.speakers(), kind);
}

std::string content_key(const std::vector<unsigned char>& bytes, const std::string& config_key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (unsigned char c : bytes) mix(c);
  mix(0);
  for (char c : config_key) mix(static_cast<unsigned char>(c));
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xF];
  return out;
}

FeatureCorpus extract_corpus(const DatasetManifest& manifest, const FeatureConfig& config,
                             const std::optional<std::filesystem::path>& cache_path) {
  std::unordered_map<std::string, FeatureRecord> cached;
  if (cache_path && std::filesystem::exists(*cache_path)) {
    try {
      for (auto& r : read_feature_csv(*cache_path)) cached.emplace(r.path, std::move(r));
    } catch (const Error& e) {
      warn(std::string("ignoring unreadable feature cache: ") + e.what());
    }
  }

  const std::string config_key = feature_config_key(config);
  FeatureCorpus corpus;
  std::optional<int> first_rate;
  bool mixed_rates = false;
  for (const auto& entry : manifest.entries) {
    try {
      std::ifstream in(entry.path, std::ios::binary);
      if (!in) throw Error(ErrorKind::Io, "cannot open " + entry.path);
      std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      const std::string key = content_key(bytes, config_key);

      if (auto it = cached.find(entry.path); it != cached.end() && it->second.cache_key == key &&
                                              it->second.features.levels == config.wavelet.levels) {
        FeatureRecord r = it->second;
        r.speaker = entry.speaker;
        r.emotion = entry.emotion;
        corpus.records.push_back(std::move(r));
        continue;
      }

      AudioClip clip = decode_wav(bytes, entry.path);
      if (!first_rate) first_rate = clip.sample_rate;
      mixed_rates = mixed_rates || clip.sample_rate != *first_rate;
      corpus.records.push_back({entry.path, entry.speaker, entry.emotion, extract_features(clip, config), key});
    } catch (const Error& e) {
      warn("skipping " + entry.path + ": " + e.what());
      corpus.skipped_paths.push_back(entry.path);
    }
  }
  if (mixed_rates) warn("manifest mixes sample rates; features are computed at native rates");
  if (cache_path && !corpus.records.empty()) write_feature_csv(*cache_path, corpus.records);
  return corpus;
}

FeatureCorpus extract_corpus(const SyntheticCorpus& synthetic, const FeatureConfig& config) {
  FeatureCorpus corpus;
  for (std::size_t i = 0; i < synthetic.clips.size(); ++i) {
    const auto& entry = synthetic.manifest.entries[i];
    corpus.records.push_back(
        {entry.path, entry.speaker, entry.emotion, extract_features(synthetic.clips[i], config), {}});
  }
  return corpus;
}

EvalReport run_experiment(const FeatureCorpus& corpus, const SplitProtocol& split, const ExperimentConfig& config) {
  if (split.train_speakers.empty() || split.test_speakers.empty()) {
    throw Error(ErrorKind::Protocol, "train and test speaker sets must be nonempty");
  }
  for (const auto& s : split.train_speakers) {
    if (split.test_speakers.count(s)) throw Error(ErrorKind::Protocol, "speaker " + s + " is in both train and test");
  }

  std::vector<LabeledFeatures> train;
  std::vector<const FeatureRecord*> test;
  for (const auto& r : corpus.records) {
    if (split.train_speakers.count(r.speaker)) {
      train.push_back({r.features, r.emotion});
    } else if (split.test_speakers.count(r.speaker)) {
      test.push_back(&r);
    }
  }
  if (train.empty()) throw Error(ErrorKind::Protocol, "no training utterances for the split");
  if (test.empty()) throw Error(ErrorKind::Protocol, "no test utterances for the split");

  const EmotionModel model = fit_model(train, config.model);

  EvalReport report;
  report.train_speakers.assign(split.train_speakers.begin(), split.train_speakers.end());
  report.test_speakers.assign(split.test_speakers.begin(), split.test_speakers.end());
  report.train_count = train.size();
  report.test_count = test.size();
  report.skipped = corpus.skipped_paths.size();
  report.config_snapshot = snapshot(config);
  for (const auto* r : test) ++report.confusion[index_of(r->emotion)][index_of(predict(model, r->features))];

  std::size_t correct = 0;
  for (Emotion e : kAllEmotions) {
    const auto& row = report.confusion[index_of(e)];
    std::size_t total = 0;
    for (auto c : row) total += c;
    correct += row[index_of(e)];
    if (total > 0) report.per_emotion_accuracy[e] = static_cast<double>(row[index_of(e)]) / static_cast<double>(total);
  }
  report.overall_accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  return report;
}

EvalReport run_experiment(const DatasetManifest& manifest, const SplitProtocol& split, const ExperimentConfig& config) {
  return run_experiment(extract_corpus(manifest, config.features), split, config);
}

ProtocolReport run_protocol(const FeatureCorpus& corpus, ProtocolKind kind, const ExperimentConfig& config) {
  std::vector<std::string> speakers;
  for (const auto& r : corpus.records) speakers.push_back(r.speaker);

  ProtocolReport report;
  report.kind = kind;
  report.config_snapshot = snapshot(config);
  for (const auto& split : make_splits(speakers, kind)) {
    report.splits.push_back(run_experiment(corpus, split, config));
    report.mean_accuracy += report.splits.back().overall_accuracy;
    report.best_accuracy = std::max(report.best_accuracy, report.splits.back().overall_accuracy);
  }
  report.mean_accuracy /= static_cast<double>(report.splits.size());
  return report;
}

}  // namespace fdaer
