#pragma once

#include "fdaer/audio_io.hpp"
#include "fdaer/classify.hpp"
#include "fdaer/config.hpp"
#include "fdaer/emotion.hpp"
#include "fdaer/pipeline.hpp"
#include "fdaer/synth.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fdaer {

enum class ProtocolKind { OneVsThree, TwoVsTwo, Custom };

std::string_view to_string(ProtocolKind kind);
std::optional<ProtocolKind> parse_protocol(std::string_view name);

struct SplitProtocol {
  ProtocolKind kind = ProtocolKind::Custom;
  std::set<std::string> train_speakers;
  std::set<std::string> test_speakers;
};

/// one_vs_three: each speaker alone trains, the rest test (one split per
/// speaker). two_vs_two: each unordered speaker pair trains, the rest test.
std::vector<SplitProtocol> make_splits(const std::vector<std::string>& speakers, ProtocolKind kind);
std::vector<SplitProtocol> make_splits(const DatasetManifest& manifest, ProtocolKind kind);

using ConfusionMatrix = std::array<std::array<std::size_t, kEmotionCount>, kEmotionCount>;  // [true][predicted]

struct EvalReport {
  double overall_accuracy = 0;
  std::map<Emotion, double> per_emotion_accuracy;  // emotions present in the test split only
  ConfusionMatrix confusion{};
  std::vector<std::string> train_speakers;
  std::vector<std::string> test_speakers;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::string> config_snapshot;
};

/// Features for every usable utterance of a dataset.
struct FeatureCorpus {
  std::vector<FeatureRecord> records;
  std::vector<std::string> skipped_paths;
};

/// Reads and featurises each manifest entry. Entries that fail to read or
/// extract are skipped with a warning. When cache_path is given, rows whose
/// key (hash of file bytes and feature config) matches are reused and the
/// refreshed table is written back.
FeatureCorpus extract_corpus(const DatasetManifest& manifest, const FeatureConfig& config,
                             const std::optional<std::filesystem::path>& cache_path = std::nullopt);

FeatureCorpus extract_corpus(const SyntheticCorpus& corpus, const FeatureConfig& config);

/// 64-bit FNV-1a, hex encoded.
std::string content_key(const std::vector<unsigned char>& bytes, const std::string& config_key);

EvalReport run_experiment(const FeatureCorpus& corpus, const SplitProtocol& split, const ExperimentConfig& config);

EvalReport run_experiment(const DatasetManifest& manifest, const SplitProtocol& split, const ExperimentConfig& config);

struct ProtocolReport {
  ProtocolKind kind = ProtocolKind::Custom;
  std::vector<EvalReport> splits;
  double mean_accuracy = 0;
  double best_accuracy = 0;
  std::map<std::string, std::string> config_snapshot;
};

ProtocolReport run_protocol(const FeatureCorpus& corpus, ProtocolKind kind, const ExperimentConfig& config);

enum class ReportFormat { Text, Csv, Json };

std::optional<ReportFormat> parse_report_format(std::string_view name);

inline constexpr int kReportSchemaVersion = 1;

std::string render_report(const ProtocolReport& report, ReportFormat format);
std::string render_report(const EvalReport& report, ReportFormat format);

/// Writes via a temporary file and rename. A path of "-" writes to stdout.
void emit_report(const ProtocolReport& report, ReportFormat format, const std::filesystem::path& path);
void emit_report(const EvalReport& report, ReportFormat format, const std::filesystem::path& path);

/// Inverse of the json rendering.
ProtocolReport parse_protocol_report(const std::string& json_text);

}  // namespace fdaer
