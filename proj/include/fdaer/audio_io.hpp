#pragma once

#include "fdaer/emotion.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fdaer {

/// Mono utterance with samples in [-1, 1]. Labels are empty for clips read
/// straight from disk and filled in from a manifest entry.
struct AudioClip {
  Eigen::VectorXd samples;
  int sample_rate = 0;
  std::string speaker;
  std::optional<Emotion> emotion;
  std::string source_path;
};

/// Decodes a RIFF/WAVE file (PCM 8/16/24/32-bit integer or 32-bit float,
/// including WAVE_FORMAT_EXTENSIBLE). Channels are averaged to mono and
/// integer samples divided by the type's max magnitude (128, 32768, ...), so
/// inter-utterance level differences survive.
AudioClip read_wav(const std::filesystem::path& path);

/// Parses an in-memory WAV image; read_wav() is a thin wrapper over this.
AudioClip decode_wav(const std::vector<unsigned char>& bytes, const std::string& source_path = {});

enum class WavEncoding { Pcm16, Float32 };

/// Writes a mono WAV. Values are clamped to [-1, 1]; Pcm16 rounds x * 32768.
void write_wav(const std::filesystem::path& path, const Eigen::VectorXd& samples, int sample_rate,
               WavEncoding encoding = WavEncoding::Pcm16);

struct ManifestEntry {
  std::string path;
  std::string speaker;
  Emotion emotion;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::size_t skipped = 0;  // neutral or unparseable labels

  std::vector<std::string> speakers() const;  // sorted, unique
  std::map<std::string, std::size_t> per_speaker_counts() const;
};

enum class ManifestLayout { Csv, SaveeDirs };

/// Filename-prefix to label mapping for the SAVEE directory layout. Longer
/// prefixes are tried first; a label of "neutral" (or anything unparseable)
/// marks files to skip.
using SaveePrefixMap = std::vector<std::pair<std::string, std::string>>;
SaveePrefixMap default_savee_prefixes();

/// csv: header `path,speaker,emotion`, relative paths resolved against the
/// manifest's directory. savee_dirs: `path` is a root holding one directory
/// per speaker. Entry order is deterministic (file order for csv, sorted
/// speaker/filename for directories).
DatasetManifest load_manifest(const std::filesystem::path& path, ManifestLayout layout,
                              const SaveePrefixMap& prefixes = default_savee_prefixes());

/// Writes a manifest as csv with the paths as stored.
void write_manifest_csv(const std::filesystem::path& path, const DatasetManifest& manifest);

enum class WindowKind { Rectangular, Hamming };

/// Column i holds samples [i*hop, i*hop + frame_len) times the window.
struct FrameSeries {
  Eigen::MatrixXd frames;  // frame_len x count
  std::size_t frame_len = 0;
  std::size_t hop = 0;
  WindowKind window_kind = WindowKind::Rectangular;

  Eigen::Index count() const { return frames.cols(); }
};

Eigen::VectorXd window(WindowKind kind, std::size_t length);

FrameSeries frame_signal(const Eigen::Ref<const Eigen::VectorXd>& signal, std::size_t frame_len,
                         std::size_t hop, WindowKind kind);

inline FrameSeries frame_signal(const AudioClip& clip, std::size_t frame_len, std::size_t hop,
                                WindowKind kind) {
  return frame_signal(clip.samples, frame_len, hop, kind);
}

}  // namespace fdaer
