#include "fdaer/audio_io.hpp"

#include "fdaer/error.hpp"
#include "fdaer/log.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>

namespace fdaer {

namespace fs = std::filesystem;

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

bool tag_is(const unsigned char* p, const char* tag) { return std::memcmp(p, tag, 4) == 0; }

struct WavFormat {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const unsigned char* p, const WavFormat& fmt) {
  if (fmt.tag == kFormatFloat) {
    float f;
    std::uint32_t raw = le32(p);
    std::memcpy(&f, &raw, sizeof f);
    if (!std::isfinite(f)) throw Error(ErrorKind::Format, "non-finite float sample");
    return std::clamp(static_cast<double>(f), -1.0, 1.0);
  }
  switch (fmt.bits) {
    case 8: return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: return static_cast<std::int16_t>(le16(p)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32: return static_cast<std::int32_t>(le32(p)) / 2147483648.0;
  }
  throw Error(ErrorKind::UnsupportedCodec, "unsupported PCM bit depth " + std::to_string(fmt.bits));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  for (auto& f : fields) {
    auto b = f.find_first_not_of(" \t");
    auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return fields;
}

DatasetManifest load_csv_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open manifest " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::EmptyManifest, path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM
  if (split_csv_line(line) != std::vector<std::string>{"path", "speaker", "emotion"}) {
    throw Error(ErrorKind::Format, "manifest header must be `path,speaker,emotion`");
  }

  const fs::path base = path.parent_path();
  DatasetManifest manifest;
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw Error(ErrorKind::Format, "manifest line " + std::to_string(line_no) + ": expected 3 fields");
    }
    auto emotion = parse_emotion(fields[2]);
    if (!emotion) {
      ++manifest.skipped;
      continue;
    }
    fs::path p(fields[0]);
    std::string resolved = p.is_absolute() || base.empty() ? p.string() : (base / p).string();
    if (!seen.insert(resolved).second) throw Error(ErrorKind::Duplicate, "duplicate path " + resolved);
    manifest.entries.push_back({resolved, fields[1], *emotion});
  }
  return manifest;
}

DatasetManifest load_savee_manifest(const fs::path& root, const SaveePrefixMap& prefixes) {
  if (!fs::is_directory(root)) throw Error(ErrorKind::Io, root.string() + " is not a directory");

  auto ordered = prefixes;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });

  std::vector<fs::path> speaker_dirs;
  for (const auto& d : fs::directory_iterator(root)) {
    if (d.is_directory()) speaker_dirs.push_back(d.path());
  }
  std::sort(speaker_dirs.begin(), speaker_dirs.end());

  DatasetManifest manifest;
  for (const auto& dir : speaker_dirs) {
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(dir)) {
      auto ext = f.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (f.is_regular_file() && ext == ".wav") files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::string stem = f.stem().string();
      std::optional<Emotion> emotion;
      for (const auto& [prefix, label] : ordered) {
        if (stem.rfind(prefix, 0) == 0) {
          emotion = parse_emotion(label);
          break;
        }
      }
      if (!emotion) {
        ++manifest.skipped;
        continue;
      }
      manifest.entries.push_back({f.string(), dir.filename().string(), *emotion});
    }
  }
  return manifest;
}

}  // namespace

AudioClip decode_wav(const std::vector<unsigned char>& bytes, const std::string& source_path) {
  if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE")) {
    throw Error(ErrorKind::Format, "missing RIFF/WAVE header in " + source_path);
  }

  std::optional<WavFormat> fmt;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    std::size_t size = le32(chunk + 4);
    std::size_t avail = bytes.size() - pos - 8;
    if (tag_is(chunk, "fmt ")) {
      if (size < 16 || size > avail) throw Error(ErrorKind::Format, "truncated fmt chunk");
      WavFormat f;
      f.tag = le16(chunk + 8);
      f.channels = le16(chunk + 10);
      f.sample_rate = le32(chunk + 12);
      f.block_align = le16(chunk + 20);
      f.bits = le16(chunk + 22);
      if (f.tag == kFormatExtensible) {
        if (size < 40) throw Error(ErrorKind::Format, "truncated WAVE_FORMAT_EXTENSIBLE header");
        f.tag = le16(chunk + 8 + 24);
      }
      fmt = f;
    } else if (tag_is(chunk, "data")) {
      data = chunk + 8;
      data_size = std::min(size, avail);  // streaming writers leave the size unset
      break;
    }
    pos += 8 + size + (size & 1);
  }

  if (!fmt) throw Error(ErrorKind::Format, "no fmt chunk in " + source_path);
  if (fmt->tag != kFormatPcm && fmt->tag != kFormatFloat) {
    throw Error(ErrorKind::UnsupportedCodec, "WAV codec tag " + std::to_string(fmt->tag) + " is not PCM");
  }
  if (fmt->tag == kFormatFloat && fmt->bits != 32) {
    throw Error(ErrorKind::UnsupportedCodec, "only 32-bit float WAV is supported");
  }
  if (fmt->tag == kFormatPcm && fmt->bits != 8 && fmt->bits != 16 && fmt->bits != 24 && fmt->bits != 32) {
    throw Error(ErrorKind::UnsupportedCodec, "unsupported PCM bit depth " + std::to_string(fmt->bits));
  }
  if (fmt->channels == 0 || fmt->sample_rate == 0) throw Error(ErrorKind::Format, "zero channels or sample rate");
  const std::size_t bytes_per_sample = fmt->bits / 8;
  if (fmt->block_align != fmt->channels * bytes_per_sample) {
    throw Error(ErrorKind::Format, "block alignment does not match channels and bit depth");
  }
  if (!data) throw Error(ErrorKind::Format, "no data chunk in " + source_path);

  const std::size_t frames = data_size / fmt->block_align;
  if (frames == 0) throw Error(ErrorKind::EmptySignal, "no samples in " + source_path);

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt->sample_rate);
  clip.source_path = source_path;
  clip.samples.resize(static_cast<Eigen::Index>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    const unsigned char* frame = data + i * fmt->block_align;
    double sum = 0.0;
    for (std::size_t c = 0; c < fmt->channels; ++c) sum += decode_sample(frame + c * bytes_per_sample, *fmt);
    clip.samples[static_cast<Eigen::Index>(i)] = sum / fmt->channels;
  }
  return clip;
}

AudioClip read_wav(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes, path.string());
}

void write_wav(const fs::path& path, const Eigen::VectorXd& samples, int sample_rate, WavEncoding encoding) {
  if (sample_rate <= 0) throw Error(ErrorKind::Parameter, "sample rate must be positive");
  const std::uint16_t bits = encoding == WavEncoding::Pcm16 ? 16 : 32;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size()) * (bits / 8);

  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put32(out, 16);
  put16(out, encoding == WavEncoding::Pcm16 ? kFormatPcm : kFormatFloat);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(sample_rate));
  put32(out, static_cast<std::uint32_t>(sample_rate) * (bits / 8));
  put16(out, bits / 8);
  put16(out, bits);
  put_tag(out, "data");
  put32(out, data_bytes);
  for (double x : samples) {
    x = std::clamp(x, -1.0, 1.0);
    if (encoding == WavEncoding::Pcm16) {
      auto v = static_cast<std::int16_t>(std::clamp(std::lround(x * 32768.0), -32768L, 32767L));
      put16(out, static_cast<std::uint16_t>(v));
    } else {
      put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorKind::Io, "short write to " + path.string());
}

std::vector<std::string> DatasetManifest::speakers() const {
  std::set<std::string> s;
  for (const auto& e : entries) s.insert(e.speaker);
  return {s.begin(), s.end()};
}

std::map<std::string, std::size_t> DatasetManifest::per_speaker_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& e : entries) ++counts[e.speaker];
  return counts;
}

SaveePrefixMap default_savee_prefixes() {
  return {{"a", "angry"}, {"d", "disgust"}, {"f", "fear"}, {"h", "happy"},
          {"n", "neutral"}, {"sa", "sad"}, {"su", "surprise"}};
}

DatasetManifest load_manifest(const fs::path& path, ManifestLayout layout, const SaveePrefixMap& prefixes) {
  DatasetManifest manifest =
      layout == ManifestLayout::Csv ? load_csv_manifest(path) : load_savee_manifest(path, prefixes);
  if (manifest.entries.empty()) throw Error(ErrorKind::EmptyManifest, "no usable entries in " + path.string());
  if (manifest.skipped > 0) {
    warn(std::to_string(manifest.skipped) + " manifest entries skipped (neutral or unknown emotion)");
  }
  return manifest;
}

void write_manifest_csv(const fs::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "path,speaker,emotion\n";
  for (const auto& e : manifest.entries) out << e.path << ',' << e.speaker << ',' << to_string(e.emotion) << '\n';
}

Eigen::VectorXd window(WindowKind kind, std::size_t length) {
  const auto n = static_cast<Eigen::Index>(length);
  if (kind == WindowKind::Rectangular || length < 2) return Eigen::VectorXd::Ones(n);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return w;
}

FrameSeries frame_signal(const Eigen::Ref<const Eigen::VectorXd>& signal, std::size_t frame_len, std::size_t hop,
                         WindowKind kind) {
  if (frame_len == 0 || hop == 0) throw Error(ErrorKind::Parameter, "frame length and hop must be >= 1");
  const auto n = static_cast<std::size_t>(signal.size());
  if (frame_len > n) {
    throw Error(ErrorKind::TooShort,
                "signal of " + std::to_string(n) + " samples is shorter than frame length " + std::to_string(frame_len));
  }
  const std::size_t count = (n - frame_len) / hop + 1;
  const Eigen::VectorXd w = window(kind, frame_len);
  const auto len = static_cast<Eigen::Index>(frame_len);

  FrameSeries series;
  series.frame_len = frame_len;
  series.hop = hop;
  series.window_kind = kind;
  series.frames.resize(len, static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    series.frames.col(static_cast<Eigen::Index>(i)) =
        signal.segment(static_cast<Eigen::Index>(i * hop), len).cwiseProduct(w);
  }
  return series;
}

}  // namespace fdaer
