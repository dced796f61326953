#include "fdaer/config.hpp"

#include "fdaer/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fdaer {

namespace {

const char* const kScreenNames[] = {"le_mean", "le_std", "teo_mean", "teo_std", "zcr_mean", "pitch_mean"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(std::string_view key, std::string_view value) {
  throw Error(ErrorKind::Parameter, "invalid value '" + std::string(value) + "' for " + std::string(key));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad(key, value);
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(value), &used);
    if (used != value.size()) bad(key, value);
    return v;
  } catch (const std::logic_error&) {
    bad(key, value);
  }
}

std::string format_real(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::vector<StageSpec> parse_cascade_order(std::string_view value) {
  std::vector<StageSpec> order;
  std::istringstream in{std::string(value)};
  std::string item;
  while (std::getline(in, item, ',')) {
    std::istringstream parts(item);
    std::string emotion, feature, direction;
    std::getline(parts, emotion, ':');
    std::getline(parts, feature, ':');
    std::getline(parts, direction, ':');
    auto e = parse_emotion(trim(emotion));
    auto d = parse_direction(trim(direction));
    std::optional<std::size_t> index;
    for (std::size_t i = 0; i < kScreenFeatureCount; ++i) {
      if (trim(feature) == kScreenNames[i]) index = i;
    }
    if (!e || !d || !index) bad("cascade_order", item);
    order.push_back({*e, *index, *d});
  }
  return order;
}

std::string format_cascade_order(const std::vector<StageSpec>& order) {
  std::string out;
  for (const auto& s : order) {
    if (!out.empty()) out += ',';
    out += std::string(to_string(s.target)) + ':' + kScreenNames[s.feature_index] + ':' + std::string(to_string(s.direction));
  }
  return out;
}

}  // namespace

void apply_setting(ExperimentConfig& config, std::string_view key_in, std::string_view value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  auto& f = config.features;
  auto& m = config.model;

  if (key == "wavelet") {
    auto family = parse_wavelet_family(value);
    if (!family) bad(key, value);
    f.wavelet.family = *family;
  } else if (key == "boundary") {
    auto mode = parse_boundary_mode(value);
    if (!mode) bad(key, value);
    f.wavelet.mode = *mode;
  } else if (key == "levels") {
    f.wavelet.levels = parse_number<int>(key, value);
    if (f.wavelet.levels < 1) bad(key, value);
  } else if (key == "kmax") {
    f.fd.k_max_subband = parse_number<int>(key, value);
    if (f.fd.k_max_subband < 2) bad(key, value);
  } else if (key == "kmax_raw") {
    f.fd.k_max_raw = parse_number<int>(key, value);
    if (f.fd.k_max_raw < 2) bad(key, value);
  } else if (key == "fd") {
    auto method = parse_fd_method(value);
    if (!method) bad(key, value);
    f.fd.method = *method;
  } else if (key == "frame_len") {
    f.frames.frame_len = parse_number<std::size_t>(key, value);
    if (f.frames.frame_len < 3) bad(key, value);
  } else if (key == "hop") {
    f.frames.hop = parse_number<std::size_t>(key, value);
    if (f.frames.hop < 1) bad(key, value);
  } else if (key == "pitch_fmin") {
    f.pitch.f_min = parse_real(key, value);
  } else if (key == "pitch_fmax") {
    f.pitch.f_max = parse_real(key, value);
  } else if (key == "voicing_threshold") {
    f.pitch.voicing_threshold = parse_real(key, value);
  } else if (key == "mmc_dim") {
    m.mmc_dim = parse_number<int>(key, value);
    if (m.mmc_dim < 1) bad(key, value);
  } else if (key == "knn_k") {
    m.knn_k = parse_number<int>(key, value);
    if (m.knn_k < 1) bad(key, value);
  } else if (key == "cascade") {
    if (value != "on" && value != "off") bad(key, value);
    m.use_cascade = value == "on";
  } else if (key == "cascade_order") {
    m.cascade_order = parse_cascade_order(value);
  } else if (key == "mmc_features") {
    if (value != "fd" && value != "all") bad(key, value);
    m.include_screen_features = value == "all";
  } else if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(key, value);
  } else {
    throw Error(ErrorKind::Parameter, "unknown setting '" + key + "'");
  }
}

void load_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parameter, "cannot open config file " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parameter, "config line without '=': " + t);
    apply_setting(config, t.substr(0, eq), t.substr(eq + 1));
  }
}

std::map<std::string, std::string> snapshot(const ExperimentConfig& config) {
  const auto& f = config.features;
  const auto& m = config.model;
  return {
      {"wavelet", std::string(to_string(f.wavelet.family))},
      {"boundary", std::string(to_string(f.wavelet.mode))},
      {"levels", std::to_string(f.wavelet.levels)},
      {"kmax", std::to_string(f.fd.k_max_subband)},
      {"kmax_raw", std::to_string(f.fd.k_max_raw)},
      {"fd", std::string(to_string(f.fd.method))},
      {"frame_len", std::to_string(f.frames.frame_len)},
      {"hop", std::to_string(f.frames.hop)},
      {"pitch_fmin", format_real(f.pitch.f_min)},
      {"pitch_fmax", format_real(f.pitch.f_max)},
      {"voicing_threshold", format_real(f.pitch.voicing_threshold)},
      {"mmc_dim", std::to_string(m.mmc_dim)},
      {"knn_k", std::to_string(m.knn_k)},
      {"cascade", m.use_cascade ? "on" : "off"},
      {"cascade_order", format_cascade_order(m.cascade_order)},
      {"mmc_features", m.include_screen_features ? "all" : "fd"},
      {"seed", std::to_string(config.seed)},
  };
}

std::string feature_config_key(const FeatureConfig& config) {
  ExperimentConfig c;
  c.features = config;
  const auto all = snapshot(c);
  std::string key = "layout=" + std::to_string(kLayoutVersion);
  for (const char* k : {"wavelet", "boundary", "levels", "kmax", "kmax_raw", "fd", "frame_len", "hop", "pitch_fmin",
                        "pitch_fmax", "voicing_threshold"}) {
    key += ';';
    key += k;
    key += '=';
    key += all.at(k);
  }
  return key;
}

}  // namespace fdaer
