#include "fdaer/wavelet.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace fdaer {

std::string_view to_string(WaveletFamily family) {
  switch (family) {
    case WaveletFamily::Haar: return "haar";
    case WaveletFamily::Db2: return "db2";
    case WaveletFamily::Db4: return "db4";
    case WaveletFamily::Db8: return "db8";
  }
  return "?";
}

std::string_view to_string(BoundaryMode mode) {
  switch (mode) {
    case BoundaryMode::Symmetric: return "symmetric";
    case BoundaryMode::Periodic: return "periodic";
    case BoundaryMode::Zero: return "zero";
  }
  return "?";
}

std::optional<WaveletFamily> parse_wavelet_family(std::string_view name) {
  for (auto f : {WaveletFamily::Haar, WaveletFamily::Db2, WaveletFamily::Db4, WaveletFamily::Db8}) {
    if (name == to_string(f)) return f;
  }
  if (name == "db1") return WaveletFamily::Haar;
  return std::nullopt;
}

std::optional<BoundaryMode> parse_boundary_mode(std::string_view name) {
  for (auto m : {BoundaryMode::Symmetric, BoundaryMode::Periodic, BoundaryMode::Zero}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

void write_decomposition(std::ostream& out, const WaveletDecomposition<double>& dec) {
  out << "family,mode,levels,original_length\n"
      << dec.filter.family_name << ',' << to_string(dec.boundary_mode) << ',' << dec.levels << ','
      << dec.original_length << '\n'
      << "band,length\n";
  out << 'a' << dec.levels << ',' << dec.approx.size() << '\n';
  for (int j = dec.levels; j >= 1; --j) out << 'd' << j << ',' << dec.details[static_cast<std::size_t>(j - 1)].size() << '\n';
  out << "coefficients\n" << std::setprecision(17);
  for (double v : dec.approx) out << v << '\n';
  for (int j = dec.levels; j >= 1; --j) {
    for (double v : dec.details[static_cast<std::size_t>(j - 1)]) out << v << '\n';
  }
}

namespace {

std::string expect_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Format, std::string("decomposition truncated before ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

Eigen::VectorXd read_values(std::istream& in, Eigen::Index count) {
  Eigen::VectorXd v(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const std::string line = expect_line(in, "coefficient data");
    try {
      v[i] = std::stod(line);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Format, "bad coefficient '" + line + "'");
    }
  }
  return v;
}

}  // namespace

WaveletDecomposition<double> read_decomposition(std::istream& in) {
  if (expect_line(in, "header") != "family,mode,levels,original_length") {
    throw Error(ErrorKind::Format, "not a wavelet decomposition file");
  }
  std::istringstream header(expect_line(in, "header values"));
  std::string family, mode, levels, length;
  std::getline(header, family, ',');
  std::getline(header, mode, ',');
  std::getline(header, levels, ',');
  std::getline(header, length, ',');

  WaveletDecomposition<double> dec;
  dec.filter = filter_coeffs<double>(family);
  auto m = parse_boundary_mode(mode);
  if (!m) throw Error(ErrorKind::Format, "unknown boundary mode '" + mode + "'");
  dec.boundary_mode = *m;
  try {
    dec.levels = std::stoi(levels);
    dec.original_length = std::stoull(length);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Format, "bad decomposition header");
  }
  if (dec.levels <= 0) throw Error(ErrorKind::Format, "decomposition level must be >= 1");

  if (expect_line(in, "band table") != "band,length") throw Error(ErrorKind::Format, "missing band table");
  std::vector<Eigen::Index> lengths;
  for (int b = 0; b <= dec.levels; ++b) {
    const std::string row = expect_line(in, "band table");
    const auto comma = row.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::Format, "bad band row '" + row + "'");
    lengths.push_back(std::stol(row.substr(comma + 1)));
  }
  if (expect_line(in, "coefficients") != "coefficients") throw Error(ErrorKind::Format, "missing coefficients");

  dec.approx = read_values(in, lengths[0]);
  dec.details.resize(static_cast<std::size_t>(dec.levels));
  for (int j = dec.levels; j >= 1; --j) {
    dec.details[static_cast<std::size_t>(j - 1)] = read_values(in, lengths[static_cast<std::size_t>(dec.levels - j + 1)]);
  }
  return dec;
}

}  // namespace fdaer
