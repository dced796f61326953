#include "fdaer/error.hpp"
#include "fdaer/eval.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fdaer {

using nlohmann::json;

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  return std::nullopt;
}

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

ProtocolReport wrap(const EvalReport& r) {
  ProtocolReport p;
  p.kind = ProtocolKind::Custom;
  p.splits = {r};
  p.mean_accuracy = r.overall_accuracy;
  p.best_accuracy = r.overall_accuracy;
  p.config_snapshot = r.config_snapshot;
  return p;
}

std::size_t skipped_of(const ProtocolReport& r) { return r.splits.empty() ? 0 : r.splits.front().skipped; }

json split_to_json(const EvalReport& r) {
  json per = json::object();
  for (const auto& [e, acc] : r.per_emotion_accuracy) per[std::string(to_string(e))] = acc;
  json confusion = json::array();
  for (const auto& row : r.confusion) confusion.push_back(row);
  return {{"train_speakers", r.train_speakers},
          {"test_speakers", r.test_speakers},
          {"train_count", r.train_count},
          {"test_count", r.test_count},
          {"overall_accuracy", r.overall_accuracy},
          {"per_emotion_accuracy", per},
          {"confusion", confusion}};
}

std::string to_json_text(const ProtocolReport& report) {
  json labels = json::array();
  for (Emotion e : kAllEmotions) labels.push_back(std::string(to_string(e)));
  json splits = json::array();
  for (const auto& s : report.splits) splits.push_back(split_to_json(s));
  json doc = {{"schema_version", kReportSchemaVersion},
              {"protocol", std::string(to_string(report.kind))},
              {"labels", labels},
              {"mean_accuracy", report.mean_accuracy},
              {"best_accuracy", report.best_accuracy},
              {"skipped", skipped_of(report)},
              {"config", report.config_snapshot},
              {"splits", splits}};
  return doc.dump(2) + "\n";
}

std::string to_csv_text(const ProtocolReport& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# schema_version=" << kReportSchemaVersion << '\n'
      << "# protocol=" << to_string(report.kind) << '\n'
      << "# skipped=" << skipped_of(report) << '\n';
  for (const auto& [k, v] : report.config_snapshot) out << "# config." << k << '=' << v << '\n';
  out << "split,train_speakers,test_speakers,row";
  for (Emotion e : kAllEmotions) out << ',' << to_string(e);
  out << ",total,accuracy\n";
  for (std::size_t i = 0; i < report.splits.size(); ++i) {
    const auto& s = report.splits[i];
    const std::string prefix =
        std::to_string(i + 1) + ',' + join(s.train_speakers, ";") + ',' + join(s.test_speakers, ";") + ',';
    for (Emotion e : kAllEmotions) {
      const auto& row = s.confusion[index_of(e)];
      std::size_t total = 0;
      out << prefix << to_string(e);
      for (auto c : row) {
        out << ',' << c;
        total += c;
      }
      out << ',' << total << ',';
      if (auto it = s.per_emotion_accuracy.find(e); it != s.per_emotion_accuracy.end()) out << it->second;
      out << '\n';
    }
    out << prefix << "overall,,,,,,," << s.test_count << ',' << s.overall_accuracy << '\n';
  }
  return out.str();
}

std::string to_text(const ProtocolReport& report) {
  std::ostringstream out;
  out << "fdaer evaluation report\n"
      << "protocol: " << to_string(report.kind) << '\n'
      << "config:";
  for (const auto& [k, v] : report.config_snapshot) out << ' ' << k << '=' << v;
  out << '\n' << std::fixed << std::setprecision(4)
      << "mean accuracy: " << report.mean_accuracy << '\n'
      << "best accuracy: " << report.best_accuracy << '\n'
      << "skipped utterances: " << skipped_of(report) << '\n';

  for (std::size_t i = 0; i < report.splits.size(); ++i) {
    const auto& s = report.splits[i];
    out << "\nsplit " << i + 1 << ": train [" << join(s.train_speakers, ", ") << "] test ["
        << join(s.test_speakers, ", ") << "] (train " << s.train_count << ", test " << s.test_count << ")\n"
        << "overall accuracy: " << s.overall_accuracy << '\n';
    out << std::left << std::setw(10) << "emotion" << "accuracy\n";
    for (const auto& [e, acc] : s.per_emotion_accuracy) out << std::setw(10) << to_string(e) << acc << '\n';
    out << "confusion (rows true, columns predicted)\n" << std::setw(10) << "";
    for (Emotion e : kAllEmotions) out << std::right << std::setw(9) << to_string(e);
    out << '\n';
    for (Emotion e : kAllEmotions) {
      out << std::left << std::setw(10) << to_string(e) << std::right;
      for (auto c : s.confusion[index_of(e)]) out << std::setw(9) << c;
      out << '\n';
    }
    out << std::left;
  }
  return out.str();
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot replace " + path.string() + ": " + ec.message());
}

}  // namespace

std::string render_report(const ProtocolReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Text: return to_text(report);
    case ReportFormat::Csv: return to_csv_text(report);
    case ReportFormat::Json: return to_json_text(report);
  }
  return {};
}

std::string render_report(const EvalReport& report, ReportFormat format) { return render_report(wrap(report), format); }

void emit_report(const ProtocolReport& report, ReportFormat format, const std::filesystem::path& path) {
  write_atomically(path, render_report(report, format));
}

void emit_report(const EvalReport& report, ReportFormat format, const std::filesystem::path& path) {
  emit_report(wrap(report), format, path);
}

ProtocolReport parse_protocol_report(const std::string& json_text) {
  try {
    const json doc = json::parse(json_text);
    if (doc.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error(ErrorKind::Format, "unsupported report schema_version");
    }
    ProtocolReport report;
    auto kind = parse_protocol(doc.at("protocol").get<std::string>());
    if (!kind) throw Error(ErrorKind::Format, "unknown protocol in report");
    report.kind = *kind;
    report.mean_accuracy = doc.at("mean_accuracy").get<double>();
    report.best_accuracy = doc.at("best_accuracy").get<double>();
    report.config_snapshot = doc.at("config").get<std::map<std::string, std::string>>();
    const auto skipped = doc.at("skipped").get<std::size_t>();
    for (const auto& s : doc.at("splits")) {
      EvalReport r;
      r.train_speakers = s.at("train_speakers").get<std::vector<std::string>>();
      r.test_speakers = s.at("test_speakers").get<std::vector<std::string>>();
      r.train_count = s.at("train_count").get<std::size_t>();
      r.test_count = s.at("test_count").get<std::size_t>();
      r.overall_accuracy = s.at("overall_accuracy").get<double>();
      for (const auto& [name, acc] : s.at("per_emotion_accuracy").items()) {
        auto e = parse_emotion(name);
        if (!e) throw Error(ErrorKind::Format, "unknown emotion in report");
        r.per_emotion_accuracy[*e] = acc.get<double>();
      }
      const auto& rows = s.at("confusion");
      if (rows.size() != kEmotionCount) throw Error(ErrorKind::Format, "confusion matrix must be 6x6");
      for (std::size_t i = 0; i < kEmotionCount; ++i) {
        if (rows[i].size() != kEmotionCount) throw Error(ErrorKind::Format, "confusion matrix must be 6x6");
        for (std::size_t j = 0; j < kEmotionCount; ++j) r.confusion[i][j] = rows[i][j].get<std::size_t>();
      }
      r.skipped = skipped;
      r.config_snapshot = report.config_snapshot;
      report.splits.push_back(std::move(r));
    }
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, std::string("malformed report: ") + e.what());
  }
}

}  // namespace fdaer
