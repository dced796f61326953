// Command-line front end: synth, extract, train, eval, report, predict.

#include "fdaer/audio_io.hpp"
#include "fdaer/classify.hpp"
#include "fdaer/config.hpp"
#include "fdaer/error.hpp"
#include "fdaer/eval.hpp"
#include "fdaer/pipeline.hpp"
#include "fdaer/synth.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace {

using namespace fdaer;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter:
    case ErrorKind::Protocol: return kExitConfig;
    default: return kExitData;
  }
}

struct ExperimentOptions {
  std::string config_file;
  std::map<std::string, std::string> overrides;

  ExperimentConfig resolve() const {
    ExperimentConfig config;
    if (!config_file.empty()) load_config_file(config, config_file);
    for (const auto& [k, v] : overrides) apply_setting(config, k, v);
    return config;
  }
};

void add_setting(CLI::App* app, ExperimentOptions& opts, const std::string& flag, const std::string& key,
                 const std::string& help, const std::vector<std::string>& choices = {}) {
  auto* opt = app->add_option_function<std::string>(
      flag, [&opts, key](const std::string& v) { opts.overrides[key] = v; }, help);
  if (!choices.empty()) opt->check(CLI::IsMember(choices));
}

void add_feature_options(CLI::App* app, ExperimentOptions& opts) {
  app->add_option("--config", opts.config_file, "key=value settings file (flags override it)");
  add_setting(app, opts, "--wavelet", "wavelet", "wavelet family", {"haar", "db2", "db4", "db8"});
  add_setting(app, opts, "--boundary", "boundary", "boundary extension", {"symmetric", "periodic", "zero"});
  add_setting(app, opts, "--levels", "levels", "decomposition depth J");
  add_setting(app, opts, "--kmax", "kmax", "Higuchi k_max for sub-bands");
  add_setting(app, opts, "--kmax-raw", "kmax_raw", "Higuchi k_max for the raw signal");
  add_setting(app, opts, "--fd", "fd", "fractal dimension estimator", {"higuchi", "katz"});
}

void add_model_options(CLI::App* app, ExperimentOptions& opts) {
  add_setting(app, opts, "--mmc-dim", "mmc_dim", "reduced dimension d");
  add_setting(app, opts, "--knn-k", "knn_k", "neighbours k");
  add_setting(app, opts, "--cascade", "cascade", "energy/TEO screening", {"on", "off"});
  add_setting(app, opts, "--mmc-features", "mmc_features", "features fed to MMC", {"fd", "all"});
  add_setting(app, opts, "--seed", "seed", "seed recorded with the run");
}

struct DataSource {
  std::string manifest;
  std::string layout = "csv";
  std::string features;
  std::string cache;
};

void add_data_options(CLI::App* app, DataSource& src) {
  auto* m = app->add_option("--manifest", src.manifest, "dataset manifest (csv) or SAVEE root");
  auto* f = app->add_option("--features", src.features, "precomputed feature table");
  m->excludes(f);
  app->add_option("--layout", src.layout, "manifest layout")->check(CLI::IsMember({"csv", "savee_dirs"}));
}

FeatureCorpus load_corpus(const DataSource& src, const ExperimentConfig& config) {
  if (!src.features.empty()) {
    FeatureCorpus corpus;
    corpus.records = read_feature_csv(src.features);
    if (corpus.records.empty()) throw Error(ErrorKind::EmptyManifest, "feature table has no rows");
    if (corpus.records.front().features.levels != config.features.wavelet.levels) {
      throw Error(ErrorKind::Parameter, "feature table depth does not match --levels");
    }
    return corpus;
  }
  if (src.manifest.empty()) throw Error(ErrorKind::Parameter, "one of --manifest or --features is required");
  const auto layout = src.layout == "csv" ? ManifestLayout::Csv : ManifestLayout::SaveeDirs;
  const DatasetManifest manifest = load_manifest(src.manifest, layout);
  for (const auto& [speaker, count] : manifest.per_speaker_counts()) {
    std::cerr << "speaker " << speaker << ": " << count << " utterances\n";
  }
  std::optional<std::filesystem::path> cache;
  if (!src.cache.empty()) cache = src.cache;
  return extract_corpus(manifest, config.features, cache);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Fractal-dimension audio emotion recognition"};
  app.require_subcommand(1);

  // synth
  SynthSpec synth_spec = default_synth_spec();
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate the seeded synthetic corpus");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", synth_spec.seed, "generator seed");
  synth->add_option("--per-class", synth_spec.per_class_count, "clips per class");
  synth->add_option("--length", synth_spec.length, "samples per clip");
  synth->add_option("--sample-rate", synth_spec.sample_rate, "sample rate in Hz");

  // extract
  ExperimentOptions extract_opts;
  DataSource extract_src;
  std::string extract_out;
  auto* extract = app.add_subcommand("extract", "compute the feature table for a manifest");
  extract->add_option("--manifest", extract_src.manifest, "dataset manifest (csv) or SAVEE root")->required();
  extract->add_option("--layout", extract_src.layout, "manifest layout")->check(CLI::IsMember({"csv", "savee_dirs"}));
  extract->add_option("--out", extract_out, "feature table (reused as a cache when present)")->required();
  add_feature_options(extract, extract_opts);

  // train
  ExperimentOptions train_opts;
  DataSource train_src;
  std::string train_out, train_speakers;
  auto* train = app.add_subcommand("train", "fit a model and save it");
  add_data_options(train, train_src);
  train->add_option("--train-speakers", train_speakers, "comma-separated speakers (default: all)");
  train->add_option("--out", train_out, "model file")->required();
  add_feature_options(train, train_opts);
  add_model_options(train, train_opts);

  // eval
  ExperimentOptions eval_opts;
  DataSource eval_src;
  std::string eval_out = "-", eval_format = "text", eval_protocol = "one_vs_three";
  auto* eval = app.add_subcommand("eval", "run a speaker-split protocol");
  add_data_options(eval, eval_src);
  eval->add_option("--cache", eval_src.cache, "feature cache table");
  eval->add_option("--protocol", eval_protocol, "split protocol")
      ->check(CLI::IsMember({"one_vs_three", "two_vs_two"}));
  eval->add_option("--out", eval_out, "report path, - for stdout");
  eval->add_option("--format", eval_format, "report format")->check(CLI::IsMember({"text", "csv", "json"}));
  add_feature_options(eval, eval_opts);
  add_model_options(eval, eval_opts);

  // report
  std::string report_in, report_out = "-", report_format = "text";
  auto* report = app.add_subcommand("report", "re-render a json report");
  report->add_option("--in", report_in, "json report")->required();
  report->add_option("--out", report_out, "output path, - for stdout");
  report->add_option("--format", report_format, "output format")->check(CLI::IsMember({"text", "csv", "json"}));

  // predict
  std::string predict_model;
  std::vector<std::string> predict_wavs;
  auto* predict_cmd = app.add_subcommand("predict", "label WAV files with a saved model");
  predict_cmd->add_option("--model", predict_model, "model file")->required();
  predict_cmd->add_option("wavs", predict_wavs, "WAV files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*synth) {
    const auto corpus = generate_synthetic(synth_spec);
    write_synthetic(corpus, synth_out);
    std::cerr << "wrote " << corpus.clips.size() << " clips to " << synth_out << '\n';
  } else if (*extract) {
    const auto config = extract_opts.resolve();
    extract_src.cache = extract_out;
    const auto corpus = load_corpus(extract_src, config);
    if (corpus.records.empty()) throw Error(ErrorKind::EmptyManifest, "no utterance could be featurised");
    std::cerr << corpus.records.size() << " utterances featurised, " << corpus.skipped_paths.size() << " skipped\n";
  } else if (*train) {
    const auto config = train_opts.resolve();
    const auto corpus = load_corpus(train_src, config);
    const auto wanted = split_list(train_speakers);
    std::vector<LabeledFeatures> samples;
    for (const auto& r : corpus.records) {
      if (wanted.empty() || std::find(wanted.begin(), wanted.end(), r.speaker) != wanted.end()) {
        samples.push_back({r.features, r.emotion});
      }
    }
    const auto model = fit_model(samples, config.model);
    std::ofstream out(train_out, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + train_out);
    save_model(out, model, snapshot(config));
    std::cerr << "model fitted on " << samples.size() << " utterances\n";
  } else if (*eval) {
    const auto config = eval_opts.resolve();
    const auto corpus = load_corpus(eval_src, config);
    auto result = run_protocol(corpus, *parse_protocol(eval_protocol), config);
    emit_report(result, *parse_report_format(eval_format), eval_out);
  } else if (*report) {
    std::ifstream in(report_in);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + report_in);
    std::stringstream buf;
    buf << in.rdbuf();
    emit_report(parse_protocol_report(buf.str()), *parse_report_format(report_format), report_out);
  } else if (*predict_cmd) {
    std::ifstream in(predict_model);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + predict_model);
    const auto loaded = load_model(in);
    ExperimentConfig config;
    for (const auto& [k, v] : loaded.metadata) apply_setting(config, k, v);
    for (const auto& wav : predict_wavs) {
      const auto features = extract_features(read_wav(wav), config.features);
      std::cout << wav << ',' << to_string(predict(loaded.model, features)) << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fdaer::Error& e) {
    std::cerr << "fdaer: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "fdaer: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
