#include "emg/cli.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "emg/dataio.hpp"
#include "emg/deploy.hpp"
#include "emg/eval.hpp"
#include "emg/model.hpp"
#include "emg/spectrogram.hpp"

namespace emg {

namespace {

struct SynthArgs {
  std::string out_path;
  SynthConfig cfg;
};

struct TrainArgs {
  std::string data_path;
  std::string model = "forest";
  std::string out_path;
  std::string report_path;
  std::string features_path;
  std::string members = "forest,gbt,logreg";
  double test_fraction = 0.2;
  int cv = 0;
  int max_depth = -1;  // -1 keeps per-model defaults (8 forest / 3 gbt)
  TrainParams params;
};

struct EvalArgs {
  std::string data_path;
  std::string model_path;
  std::string report_path;
  std::string features_path;
  std::string spectrogram_prefix;
  std::size_t window_index = 0;
  bool bench = false;
};

struct ExportArgs {
  std::string model_path;
  std::string out_path;
};

struct StreamArgs {
  std::string data_path;
  std::string model_path;
  std::string out_path;
  int stride_ms = 100;
  int horizon_ms = 500;
};

void print_class_counts(const Dataset& ds) {
  const auto counts = ds.class_counts();
  std::cout << "windows: " << ds.windows.size();
  for (int c = 0; c < 3; ++c) {
    std::cout << "  " << class_name(static_cast<Class>(c)) << "=" << counts[c];
  }
  std::cout << "\n";
}

void write_optional_outputs(const Dataset& ds, const std::string& features_path,
                            const std::string& spectrogram_prefix, std::size_t window_index) {
  if (!features_path.empty()) {
    write_text_file(features_path, feature_table_csv(extract_features(ds), dataset_labels(ds)));
    std::cout << "feature table: " << features_path << "\n";
  }
  if (!spectrogram_prefix.empty()) {
    if (window_index >= ds.windows.size()) {
      throw std::runtime_error("spectrogram: window index out of range");
    }
    const MelSpectrogram mel = mel_spectrogram(ds.windows[window_index]);
    write_text_file(spectrogram_prefix + ".csv", mel_to_csv(mel));
    write_text_file(spectrogram_prefix + ".pgm", mel_to_pgm(mel));
    std::cout << "spectrogram: " << spectrogram_prefix << ".csv / .pgm\n";
  }
}

int cmd_synth(const SynthArgs& args) {
  const Dataset ds = synth_dataset(args.cfg);
  write_dataset_csv(ds, args.out_path);
  std::cout << "wrote " << args.out_path << "\n";
  print_class_counts(ds);
  return 0;
}

TrainParams resolve_params(const TrainArgs& args) {
  TrainParams params = args.params;
  if (args.max_depth >= 0) {
    params.max_depth = args.max_depth;
    params.gbt.max_depth = args.max_depth;
  }
  params.ensemble_members.clear();
  std::stringstream ss(args.members);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) params.ensemble_members.push_back(parse_model_kind(item));
  }
  return params;
}

int cmd_train(const TrainArgs& args) {
  const Dataset ds = read_dataset_csv(args.data_path);
  print_class_counts(ds);
  const ModelKind kind = parse_model_kind(args.model);
  const TrainParams params = resolve_params(args);
  if (kind == ModelKind::kThreshold || kind == ModelKind::kVariance) {
    std::cout << "note: " << args.model
              << " is a binary amplitude heuristic; NOISE is never predicted\n";
  }

  SplitSpec spec;
  spec.test_fraction = args.test_fraction;
  spec.seed = params.seed;

  if (args.cv > 0) {
    spec.folds = args.cv;
    const CvResult cv = kfold_cv(ds, spec, [&](const Dataset& train) {
      return train_model(kind, train, params);
    });
    for (std::size_t f = 0; f < cv.folds.size(); ++f) {
      std::printf("fold %zu: accuracy %.4f  f1(CLENCH) %.4f\n", f, cv.folds[f].accuracy,
                  cv.folds[f].per_class[1].f1);
    }
    std::printf("cv mean accuracy %.4f  stddev %.4f\n", cv.mean_accuracy, cv.stddev_accuracy);
  }

  const TrainTestSplit split = stratified_split(ds, spec);
  const TrainedModel model = train_model(kind, split.train, params);
  const ConfusionMatrix cm = evaluate_model(model, split.test);
  const MetricsReport report = metrics(cm);
  std::cout << "held-out split (" << split.test.windows.size() << " windows)\n"
            << format_report(cm, report);

  if (!args.report_path.empty()) {
    write_text_file(args.report_path, report_kv(cm, report));
    std::cout << "report: " << args.report_path << "\n";
  }
  write_optional_outputs(ds, args.features_path, "", 0);
  if (!args.out_path.empty()) {
    save_model_file(model, args.out_path);
    std::cout << "model: " << args.out_path << "\n";
  }
  return 0;
}

int cmd_eval(const EvalArgs& args) {
  const Dataset ds = read_dataset_csv(args.data_path);
  const TrainedModel model = load_model_file(args.model_path);
  std::cout << "model: " << model_kind_name(model.kind()) << "\n";
  const ConfusionMatrix cm = evaluate_model(model, ds);
  const MetricsReport report = metrics(cm);
  std::cout << format_report(cm, report);
  if (!args.report_path.empty()) {
    write_text_file(args.report_path, report_kv(cm, report));
    std::cout << "report: " << args.report_path << "\n";
  }
  if (args.bench) {
    const LatencyReport lat = bench_latency(model, ds.windows, 10);
    std::printf("latency over %zu inferences (single thread):\n", lat.n_timed);
    std::printf("  features: mean %.2f us  p99 %.2f us\n", lat.feature_extraction.mean_us,
                lat.feature_extraction.p99_us);
    std::printf("  predict:  mean %.2f us  p99 %.2f us\n", lat.predict.mean_us,
                lat.predict.p99_us);
    std::printf("  combined: mean %.2f us  p99 %.2f us\n", lat.combined.mean_us,
                lat.combined.p99_us);
  }
  write_optional_outputs(ds, args.features_path, args.spectrogram_prefix, args.window_index);
  return 0;
}

int cmd_export(const ExportArgs& args) {
  const TrainedModel model = load_model_file(args.model_path);
  if (model.kind() != ModelKind::kForest) {
    throw std::runtime_error("export: " + args.model_path + " is not a forest model");
  }
  const CodegenOutput out = codegen(std::get<Forest>(model.impl));
  write_text_file(args.out_path, out.source_text);
  std::cout << "wrote " << args.out_path << "\n";
  std::cout << "nodes: " << out.node_count << "\n";
  std::cout << "est flash: " << out.est_flash_bytes << " bytes\n";
  std::cout << "est ram: " << out.est_ram_bytes << " bytes\n";
  return 0;
}

int cmd_stream(const StreamArgs& args) {
  const std::vector<Sample> samples = parse_stream_csv(read_text_file(args.data_path));
  std::vector<int> adc;
  adc.reserve(samples.size());
  for (const Sample& s : samples) adc.push_back(s.adc);

  const TrainedModel model = load_model_file(args.model_path);
  const auto trace = run_stream(adc, model, args.stride_ms, args.horizon_ms);
  write_text_file(args.out_path, trace_to_csv(trace));
  std::cout << "wrote " << args.out_path << " (" << trace.size() << " steps)\n";
  std::cout << "majority vote k = " << args.horizon_ms / args.stride_ms << "\n";
  std::cout << "transitions: raw " << count_transitions(trace, false) << ", smoothed "
            << count_transitions(trace, true) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"EMG window classification toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic labeled dataset CSV");
  synth_cmd->add_option("-o,--output", synth.out_path, "output CSV path")->required();
  synth_cmd->add_option("--per-class", synth.cfg.n_windows_per_class, "windows per class")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.cfg.seed, "generator seed");
  synth_cmd->add_option("--baseline", synth.cfg.baseline, "ADC baseline");
  synth_cmd->add_option("--relax-sigma", synth.cfg.relax_sigma, "resting noise sigma");
  synth_cmd->add_option("--clench-sigma", synth.cfg.clench_sigma, "contraction sigma");
  synth_cmd->add_option("--artifact-amp", synth.cfg.artifact_amp, "motion artifact amplitude");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train a model and report held-out metrics");
  train_cmd->add_option("data", train.data_path, "session CSV")->required();
  train_cmd->add_option("--model", train.model, "model kind")
      ->check(CLI::IsMember({"threshold", "variance", "logreg", "knn", "pca-logreg", "forest",
                             "gbt", "ensemble"}));
  train_cmd->add_option("-o,--output", train.out_path, "model file to write");
  train_cmd->add_option("--seed", train.params.seed, "training seed");
  train_cmd->add_option("--trees", train.params.n_trees, "forest size")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--max-depth", train.max_depth, "tree depth cap");
  train_cmd->add_option("--k", train.params.knn_k, "neighbors for knn")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--cv", train.cv, "also run k-fold cross-validation");
  train_cmd->add_option("--test-fraction", train.test_fraction, "held-out fraction");
  train_cmd->add_option("--iters", train.params.logreg.iterations, "logreg iterations");
  train_cmd->add_option("--lr", train.params.logreg.learning_rate, "logreg learning rate");
  train_cmd->add_option("--l2", train.params.logreg.l2, "logreg L2 penalty");
  train_cmd->add_option("--rounds", train.params.gbt.n_rounds, "gbt boosting rounds");
  train_cmd->add_option("--eta", train.params.gbt.learning_rate, "gbt shrinkage");
  train_cmd->add_option("--lambda", train.params.gbt.lambda, "gbt leaf L2");
  train_cmd->add_option("--gamma", train.params.gbt.gamma, "gbt split penalty");
  train_cmd->add_option("--members", train.members, "ensemble members (comma list)");
  train_cmd->add_option("--report", train.report_path, "write key=value metrics");
  train_cmd->add_option("--features-out", train.features_path, "write feature table CSV");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model on a session CSV");
  eval_cmd->add_option("data", eval.data_path, "session CSV")->required();
  eval_cmd->add_option("--model-file", eval.model_path, "saved model")->required();
  eval_cmd->add_option("--report", eval.report_path, "write key=value metrics");
  eval_cmd->add_flag("--bench", eval.bench, "measure per-window latency");
  eval_cmd->add_option("--features-out", eval.features_path, "write feature table CSV");
  eval_cmd->add_option("--spectrogram-out", eval.spectrogram_prefix,
                       "write <prefix>.csv and <prefix>.pgm of one window's mel spectrogram");
  eval_cmd->add_option("--window-index", eval.window_index, "window for --spectrogram-out");

  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export", "compile a flat forest to branch source");
  export_cmd->add_option("model", exp.model_path, "flat forest (.bin)")->required();
  export_cmd->add_option("-o,--output", exp.out_path, "source file to write")->required();

  StreamArgs stream;
  auto* stream_cmd = app.add_subcommand("stream", "replay a stream with smoothing");
  stream_cmd->add_option("data", stream.data_path, "stream CSV")->required();
  stream_cmd->add_option("--model-file", stream.model_path, "saved model")->required();
  stream_cmd->add_option("--stride-ms", stream.stride_ms, "prediction stride");
  stream_cmd->add_option("--horizon-ms", stream.horizon_ms, "smoothing horizon");
  stream_cmd->add_option("-o,--output", stream.out_path, "trace CSV path")->required();

  std::vector<const char*> argv;
  argv.push_back("emg");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (train_cmd->parsed()) return cmd_train(train);
    if (eval_cmd->parsed()) return cmd_eval(eval);
    if (export_cmd->parsed()) return cmd_export(exp);
    if (stream_cmd->parsed()) return cmd_stream(stream);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace emg
