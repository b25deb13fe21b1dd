#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "emg/dataio.hpp"
#include "emg/features.hpp"
#include "emg/model.hpp"

namespace emg {

// 3x3 counts, rows = actual, columns = predicted, class order RELAX,
// CLENCH, NOISE.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 3>, 3> counts{};

  std::uint64_t total() const;
  std::uint64_t trace() const;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::array<ClassMetrics, 3> per_class{};
};

struct SplitSpec {
  double test_fraction = 0.2;
  int folds = 5;
  std::uint64_t seed = 1738;
};

ConfusionMatrix confusion(const std::vector<Class>& y_true, const std::vector<Class>& y_pred);
// Precision/recall/F1 per class; an unpredicted class gets precision 0 and a
// class with precision = recall = 0 gets F1 = 0.
MetricsReport metrics(const ConfusionMatrix& cm);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Per-class shuffled split: round(test_fraction * class count) windows per
// class go to test (clamped so both sides keep at least one window).
// Deterministic in spec.seed. Throws if a class has fewer than 2 windows.
TrainTestSplit stratified_split(const Dataset& ds, const SplitSpec& spec);

struct CvResult {
  std::vector<MetricsReport> folds;
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;
};

using Trainer = std::function<TrainedModel(const Dataset&)>;

// Stratified k-fold cross-validation; every window lands in exactly one
// validation fold. Trainer exceptions are rethrown tagged with the fold.
CvResult kfold_cv(const Dataset& ds, const SplitSpec& spec, const Trainer& trainer);

// Validation index sets per fold, exposed for the partition property test.
std::vector<std::vector<std::size_t>> stratified_fold_indices(const std::vector<Class>& labels,
                                                              int folds, std::uint64_t seed);

ConfusionMatrix evaluate_model(const TrainedModel& m, const Dataset& ds);

struct LatencyStats {
  double mean_us = 0.0;
  double p99_us = 0.0;
};

struct LatencyReport {
  LatencyStats feature_extraction;
  LatencyStats predict;
  LatencyStats combined;
  std::size_t n_timed = 0;
};

// Wall-clock per-window statistics on a single thread; `repeats` full passes
// over the inputs after one warm-up pass, at least 100 timed inferences.
LatencyReport bench_latency(const TrainedModel& m, const std::vector<Window>& inputs,
                            int repeats);

struct DisagreementRow {
  std::size_t window_id = 0;
  std::vector<Class> predictions;  // one per model
  Class truth = Class::RELAX;
};

struct DisagreementReport {
  std::vector<DisagreementRow> rows;  // only windows where models differ
  double rate = 0.0;
};

DisagreementReport disagreement_report(const std::vector<const TrainedModel*>& models,
                                       const Dataset& ds);

// Human-readable table and machine-readable `key=value` lines ("accuracy",
// "precision_RELAX", "recall_CLENCH", "f1_NOISE", "support_*", plus the raw
// "cm_<actual>_<predicted>" counts).
std::string format_report(const ConfusionMatrix& cm, const MetricsReport& r);
std::string report_kv(const ConfusionMatrix& cm, const MetricsReport& r);

}  // namespace emg
