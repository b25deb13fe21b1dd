#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <set>

#include "emg/dataio.hpp"
#include "emg/eval.hpp"
#include "emg/model.hpp"
#include "oracles.hpp"

using namespace emg;
using doctest::Approx;

namespace {

// Label-only dataset: split and CV machinery never look at the samples.
Dataset labeled_dataset(std::size_t n_relax, std::size_t n_clench, std::size_t n_noise) {
  Dataset ds;
  ds.source = "labels";
  const auto add = [&](Class c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) ds.windows.push_back(oracles::constant_window(2048, c));
  };
  add(Class::RELAX, n_relax);
  add(Class::CLENCH, n_clench);
  add(Class::NOISE, n_noise);
  return ds;
}

// A reference three-class confusion table for the linear baseline, rows/cols
// reordered into RELAX, CLENCH, NOISE.
ConfusionMatrix logreg_baseline_cm() {
  ConfusionMatrix cm;
  cm.counts[0] = {62, 7, 21};   // actual RELAX
  cm.counts[1] = {13, 58, 18};  // actual CLENCH
  cm.counts[2] = {26, 2, 61};   // actual NOISE
  return cm;
}

}  // namespace

TEST_CASE("perfect predictions give a diagonal matrix and unit metrics") {
  std::vector<Class> y = {Class::RELAX, Class::CLENCH, Class::NOISE, Class::CLENCH};
  const ConfusionMatrix cm = confusion(y, y);
  CHECK(cm.trace() == 4);
  CHECK(cm.total() == 4);
  const MetricsReport r = metrics(cm);
  CHECK(r.accuracy == 1.0);
  for (int c = 0; c < 3; ++c) CHECK(r.per_class[c].f1 == 1.0);
}

TEST_CASE("confusion rejects mismatched lengths") {
  CHECK_THROWS_AS(confusion({Class::RELAX}, {}), std::invalid_argument);
}

TEST_CASE("reference linear-baseline table reproduces its reported metrics") {
  const MetricsReport r = metrics(logreg_baseline_cm());
  CHECK(r.accuracy == Approx(181.0 / 268.0).epsilon(1e-12));
  CHECK(r.accuracy == Approx(0.6754).epsilon(2e-4));
  CHECK(r.per_class[1].f1 == Approx(0.7436).epsilon(1e-3));
  CHECK(r.per_class[1].precision == Approx(58.0 / 67.0).epsilon(1e-12));
  CHECK(r.per_class[1].recall == Approx(58.0 / 89.0).epsilon(1e-12));
}

TEST_CASE("all-RELAX predictor on balanced data: accuracy 1/3, clench f1 0") {
  std::vector<Class> truth, pred;
  for (int i = 0; i < 30; ++i) {
    truth.push_back(static_cast<Class>(i % 3));
    pred.push_back(Class::RELAX);
  }
  const MetricsReport r = metrics(confusion(truth, pred));
  CHECK(r.accuracy == Approx(1.0 / 3.0));
  CHECK(r.per_class[1].f1 == 0.0);
  CHECK(r.per_class[1].precision == 0.0);
}

TEST_CASE("row sums equal class supports") {
  const ConfusionMatrix cm = logreg_baseline_cm();
  const MetricsReport r = metrics(cm);
  for (int c = 0; c < 3; ++c) {
    std::uint64_t row = 0;
    for (int k = 0; k < 3; ++k) row += cm.counts[c][k];
    CHECK(r.per_class[c].support == row);
  }
}

TEST_CASE("stratified split: divisible case is exact and deterministic") {
  const Dataset ds = labeled_dataset(100, 100, 100);
  const TrainTestSplit a = stratified_split(ds, {});
  CHECK(a.test.windows.size() == 60);
  CHECK(a.train.windows.size() == 240);
  CHECK(a.test.class_counts() == std::array<std::size_t, 3>{20, 20, 20});

  const TrainTestSplit b = stratified_split(ds, {});
  REQUIRE(a.test.windows.size() == b.test.windows.size());
  for (std::size_t i = 0; i < a.test.windows.size(); ++i) {
    CHECK(*a.test.windows[i].label == *b.test.windows[i].label);
  }

  SplitSpec other;
  other.seed = 999;
  const TrainTestSplit c = stratified_split(ds, other);
  CHECK(c.test.windows.size() == 60);
}

TEST_CASE("fraction 0.206 over 1302 windows yields a 268-window test set") {
  const Dataset ds = labeled_dataset(436, 433, 433);
  SplitSpec spec;
  spec.test_fraction = 0.206;
  const TrainTestSplit split = stratified_split(ds, spec);
  CHECK(split.test.windows.size() == 268);
  CHECK(split.test.class_counts() == std::array<std::size_t, 3>{90, 89, 89});
}

TEST_CASE("stratified split rejects classes with too few windows") {
  const Dataset ds = labeled_dataset(50, 50, 1);
  CHECK_THROWS_AS(stratified_split(ds, {}), std::runtime_error);
}

TEST_CASE("fold indices partition the dataset exactly") {
  const Dataset ds = labeled_dataset(23, 31, 17);
  const auto labels = dataset_labels(ds);
  const auto folds = stratified_fold_indices(labels, 5, 1738);
  REQUIRE(folds.size() == 5);
  std::set<std::size_t> seen;
  std::size_t total = 0;
  for (const auto& fold : folds) {
    total += fold.size();
    for (const std::size_t i : fold) CHECK(seen.insert(i).second);
  }
  CHECK(total == ds.windows.size());
  CHECK(seen.size() == ds.windows.size());
}

TEST_CASE("five folds over 50 per class validate 10 per class each") {
  const Dataset ds = labeled_dataset(50, 50, 50);
  const auto folds = stratified_fold_indices(dataset_labels(ds), 5, 1738);
  const auto labels = dataset_labels(ds);
  for (const auto& fold : folds) {
    CHECK(fold.size() == 30);
    std::array<int, 3> per_class{};
    for (const std::size_t i : fold) ++per_class[static_cast<int>(labels[i])];
    for (int c = 0; c < 3; ++c) CHECK(per_class[c] == 10);
  }
}

TEST_CASE("constant-prediction model scores the majority share under cv") {
  const Dataset ds = labeled_dataset(40, 40, 40);
  SplitSpec spec;
  spec.folds = 4;
  const CvResult cv = kfold_cv(ds, spec, [](const Dataset&) {
    // A gate that never fires only ever answers RELAX.
    return TrainedModel{ThresholdModel{1e18}};
  });
  REQUIRE(cv.folds.size() == 4);
  for (const auto& fold : cv.folds) CHECK(fold.accuracy == Approx(1.0 / 3.0));
  CHECK(cv.mean_accuracy == Approx(1.0 / 3.0));
  CHECK(cv.stddev_accuracy == Approx(0.0).scale(1.0));
}

TEST_CASE("cv propagates trainer failures with the fold index") {
  const Dataset ds = labeled_dataset(10, 10, 10);
  SplitSpec spec;
  spec.folds = 2;
  try {
    kfold_cv(ds, spec, [](const Dataset&) -> TrainedModel {
      throw std::runtime_error("boom");
    });
    FAIL("expected failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("fold 0") != std::string::npos);
  }
}

TEST_CASE("forest cv on synthetic data keeps folds within a 0.1 accuracy band") {
  SynthConfig cfg;
  cfg.n_windows_per_class = 50;
  const Dataset ds = synth_dataset(cfg);
  TrainParams params;
  params.n_trees = 30;
  const CvResult cv = kfold_cv(ds, {}, [&](const Dataset& train) {
    return train_model(ModelKind::kForest, train, params);
  });
  double lo = 1.0, hi = 0.0;
  for (const auto& fold : cv.folds) {
    lo = std::min(lo, fold.accuracy);
    hi = std::max(hi, fold.accuracy);
  }
  CHECK(hi - lo <= 0.1);
  CHECK(cv.mean_accuracy > 0.85);
}

TEST_CASE("cm accuracy equals pairwise streaming accuracy") {
  Xoshiro256ss rng(5);
  std::vector<Class> truth, pred;
  for (int i = 0; i < 500; ++i) {
    truth.push_back(static_cast<Class>(rng.uniform_int(3)));
    pred.push_back(static_cast<Class>(rng.uniform_int(3)));
  }
  const MetricsReport r = metrics(confusion(truth, pred));
  std::size_t agree = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == pred[i]) ++agree;
  }
  CHECK(r.accuracy == Approx(static_cast<double>(agree) / truth.size()).epsilon(1e-12));
}

TEST_CASE("latency benchmark reports sane statistics") {
  SynthConfig cfg;
  cfg.n_windows_per_class = 5;
  const Dataset ds = synth_dataset(cfg);
  TrainParams params;
  params.n_trees = 100;
  const TrainedModel forest = train_model(ModelKind::kForest, ds, params);

  const LatencyReport r = bench_latency(forest, ds.windows, 10);
  CHECK(r.n_timed >= 100);
  CHECK(r.combined.mean_us > 0.0);
  CHECK(r.combined.p99_us >= r.combined.mean_us / 2.0);
  CHECK(r.feature_extraction.p99_us >= r.feature_extraction.mean_us / 2.0);

  // 100 trees cost measurably more than one tree.
  params.n_trees = 1;
  const TrainedModel stump = train_model(ModelKind::kForest, ds, params);
  const LatencyReport r1 = bench_latency(stump, ds.windows, 10);
  CHECK(r.predict.mean_us > r1.predict.mean_us);
}

TEST_CASE("disagreement report: identical models never disagree") {
  SynthConfig cfg;
  cfg.n_windows_per_class = 10;
  const Dataset ds = synth_dataset(cfg);
  const TrainedModel gate{ThresholdModel{500.0}};
  const DisagreementReport r = disagreement_report({&gate, &gate}, ds);
  CHECK(r.rows.empty());
  CHECK(r.rate == 0.0);
}

TEST_CASE("disagreement rate matches a brute-force recount") {
  SynthConfig cfg;
  cfg.n_windows_per_class = 30;
  cfg.artifact_amp = 700.0;
  const Dataset ds = synth_dataset(cfg);
  const TrainedModel amp_gate{ThresholdModel{400.0}};
  const TrainedModel var_gate{VarianceModel{3000.0}};
  const DisagreementReport r = disagreement_report({&amp_gate, &var_gate}, ds);

  const auto feats = extract_features(ds);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < ds.windows.size(); ++i) {
    if (amp_gate.predict(ds.windows[i], feats[i]) != var_gate.predict(ds.windows[i], feats[i])) {
      ++differ;
    }
  }
  CHECK(r.rows.size() == differ);
  CHECK(r.rate == Approx(static_cast<double>(differ) / ds.windows.size()));
  CHECK(r.rate > 0.0);  // the thresholds straddle real windows
}

TEST_CASE("report text carries the documented keys") {
  const ConfusionMatrix cm = logreg_baseline_cm();
  const MetricsReport r = metrics(cm);
  const std::string kv = report_kv(cm, r);
  CHECK(kv.find("accuracy=0.675373") != std::string::npos);
  CHECK(kv.find("f1_CLENCH=") != std::string::npos);
  CHECK(kv.find("cm_NOISE_RELAX=26") != std::string::npos);
  const std::string table = format_report(cm, r);
  CHECK(table.find("accuracy: 0.6754") != std::string::npos);
}
