#include "emg/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "emg/rng.hpp"

namespace emg {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts) {
    for (const auto c : row) t += c;
  }
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  return counts[0][0] + counts[1][1] + counts[2][2];
}

ConfusionMatrix confusion(const std::vector<Class>& y_true, const std::vector<Class>& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw std::invalid_argument("confusion: label sequences differ in length");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ++cm.counts[static_cast<std::size_t>(y_true[i])][static_cast<std::size_t>(y_pred[i])];
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  const std::uint64_t total = cm.total();
  r.accuracy = total ? static_cast<double>(cm.trace()) / static_cast<double>(total) : 0.0;
  for (int c = 0; c < 3; ++c) {
    std::uint64_t col = 0, row = 0;
    for (int k = 0; k < 3; ++k) {
      col += cm.counts[k][c];
      row += cm.counts[c][k];
    }
    const std::uint64_t tp = cm.counts[c][c];
    ClassMetrics& m = r.per_class[c];
    m.support = row;
    m.precision = col ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
    m.recall = row ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
  }
  return r;
}

namespace {

std::array<std::vector<std::size_t>, 3> indices_by_class(const std::vector<Class>& labels) {
  std::array<std::vector<std::size_t>, 3> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return by_class;
}

void shuffle_indices(std::vector<std::size_t>& idx, Xoshiro256ss& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_int(i);
    std::swap(idx[i - 1], idx[j]);
  }
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& idx, const char* tag) {
  Dataset out;
  out.source = ds.source + " (" + tag + ")";
  out.windows.reserve(idx.size());
  for (const std::size_t i : idx) out.windows.push_back(ds.windows[i]);
  return out;
}

}  // namespace

TrainTestSplit stratified_split(const Dataset& ds, const SplitSpec& spec) {
  if (spec.test_fraction <= 0.0 || spec.test_fraction >= 1.0) {
    throw std::invalid_argument("split: test fraction must lie in (0, 1)");
  }
  const auto labels = dataset_labels(ds);
  auto by_class = indices_by_class(labels);

  std::vector<std::size_t> train_idx, test_idx;
  for (int c = 0; c < 3; ++c) {
    auto& idx = by_class[c];
    if (idx.size() < 2) {
      throw std::runtime_error(std::string("split: class ") +
                               class_name(static_cast<Class>(c)) + " has too few windows");
    }
    Xoshiro256ss rng(derive_seed(spec.seed, 0xA11, static_cast<std::uint64_t>(c)));
    shuffle_indices(idx, rng);
    std::size_t n_test = static_cast<std::size_t>(
        std::lround(spec.test_fraction * static_cast<double>(idx.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
    test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + n_test);
    train_idx.insert(train_idx.end(), idx.begin() + n_test, idx.end());
  }
  // Dataset order is preserved so that the split is stable to inspect.
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {subset(ds, train_idx, "train"), subset(ds, test_idx, "test")};
}

std::vector<std::vector<std::size_t>> stratified_fold_indices(const std::vector<Class>& labels,
                                                              int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("cv: need at least 2 folds");
  auto by_class = indices_by_class(labels);
  std::vector<std::vector<std::size_t>> out(folds);
  for (int c = 0; c < 3; ++c) {
    auto& idx = by_class[c];
    if (idx.size() < static_cast<std::size_t>(folds)) {
      throw std::runtime_error(std::string("cv: class ") + class_name(static_cast<Class>(c)) +
                               " has fewer windows than folds");
    }
    Xoshiro256ss rng(derive_seed(seed, 0xF01D, static_cast<std::uint64_t>(c)));
    shuffle_indices(idx, rng);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out[i % folds].push_back(idx[i]);
    }
  }
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

CvResult kfold_cv(const Dataset& ds, const SplitSpec& spec, const Trainer& trainer) {
  const auto labels = dataset_labels(ds);
  const auto folds = stratified_fold_indices(labels, spec.folds, spec.seed);

  CvResult result;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> train_idx;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g == f) continue;
      train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(train_idx.begin(), train_idx.end());

    TrainedModel model = [&] {
      try {
        return trainer(subset(ds, train_idx, "cv-train"));
      } catch (const std::exception& e) {
        throw std::runtime_error("cv fold " + std::to_string(f) + ": " + e.what());
      }
    }();

    const Dataset val = subset(ds, folds[f], "cv-val");
    result.folds.push_back(metrics(evaluate_model(model, val)));
  }

  double mean = 0.0;
  for (const auto& r : result.folds) mean += r.accuracy;
  mean /= static_cast<double>(result.folds.size());
  double var = 0.0;
  for (const auto& r : result.folds) var += (r.accuracy - mean) * (r.accuracy - mean);
  result.mean_accuracy = mean;
  result.stddev_accuracy = std::sqrt(var / static_cast<double>(result.folds.size()));
  return result;
}

ConfusionMatrix evaluate_model(const TrainedModel& m, const Dataset& ds) {
  const auto labels = dataset_labels(ds);
  const auto features = extract_features(ds);
  std::vector<Class> preds(ds.windows.size());
  const std::int64_t n = static_cast<std::int64_t>(ds.windows.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    preds[i] = m.predict(ds.windows[i], features[i]);
  }
  return confusion(labels, preds);
}

namespace {

LatencyStats stats_from(std::vector<double>& samples_us) {
  LatencyStats s;
  double sum = 0.0;
  for (const double v : samples_us) sum += v;
  s.mean_us = sum / static_cast<double>(samples_us.size());
  std::sort(samples_us.begin(), samples_us.end());
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(samples_us.size())));
  s.p99_us = samples_us[std::min(samples_us.size() - 1, rank == 0 ? 0 : rank - 1)];
  return s;
}

}  // namespace

LatencyReport bench_latency(const TrainedModel& m, const std::vector<Window>& inputs,
                            int repeats) {
  if (inputs.empty()) throw std::invalid_argument("bench: no inputs");
  using clock = std::chrono::steady_clock;
  const auto to_us = [](clock::duration d) {
    return std::chrono::duration<double, std::micro>(d).count();
  };

  // Warm-up pass (untimed) touches caches and any lazy init.
  for (const auto& w : inputs) {
    const FeatureVector f = extract_stat_features(w);
    (void)m.predict(w, f);
  }

  std::size_t n_timed = static_cast<std::size_t>(repeats) * inputs.size();
  while (n_timed < 100) n_timed += inputs.size();  // contract: >= 100 timed inferences

  std::vector<double> feat_us, pred_us, both_us;
  feat_us.reserve(n_timed);
  pred_us.reserve(n_timed);
  both_us.reserve(n_timed);
  for (std::size_t i = 0; i < n_timed; ++i) {
    const Window& w = inputs[i % inputs.size()];
    const auto t0 = clock::now();
    const FeatureVector f = extract_stat_features(w);
    const auto t1 = clock::now();
    volatile Class p = m.predict(w, f);
    (void)p;
    const auto t2 = clock::now();
    feat_us.push_back(to_us(t1 - t0));
    pred_us.push_back(to_us(t2 - t1));
    both_us.push_back(to_us(t2 - t0));
  }

  LatencyReport r;
  r.feature_extraction = stats_from(feat_us);
  r.predict = stats_from(pred_us);
  r.combined = stats_from(both_us);
  r.n_timed = n_timed;
  return r;
}

DisagreementReport disagreement_report(const std::vector<const TrainedModel*>& models,
                                       const Dataset& ds) {
  if (models.size() < 2) throw std::invalid_argument("disagreement: need at least 2 models");
  const auto labels = dataset_labels(ds);
  const auto features = extract_features(ds);

  DisagreementReport report;
  for (std::size_t i = 0; i < ds.windows.size(); ++i) {
    DisagreementRow row;
    row.window_id = i;
    row.truth = labels[i];
    bool differ = false;
    for (const TrainedModel* m : models) {
      row.predictions.push_back(m->predict(ds.windows[i], features[i]));
      if (row.predictions.back() != row.predictions.front()) differ = true;
    }
    if (differ) report.rows.push_back(std::move(row));
  }
  report.rate = ds.windows.empty()
                    ? 0.0
                    : static_cast<double>(report.rows.size()) /
                          static_cast<double>(ds.windows.size());
  return report;
}

std::string format_report(const ConfusionMatrix& cm, const MetricsReport& r) {
  std::ostringstream os;
  os << "confusion matrix (rows = actual, cols = predicted)\n";
  os << "            RELAX  CLENCH   NOISE\n";
  for (int a = 0; a < 3; ++a) {
    char line[64];
    std::snprintf(line, sizeof line, "%-9s %7llu %7llu %7llu\n",
                  class_name(static_cast<Class>(a)),
                  static_cast<unsigned long long>(cm.counts[a][0]),
                  static_cast<unsigned long long>(cm.counts[a][1]),
                  static_cast<unsigned long long>(cm.counts[a][2]));
    os << line;
  }
  char acc[64];
  std::snprintf(acc, sizeof acc, "accuracy: %.4f\n", r.accuracy);
  os << acc;
  os << "class     precision  recall      f1  support\n";
  for (int c = 0; c < 3; ++c) {
    char line[96];
    std::snprintf(line, sizeof line, "%-9s %9.4f %7.4f %7.4f %8llu\n",
                  class_name(static_cast<Class>(c)), r.per_class[c].precision,
                  r.per_class[c].recall, r.per_class[c].f1,
                  static_cast<unsigned long long>(r.per_class[c].support));
    os << line;
  }
  return os.str();
}

std::string report_kv(const ConfusionMatrix& cm, const MetricsReport& r) {
  std::ostringstream os;
  char buf[96];
  std::snprintf(buf, sizeof buf, "accuracy=%.6f\n", r.accuracy);
  os << buf;
  for (int c = 0; c < 3; ++c) {
    const char* name = class_name(static_cast<Class>(c));
    std::snprintf(buf, sizeof buf, "precision_%s=%.6f\nrecall_%s=%.6f\nf1_%s=%.6f\nsupport_%s=%llu\n",
                  name, r.per_class[c].precision, name, r.per_class[c].recall, name,
                  r.per_class[c].f1, name,
                  static_cast<unsigned long long>(r.per_class[c].support));
    os << buf;
  }
  for (int a = 0; a < 3; ++a) {
    for (int p = 0; p < 3; ++p) {
      std::snprintf(buf, sizeof buf, "cm_%s_%s=%llu\n", class_name(static_cast<Class>(a)),
                    class_name(static_cast<Class>(p)),
                    static_cast<unsigned long long>(cm.counts[a][p]));
      os << buf;
    }
  }
  return os.str();
}

}  // namespace emg
