// Throughput comparison of the OpenMP kernels against the serial reference
// paths. Usage: emg-bench [windows_per_class] [trees]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "emg/dataio.hpp"
#include "emg/features.hpp"
#include "emg/forest.hpp"
#include "emg/reference.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e30;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int hardware_threads() {
#ifdef _OPENMP
  return omp_get_num_procs();
#else
  return 1;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  const int per_class = argc > 1 ? std::atoi(argv[1]) : 500;
  const int n_trees = argc > 2 ? std::atoi(argv[2]) : 100;

  emg::SynthConfig cfg;
  cfg.n_windows_per_class = per_class;
  const emg::Dataset ds = emg::synth_dataset(cfg);
  std::printf("dataset: %zu windows, %d trees, %d thread(s) available\n", ds.windows.size(),
              n_trees, hardware_threads());

  // Feature extraction: serial reference vs parallel kernel.
  std::vector<emg::FeatureVector> serial_feats, parallel_feats;
  const double t_feat_serial =
      time_best_of(5, [&] { serial_feats = emg::reference::extract_features(ds); });
  const double t_feat_parallel =
      time_best_of(5, [&] { parallel_feats = emg::extract_features(ds); });
  for (std::size_t i = 0; i < serial_feats.size(); ++i) {
    if (serial_feats[i].as_array() != parallel_feats[i].as_array()) {
      std::fprintf(stderr, "feature mismatch at window %zu\n", i);
      return 1;
    }
  }
  std::printf("features   serial %8.2f ms   parallel %8.2f ms   speedup %.2fx\n",
              t_feat_serial * 1e3, t_feat_parallel * 1e3, t_feat_serial / t_feat_parallel);

  std::vector<std::array<double, emg::kNumFeatures>> x;
  x.reserve(parallel_feats.size());
  for (const auto& f : parallel_feats) x.push_back(f.as_array());
  const std::vector<emg::Class> y = emg::dataset_labels(ds);

  // Forest training: one thread vs all of them; same bytes either way.
  emg::ForestConfig fcfg;
  fcfg.n_trees = n_trees;
  emg::Forest forest_serial, forest_parallel;
  set_threads(1);
  const double t_train_serial =
      time_best_of(3, [&] { forest_serial = emg::train_forest(x, y, fcfg); });
  set_threads(hardware_threads());
  const double t_train_parallel =
      time_best_of(3, [&] { forest_parallel = emg::train_forest(x, y, fcfg); });
  std::printf("train      serial %8.2f ms   parallel %8.2f ms   speedup %.2fx\n",
              t_train_serial * 1e3, t_train_parallel * 1e3, t_train_serial / t_train_parallel);

  // Batch prediction.
  std::vector<emg::Class> preds_serial(x.size()), preds_parallel;
  const double t_pred_serial = time_best_of(5, [&] {
    for (std::size_t i = 0; i < x.size(); ++i) {
      preds_serial[i] = emg::forest_predict(forest_serial, x[i]);
    }
  });
  const double t_pred_parallel =
      time_best_of(5, [&] { preds_parallel = emg::forest_predict_batch(forest_parallel, x); });
  std::printf("predict    serial %8.2f ms   parallel %8.2f ms   speedup %.2fx\n",
              t_pred_serial * 1e3, t_pred_parallel * 1e3, t_pred_serial / t_pred_parallel);

  if (preds_serial != preds_parallel) {
    std::fprintf(stderr, "prediction mismatch between serial and parallel forests\n");
    return 1;
  }
  std::printf("serial and parallel outputs identical\n");
  return 0;
}
