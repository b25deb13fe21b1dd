#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "emg/forest.hpp"
#include "emg/gbt.hpp"
#include "emg/heuristics.hpp"
#include "emg/knn.hpp"
#include "emg/linear.hpp"

namespace emg {

enum class ModelKind : std::uint8_t {
  kThreshold = 0,
  kVariance = 1,
  kLogReg = 2,
  kKnn = 3,
  kPcaLogReg = 4,
  kForest = 5,
  kGbt = 6,
  kEnsemble = 7,
};

const char* model_kind_name(ModelKind k);
ModelKind parse_model_kind(const std::string& name);  // "forest", "pca-logreg", ...

// Learners that consume standardized features carry their own standardizer,
// fitted on training data only.
struct StandardizedLogReg {
  Standardizer stdz;
  LogRegModel lr;
};

struct StandardizedKnn {
  Standardizer stdz;
  KnnModel knn;
};

struct PcaLogReg {
  Standardizer stdz;
  PcaModel pca;
  LogRegModel lr;  // trained on the 2-D projection
};

struct TrainedModel;

// Soft-voting ensemble; members are full models, each fed the input
// representation it was trained on (window for heuristics, raw or
// standardized features for the rest).
struct EnsembleModel {
  std::vector<TrainedModel> members;
  std::vector<double> weights;  // non-negative, sum 1
};

// Weighted mean of member probability vectors. Throws if any member vector
// does not sum to 1 within 1e-6.
std::array<double, 3> soft_vote(const std::vector<std::array<double, 3>>& probas,
                                const std::vector<double>& weights);

struct TrainedModel {
  std::variant<ThresholdModel, VarianceModel, StandardizedLogReg, StandardizedKnn,
               PcaLogReg, Forest, GbtModel, EnsembleModel>
      impl;

  ModelKind kind() const;
  std::array<double, 3> proba(const Window& w, const FeatureVector& f) const;
  // Forest keeps its modal-vote rule; heuristics their gate; everything else
  // is argmax of proba with ties toward the smallest class code.
  Class predict(const Window& w, const FeatureVector& f) const;
};

std::array<double, 3> ensemble_proba(const EnsembleModel& e, const Window& w,
                                     const FeatureVector& f);
Class ensemble_predict(const EnsembleModel& e, const Window& w, const FeatureVector& f);

// Hyperparameters for the whole ladder; unused fields are ignored by kinds
// that do not need them. Defaults mirror the reference configuration
// (seed 1738, 100 trees, k = 5).
struct TrainParams {
  std::uint64_t seed = 1738;
  int n_trees = 100;
  int max_depth = 8;
  int knn_k = 5;
  LogRegConfig logreg;
  GbtConfig gbt;
  std::vector<ModelKind> ensemble_members = {ModelKind::kForest, ModelKind::kGbt,
                                             ModelKind::kLogReg};
};

// Trains any model kind on a labeled dataset (features are extracted and, if
// the kind needs it, standardized internally).
TrainedModel train_model(ModelKind kind, const Dataset& train, const TrainParams& params);

// Tagged binary container: magic "EMGM", version byte, kind byte, then
// 4-byte-tag + u32-length sections with little-endian payloads (64-bit floats
// except where noted). Load errors name the section that failed.
std::vector<std::uint8_t> serialize_model(const TrainedModel& m);
TrainedModel deserialize_model(const std::vector<std::uint8_t>& bytes);

void save_model_file(const TrainedModel& m, const std::string& path);
// Reads either container by magic: "EMGM" (tagged) or "EMGF" (flat forest).
TrainedModel load_model_file(const std::string& path);

}  // namespace emg
