#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "emg/forest.hpp"
#include "emg/model.hpp"

namespace emg {

// Index-based forest container decodable without allocation on a target
// device. Little-endian throughout:
//   header: magic "EMGF", u8 version=1, u8 n_classes, u8 n_features, u8 pad,
//           u32 n_trees
//   per tree: u16 node_count, then nodes of 10 bytes each:
//           i8 feature (-1 = leaf), f32 threshold, u16 left, u16 right,
//           u8 leaf_class
// Node 0 is the root of its tree. Split rule: go left when
// feature_value <= threshold, identical to training.
struct FlatNode {
  std::int8_t feature = -1;
  float threshold = 0.0f;
  std::uint16_t left = 0;
  std::uint16_t right = 0;
  std::uint8_t leaf_class = 0;
};

struct FlatTree {
  std::vector<FlatNode> nodes;
};

struct FlatModel {
  std::uint8_t version = 1;
  std::uint8_t n_classes = 3;
  std::uint8_t n_features = 4;
  std::vector<FlatTree> trees;
};

// Throws if any tree holds more than 65535 nodes.
FlatModel flatten(const Forest& f);
Class flat_predict(const FlatModel& fm, const std::array<double, kNumFeatures>& v);

std::vector<std::uint8_t> flat_encode(const FlatModel& fm);
// Validation failures name the offending part ("header", "tree 3 nodes", ...).
FlatModel flat_decode(const std::vector<std::uint8_t>& bytes);

// Flat trees expand back to a Forest whose leaves carry one-hot counts for
// the stored class; hard-vote predictions are unchanged.
Forest unflatten(const FlatModel& fm);

// Static decision source: one nested-conditional function per tree over
// f[0..3] plus a vote aggregation function, C syntax. Footprint model is
// a documented constant per node, not a measured binary size.
constexpr int kBranchFlashBytes = 8;
constexpr int kLeafFlashBytes = 2;
constexpr int kCodegenRamBytes = 16;  // vote counters + loop state

struct CodegenOutput {
  std::string source_text;
  std::size_t node_count = 0;
  std::size_t est_flash_bytes = 0;
  std::size_t est_ram_bytes = kCodegenRamBytes;
};

CodegenOutput codegen(const Forest& f);
CodegenOutput codegen(const FlatModel& fm);

// Test interpreter over the generated text: parses every tree_<i> function
// back into decision logic and applies the emitted modal-vote rule.
Class interpret_codegen(const std::string& source, const std::array<double, kNumFeatures>& v);

// Majority-vote smoother over the last k predictions. On a tied vote the
// previous output is retained (first-output ties fall back to the smallest
// class code).
class Smoother {
 public:
  explicit Smoother(int horizon);  // horizon = k >= 1
  Class step(Class p);
  int horizon() const { return horizon_; }

 private:
  int horizon_;
  std::deque<Class> buffer_;
  bool has_output_ = false;
  Class output_ = Class::RELAX;
};

struct StreamPoint {
  std::uint64_t t_ms = 0;
  Class raw = Class::RELAX;
  Class smoothed = Class::RELAX;
};

// Sliding-window replay: a 1000-sample window advanced by stride_ms, one
// prediction per step, smoothed with k = horizon_ms / stride_ms. stride must
// divide both the 1000 ms window rate and the horizon.
std::vector<StreamPoint> run_stream(const std::vector<int>& adc, const TrainedModel& model,
                                    int stride_ms, int horizon_ms = 500);

std::string trace_to_csv(const std::vector<StreamPoint>& trace);  // t_ms,raw,smoothed
int count_transitions(const std::vector<StreamPoint>& trace, bool smoothed);

}  // namespace emg
