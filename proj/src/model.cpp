#include "emg/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "bytes.hpp"
#include "emg/deploy.hpp"

namespace emg {

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::kThreshold: return "threshold";
    case ModelKind::kVariance: return "variance";
    case ModelKind::kLogReg: return "logreg";
    case ModelKind::kKnn: return "knn";
    case ModelKind::kPcaLogReg: return "pca-logreg";
    case ModelKind::kForest: return "forest";
    case ModelKind::kGbt: return "gbt";
    case ModelKind::kEnsemble: return "ensemble";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& name) {
  for (int k = 0; k < 8; ++k) {
    if (name == model_kind_name(static_cast<ModelKind>(k))) return static_cast<ModelKind>(k);
  }
  throw std::runtime_error("unknown model '" + name + "'");
}

ModelKind TrainedModel::kind() const { return static_cast<ModelKind>(impl.index()); }

std::array<double, 3> soft_vote(const std::vector<std::array<double, 3>>& probas,
                                const std::vector<double>& weights) {
  if (probas.size() < 2) throw std::invalid_argument("ensemble: need at least 2 members");
  if (probas.size() != weights.size()) throw std::invalid_argument("ensemble: weight count");
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < probas.size(); ++i) {
    const double sum = probas[i][0] + probas[i][1] + probas[i][2];
    if (std::abs(sum - 1.0) > 1e-6) {
      throw std::runtime_error("ensemble: member " + std::to_string(i) +
                               " probability vector does not sum to 1");
    }
    for (int c = 0; c < 3; ++c) out[c] += weights[i] * probas[i][c];
  }
  return out;
}

std::array<double, 3> ensemble_proba(const EnsembleModel& e, const Window& w,
                                     const FeatureVector& f) {
  std::vector<std::array<double, 3>> member_probas;
  member_probas.reserve(e.members.size());
  for (const auto& m : e.members) member_probas.push_back(m.proba(w, f));
  return soft_vote(member_probas, e.weights);
}

Class ensemble_predict(const EnsembleModel& e, const Window& w, const FeatureVector& f) {
  return argmax_class(ensemble_proba(e, w, f));
}

namespace {

std::array<double, 3> one_hot(Class c) {
  std::array<double, 3> p{};
  p[static_cast<std::size_t>(c)] = 1.0;
  return p;
}

std::vector<double> to_vec(const std::array<double, kNumFeatures>& a) {
  return std::vector<double>(a.begin(), a.end());
}

}  // namespace

std::array<double, 3> TrainedModel::proba(const Window& w, const FeatureVector& f) const {
  return std::visit(
      [&](const auto& m) -> std::array<double, 3> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ThresholdModel>) {
          return one_hot(threshold_predict(m, w));
        } else if constexpr (std::is_same_v<T, VarianceModel>) {
          return one_hot(variance_predict(m, w));
        } else if constexpr (std::is_same_v<T, StandardizedLogReg>) {
          return logreg_proba(m.lr, to_vec(m.stdz.apply(f)));
        } else if constexpr (std::is_same_v<T, StandardizedKnn>) {
          return knn_proba(m.knn, m.stdz.apply(f));
        } else if constexpr (std::is_same_v<T, PcaLogReg>) {
          const auto projected = pca_project(m.pca, m.stdz.apply(f));
          return logreg_proba(m.lr, {projected[0], projected[1]});
        } else if constexpr (std::is_same_v<T, Forest>) {
          return forest_proba(m, f.as_array());
        } else if constexpr (std::is_same_v<T, GbtModel>) {
          return gbt_proba(m, f.as_array());
        } else {
          return ensemble_proba(m, w, f);
        }
      },
      impl);
}

Class TrainedModel::predict(const Window& w, const FeatureVector& f) const {
  // The gates and the forest have their own decision rules; the rest take
  // the probability argmax (ties toward the smallest class code).
  if (const auto* t = std::get_if<ThresholdModel>(&impl)) return threshold_predict(*t, w);
  if (const auto* v = std::get_if<VarianceModel>(&impl)) return variance_predict(*v, w);
  if (const auto* forest = std::get_if<Forest>(&impl)) {
    return forest_predict(*forest, f.as_array());
  }
  return argmax_class(proba(w, f));
}

TrainedModel train_model(ModelKind kind, const Dataset& train, const TrainParams& params) {
  const auto features = extract_features(train);
  const auto labels = dataset_labels(train);

  const auto standardized_arrays = [&](const Standardizer& s) {
    std::vector<std::array<double, kNumFeatures>> out;
    out.reserve(features.size());
    for (const auto& f : features) out.push_back(s.apply(f));
    return out;
  };

  switch (kind) {
    case ModelKind::kThreshold:
      return TrainedModel{fit_threshold(train)};
    case ModelKind::kVariance:
      return TrainedModel{fit_variance(train)};
    case ModelKind::kLogReg: {
      StandardizedLogReg m;
      m.stdz = fit_standardizer(features);
      std::vector<std::vector<double>> x;
      x.reserve(features.size());
      for (const auto& a : standardized_arrays(m.stdz)) x.push_back(to_vec(a));
      m.lr = train_logreg(x, labels, params.logreg);
      return TrainedModel{std::move(m)};
    }
    case ModelKind::kKnn: {
      StandardizedKnn m;
      m.stdz = fit_standardizer(features);
      m.knn = make_knn(params.knn_k, standardized_arrays(m.stdz), labels);
      return TrainedModel{std::move(m)};
    }
    case ModelKind::kPcaLogReg: {
      PcaLogReg m;
      m.stdz = fit_standardizer(features);
      const auto arrays = standardized_arrays(m.stdz);
      m.pca = pca_fit(arrays);
      std::vector<std::vector<double>> x;
      x.reserve(arrays.size());
      for (const auto& a : arrays) {
        const auto p = pca_project(m.pca, a);
        x.push_back({p[0], p[1]});
      }
      m.lr = train_logreg(x, labels, params.logreg);
      return TrainedModel{std::move(m)};
    }
    case ModelKind::kForest: {
      ForestConfig cfg;
      cfg.n_trees = params.n_trees;
      cfg.seed = params.seed;
      cfg.tree.max_depth = params.max_depth;
      std::vector<std::array<double, kNumFeatures>> x;
      x.reserve(features.size());
      for (const auto& f : features) x.push_back(f.as_array());
      return TrainedModel{train_forest(x, labels, cfg)};
    }
    case ModelKind::kGbt: {
      std::vector<std::array<double, kNumFeatures>> x;
      x.reserve(features.size());
      for (const auto& f : features) x.push_back(f.as_array());
      return TrainedModel{train_gbt(x, labels, params.gbt)};
    }
    case ModelKind::kEnsemble: {
      EnsembleModel e;
      if (params.ensemble_members.size() < 2) {
        throw std::invalid_argument("ensemble: need at least 2 members");
      }
      for (const ModelKind member : params.ensemble_members) {
        if (member == ModelKind::kEnsemble) {
          throw std::invalid_argument("ensemble: nested ensembles not supported");
        }
        e.members.push_back(train_model(member, train, params));
      }
      e.weights.assign(e.members.size(), 1.0 / static_cast<double>(e.members.size()));
      return TrainedModel{std::move(e)};
    }
  }
  throw std::invalid_argument("train_model: unknown kind");
}

// ---------------------------------------------------------------------------
// Tagged container.

namespace {

constexpr char kMagic[4] = {'E', 'M', 'G', 'M'};
constexpr std::uint8_t kVersion = 1;

void append_section(std::vector<std::uint8_t>& out, const char tag[4],
                    const std::vector<std::uint8_t>& payload) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(tag[i]));
  bytes::put_u32(out, static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
}

// Reads the 8-byte section header, checks the tag, and returns a Reader
// scoped to the payload.
bytes::Reader open_section(bytes::Reader& r, const char tag[4]) {
  const std::string tag_str(tag, tag + 4);
  r.set_context("section header " + tag_str);
  const std::uint8_t* got = r.take(4);
  if (!std::equal(got, got + 4, tag)) {
    throw std::runtime_error("model load: expected section " + tag_str + ", found '" +
                             std::string(got, got + 4) + "'");
  }
  const std::uint32_t len = r.u32();
  r.set_context("section " + tag_str);
  return bytes::Reader(r.take(len), len, "section " + tag_str);
}

void write_standardizer(std::vector<std::uint8_t>& out, const Standardizer& s) {
  std::vector<std::uint8_t> p;
  for (int d = 0; d < kNumFeatures; ++d) bytes::put_f64(p, s.mean[d]);
  for (int d = 0; d < kNumFeatures; ++d) bytes::put_f64(p, s.scale[d]);
  append_section(out, "STDZ", p);
}

Standardizer read_standardizer(bytes::Reader& r) {
  auto s = open_section(r, "STDZ");
  Standardizer out;
  for (int d = 0; d < kNumFeatures; ++d) out.mean[d] = s.f64();
  for (int d = 0; d < kNumFeatures; ++d) out.scale[d] = s.f64();
  return out;
}

void write_logreg(std::vector<std::uint8_t>& out, const LogRegModel& m) {
  std::vector<std::uint8_t> p;
  bytes::put_u32(p, static_cast<std::uint32_t>(m.dim));
  for (const double w : m.weights) bytes::put_f64(p, w);
  for (const double b : m.bias) bytes::put_f64(p, b);
  append_section(out, "WGHT", p);
}

LogRegModel read_logreg(bytes::Reader& r) {
  auto s = open_section(r, "WGHT");
  LogRegModel m;
  m.dim = s.u32();
  m.weights.resize(3 * m.dim);
  for (double& w : m.weights) w = s.f64();
  for (double& b : m.bias) b = s.f64();
  return m;
}

void write_forest(std::vector<std::uint8_t>& out, const Forest& f) {
  {
    std::vector<std::uint8_t> p;
    bytes::put_u64(p, f.cfg.seed);
    bytes::put_u32(p, static_cast<std::uint32_t>(f.cfg.n_trees));
    bytes::put_u32(p, static_cast<std::uint32_t>(f.cfg.tree.max_depth));
    bytes::put_u32(p, static_cast<std::uint32_t>(f.cfg.tree.min_samples_split));
    bytes::put_u32(p, static_cast<std::uint32_t>(f.cfg.tree.max_features));
    append_section(out, "FRSC", p);
  }
  std::vector<std::uint8_t> p;
  bytes::put_u32(p, static_cast<std::uint32_t>(f.trees.size()));
  for (const auto& tree : f.trees) {
    bytes::put_u32(p, static_cast<std::uint32_t>(tree.nodes.size()));
    for (const auto& node : tree.nodes) {
      bytes::put_i8(p, node.feature);
      bytes::put_f32(p, node.threshold);
      bytes::put_i32(p, node.left);
      bytes::put_i32(p, node.right);
      for (const auto c : node.class_counts) bytes::put_u32(p, c);
    }
  }
  append_section(out, "FRST", p);
}

Forest read_forest(bytes::Reader& r) {
  Forest f;
  {
    auto s = open_section(r, "FRSC");
    f.cfg.seed = s.u64();
    f.cfg.n_trees = static_cast<int>(s.u32());
    f.cfg.tree.max_depth = static_cast<int>(s.u32());
    f.cfg.tree.min_samples_split = static_cast<int>(s.u32());
    f.cfg.tree.max_features = static_cast<int>(s.u32());
  }
  auto s = open_section(r, "FRST");
  const std::uint32_t n_trees = s.u32();
  f.trees.resize(n_trees);
  for (auto& tree : f.trees) {
    const std::uint32_t n_nodes = s.u32();
    tree.nodes.resize(n_nodes);
    for (auto& node : tree.nodes) {
      node.feature = s.i8();
      node.threshold = s.f32();
      node.left = s.i32();
      node.right = s.i32();
      for (auto& c : node.class_counts) c = s.u32();
    }
  }
  return f;
}

void write_gbt(std::vector<std::uint8_t>& out, const GbtModel& m) {
  {
    std::vector<std::uint8_t> p;
    bytes::put_f64(p, m.cfg.learning_rate);
    bytes::put_f64(p, m.cfg.lambda);
    bytes::put_f64(p, m.cfg.gamma);
    bytes::put_u32(p, static_cast<std::uint32_t>(m.rounds.size()));
    bytes::put_u32(p, static_cast<std::uint32_t>(m.cfg.max_depth));
    bytes::put_u32(p, static_cast<std::uint32_t>(m.cfg.min_samples_split));
    for (const double b : m.base_score) bytes::put_f64(p, b);
    append_section(out, "GBTC", p);
  }
  std::vector<std::uint8_t> p;
  for (const auto& round : m.rounds) {
    for (const auto& tree : round) {
      bytes::put_u32(p, static_cast<std::uint32_t>(tree.nodes.size()));
      for (const auto& node : tree.nodes) {
        bytes::put_i8(p, node.feature);
        bytes::put_f32(p, node.threshold);
        bytes::put_i32(p, node.left);
        bytes::put_i32(p, node.right);
        bytes::put_f64(p, node.weight);
      }
    }
  }
  append_section(out, "GBTT", p);
}

GbtModel read_gbt(bytes::Reader& r) {
  GbtModel m;
  std::uint32_t n_rounds = 0;
  {
    auto s = open_section(r, "GBTC");
    m.cfg.learning_rate = s.f64();
    m.cfg.lambda = s.f64();
    m.cfg.gamma = s.f64();
    n_rounds = s.u32();
    m.cfg.n_rounds = static_cast<int>(n_rounds);
    m.cfg.max_depth = static_cast<int>(s.u32());
    m.cfg.min_samples_split = static_cast<int>(s.u32());
    for (double& b : m.base_score) b = s.f64();
  }
  auto s = open_section(r, "GBTT");
  m.rounds.resize(n_rounds);
  for (auto& round : m.rounds) {
    for (auto& tree : round) {
      const std::uint32_t n_nodes = s.u32();
      tree.nodes.resize(n_nodes);
      for (auto& node : tree.nodes) {
        node.feature = s.i8();
        node.threshold = s.f32();
        node.left = s.i32();
        node.right = s.i32();
        node.weight = s.f64();
      }
    }
  }
  return m;
}

void write_body(std::vector<std::uint8_t>& out, const TrainedModel& m);

void write_ensemble(std::vector<std::uint8_t>& out, const EnsembleModel& e) {
  {
    std::vector<std::uint8_t> p;
    bytes::put_u32(p, static_cast<std::uint32_t>(e.members.size()));
    for (const double w : e.weights) bytes::put_f64(p, w);
    append_section(out, "ENSW", p);
  }
  for (const auto& member : e.members) {
    std::vector<std::uint8_t> nested = serialize_model(member);
    append_section(out, "MEMB", nested);
  }
}

EnsembleModel read_ensemble(bytes::Reader& r) {
  EnsembleModel e;
  std::uint32_t n = 0;
  {
    auto s = open_section(r, "ENSW");
    n = s.u32();
    if (n < 2) throw std::runtime_error("model load: ensemble needs at least 2 members");
    e.weights.resize(n);
    for (double& w : e.weights) w = s.f64();
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    auto s = open_section(r, "MEMB");
    const std::size_t len = s.remaining();
    const std::uint8_t* p = s.take(len);
    e.members.push_back(deserialize_model(std::vector<std::uint8_t>(p, p + len)));
  }
  return e;
}

void write_body(std::vector<std::uint8_t>& out, const TrainedModel& m) {
  std::visit(
      [&](const auto& impl) {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, ThresholdModel> || std::is_same_v<T, VarianceModel>) {
          std::vector<std::uint8_t> p;
          bytes::put_f64(p, impl.threshold);
          append_section(out, "GATE", p);
        } else if constexpr (std::is_same_v<T, StandardizedLogReg>) {
          write_standardizer(out, impl.stdz);
          write_logreg(out, impl.lr);
        } else if constexpr (std::is_same_v<T, StandardizedKnn>) {
          write_standardizer(out, impl.stdz);
          std::vector<std::uint8_t> p;
          bytes::put_u32(p, static_cast<std::uint32_t>(impl.knn.k));
          bytes::put_u32(p, static_cast<std::uint32_t>(impl.knn.points.size()));
          for (std::size_t i = 0; i < impl.knn.points.size(); ++i) {
            for (int d = 0; d < kNumFeatures; ++d) bytes::put_f64(p, impl.knn.points[i][d]);
            bytes::put_u8(p, static_cast<std::uint8_t>(impl.knn.labels[i]));
          }
          append_section(out, "KNND", p);
        } else if constexpr (std::is_same_v<T, PcaLogReg>) {
          write_standardizer(out, impl.stdz);
          std::vector<std::uint8_t> p;
          for (int d = 0; d < kNumFeatures; ++d) bytes::put_f64(p, impl.pca.mean[d]);
          for (int r = 0; r < 2; ++r) {
            for (int d = 0; d < kNumFeatures; ++d) bytes::put_f64(p, impl.pca.components[r][d]);
          }
          for (int r = 0; r < 2; ++r) bytes::put_f64(p, impl.pca.explained_variance_ratio[r]);
          append_section(out, "PCAM", p);
          write_logreg(out, impl.lr);
        } else if constexpr (std::is_same_v<T, Forest>) {
          write_forest(out, impl);
        } else if constexpr (std::is_same_v<T, GbtModel>) {
          write_gbt(out, impl);
        } else {
          write_ensemble(out, impl);
        }
      },
      m.impl);
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const TrainedModel& m) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  bytes::put_u8(out, kVersion);
  bytes::put_u8(out, static_cast<std::uint8_t>(m.kind()));
  write_body(out, m);
  return out;
}

TrainedModel deserialize_model(const std::vector<std::uint8_t>& data) {
  bytes::Reader r(data, "header");
  const std::uint8_t* magic = r.take(4);
  if (!std::equal(magic, magic + 4, kMagic)) {
    throw std::runtime_error("model load: bad magic (not an EMGM model file)");
  }
  const std::uint8_t version = r.u8();
  if (version != kVersion) {
    throw std::runtime_error("model load: unsupported version " + std::to_string(version));
  }
  const std::uint8_t kind_byte = r.u8();
  if (kind_byte > static_cast<std::uint8_t>(ModelKind::kEnsemble)) {
    throw std::runtime_error("model load: unknown model kind " + std::to_string(kind_byte));
  }
  const ModelKind kind = static_cast<ModelKind>(kind_byte);

  switch (kind) {
    case ModelKind::kThreshold: {
      auto s = open_section(r, "GATE");
      return TrainedModel{ThresholdModel{s.f64()}};
    }
    case ModelKind::kVariance: {
      auto s = open_section(r, "GATE");
      return TrainedModel{VarianceModel{s.f64()}};
    }
    case ModelKind::kLogReg: {
      StandardizedLogReg m;
      m.stdz = read_standardizer(r);
      m.lr = read_logreg(r);
      return TrainedModel{std::move(m)};
    }
    case ModelKind::kKnn: {
      StandardizedKnn m;
      m.stdz = read_standardizer(r);
      auto s = open_section(r, "KNND");
      const int k = static_cast<int>(s.u32());
      const std::uint32_t n = s.u32();
      std::vector<std::array<double, kNumFeatures>> points(n);
      std::vector<Class> labels(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        for (int d = 0; d < kNumFeatures; ++d) points[i][d] = s.f64();
        const std::uint8_t label = s.u8();
        if (label > 2) throw std::runtime_error("model load: bad class code in section KNND");
        labels[i] = static_cast<Class>(label);
      }
      m.knn = make_knn(k, std::move(points), std::move(labels));
      return TrainedModel{std::move(m)};
    }
    case ModelKind::kPcaLogReg: {
      PcaLogReg m;
      m.stdz = read_standardizer(r);
      auto s = open_section(r, "PCAM");
      for (int d = 0; d < kNumFeatures; ++d) m.pca.mean[d] = s.f64();
      for (int row = 0; row < 2; ++row) {
        for (int d = 0; d < kNumFeatures; ++d) m.pca.components[row][d] = s.f64();
      }
      for (int row = 0; row < 2; ++row) m.pca.explained_variance_ratio[row] = s.f64();
      m.lr = read_logreg(r);
      return TrainedModel{std::move(m)};
    }
    case ModelKind::kForest:
      return TrainedModel{read_forest(r)};
    case ModelKind::kGbt:
      return TrainedModel{read_gbt(r)};
    case ModelKind::kEnsemble:
      return TrainedModel{read_ensemble(r)};
  }
  throw std::runtime_error("model load: unreachable");
}

void save_model_file(const TrainedModel& m, const std::string& path) {
  std::vector<std::uint8_t> data;
  if (m.kind() == ModelKind::kForest) {
    // Forests ship in the flat deployment format.
    data = flat_encode(flatten(std::get<Forest>(m.impl)));
  } else {
    data = serialize_model(m);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

TrainedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (data.size() >= 4 && data[0] == 'E' && data[1] == 'M' && data[2] == 'G' && data[3] == 'F') {
    return TrainedModel{unflatten(flat_decode(data))};
  }
  return deserialize_model(data);
}

}  // namespace emg
