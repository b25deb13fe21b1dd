#include "emg/deploy.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

#include "bytes.hpp"

namespace emg {

namespace {

constexpr char kFlatMagic[4] = {'E', 'M', 'G', 'F'};

std::uint8_t leaf_class_of(const TreeNode& node) {
  return static_cast<std::uint8_t>(argmax_class(node.class_counts));
}

}  // namespace

FlatModel flatten(const Forest& f) {
  FlatModel fm;
  fm.trees.reserve(f.trees.size());
  for (std::size_t t = 0; t < f.trees.size(); ++t) {
    const Tree& tree = f.trees[t];
    if (tree.nodes.size() > 65535) {
      throw std::runtime_error("flatten: tree " + std::to_string(t) +
                               " too large for uint16 indexing");
    }
    FlatTree ft;
    ft.nodes.reserve(tree.nodes.size());
    for (const TreeNode& node : tree.nodes) {
      FlatNode fn;
      if (node.feature >= 0) {
        fn.feature = node.feature;
        fn.threshold = node.threshold;
        fn.left = static_cast<std::uint16_t>(node.left);
        fn.right = static_cast<std::uint16_t>(node.right);
      } else {
        fn.leaf_class = leaf_class_of(node);
      }
      ft.nodes.push_back(fn);
    }
    fm.trees.push_back(std::move(ft));
  }
  return fm;
}

Class flat_predict(const FlatModel& fm, const std::array<double, kNumFeatures>& v) {
  std::array<std::uint32_t, 3> votes{};
  for (const FlatTree& tree : fm.trees) {
    std::size_t idx = 0;
    while (tree.nodes[idx].feature >= 0) {
      const FlatNode& node = tree.nodes[idx];
      idx = v[node.feature] <= static_cast<double>(node.threshold) ? node.left : node.right;
    }
    ++votes[tree.nodes[idx].leaf_class];
  }
  return argmax_class(votes);
}

std::vector<std::uint8_t> flat_encode(const FlatModel& fm) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kFlatMagic, kFlatMagic + 4);
  bytes::put_u8(out, fm.version);
  bytes::put_u8(out, fm.n_classes);
  bytes::put_u8(out, fm.n_features);
  bytes::put_u8(out, 0);  // pad
  bytes::put_u32(out, static_cast<std::uint32_t>(fm.trees.size()));
  for (const FlatTree& tree : fm.trees) {
    bytes::put_u16(out, static_cast<std::uint16_t>(tree.nodes.size()));
    for (const FlatNode& node : tree.nodes) {
      bytes::put_i8(out, node.feature);
      bytes::put_f32(out, node.threshold);
      bytes::put_u16(out, node.left);
      bytes::put_u16(out, node.right);
      bytes::put_u8(out, node.leaf_class);
    }
  }
  return out;
}

FlatModel flat_decode(const std::vector<std::uint8_t>& data) {
  bytes::Reader r(data, "header");
  const std::uint8_t* magic = r.take(4);
  if (!std::equal(magic, magic + 4, kFlatMagic)) {
    throw std::runtime_error("model load: bad magic (not an EMGF flat model)");
  }
  FlatModel fm;
  fm.version = r.u8();
  if (fm.version != 1) {
    throw std::runtime_error("model load: unsupported flat model version " +
                             std::to_string(fm.version));
  }
  fm.n_classes = r.u8();
  fm.n_features = r.u8();
  if (fm.n_classes != 3 || fm.n_features != 4) {
    throw std::runtime_error("model load: flat model shape mismatch in header");
  }
  r.u8();  // pad
  const std::uint32_t n_trees = r.u32();
  fm.trees.resize(n_trees);
  for (std::uint32_t t = 0; t < n_trees; ++t) {
    r.set_context("tree " + std::to_string(t) + " nodes");
    const std::uint16_t n_nodes = r.u16();
    if (n_nodes == 0) {
      throw std::runtime_error("model load: tree " + std::to_string(t) + " is empty");
    }
    auto& nodes = fm.trees[t].nodes;
    nodes.resize(n_nodes);
    for (auto& node : nodes) {
      node.feature = r.i8();
      node.threshold = r.f32();
      node.left = r.u16();
      node.right = r.u16();
      node.leaf_class = r.u8();
      if (node.feature >= 0) {
        if (node.feature >= 4 || node.left >= n_nodes || node.right >= n_nodes) {
          throw std::runtime_error("model load: tree " + std::to_string(t) +
                                   " has an out-of-range node");
        }
      } else if (node.leaf_class > 2) {
        throw std::runtime_error("model load: tree " + std::to_string(t) +
                                 " has a bad leaf class");
      }
    }
  }
  if (!r.done()) throw std::runtime_error("model load: trailing bytes after flat model");
  return fm;
}

Forest unflatten(const FlatModel& fm) {
  Forest f;
  f.cfg.n_trees = static_cast<int>(fm.trees.size());
  f.trees.reserve(fm.trees.size());
  for (const FlatTree& ft : fm.trees) {
    Tree tree;
    tree.nodes.reserve(ft.nodes.size());
    for (const FlatNode& fn : ft.nodes) {
      TreeNode node;
      if (fn.feature >= 0) {
        node.feature = fn.feature;
        node.threshold = fn.threshold;
        node.left = fn.left;
        node.right = fn.right;
      } else {
        node.class_counts[fn.leaf_class] = 1;  // one-hot; hard votes unchanged
      }
      tree.nodes.push_back(node);
    }
    f.trees.push_back(std::move(tree));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Code generation.

namespace {

void append_double_literal(std::string& out, float threshold) {
  // Shortest round-trip form of the float's exact double value; the
  // interpreter and any C compiler recover the identical constant.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, static_cast<double>(threshold));
  out.append(buf, res.ptr);
}

void emit_node(std::string& out, const FlatTree& tree, std::size_t idx, int indent) {
  const FlatNode& node = tree.nodes[idx];
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (node.feature < 0) {
    out += pad + "return " + std::to_string(static_cast<int>(node.leaf_class)) + ";\n";
    return;
  }
  out += pad + "if (f[" + std::to_string(static_cast<int>(node.feature)) + "] <= ";
  append_double_literal(out, node.threshold);
  out += ") {\n";
  emit_node(out, tree, node.left, indent + 1);
  out += pad + "} else {\n";
  emit_node(out, tree, node.right, indent + 1);
  out += pad + "}\n";
}

}  // namespace

CodegenOutput codegen(const FlatModel& fm) {
  CodegenOutput out;
  std::string& src = out.source_text;
  src += "/* Decision forest compiled to static branches.\n";
  src += " * Input: f[0]=mav f[1]=sd f[2]=max f[3]=zcr (raw feature units).\n";
  src += " * Output: class code 0=RELAX 1=CLENCH 2=NOISE.\n";
  src += " */\n\n";

  std::size_t branches = 0, leaves = 0;
  for (std::size_t t = 0; t < fm.trees.size(); ++t) {
    src += "static int tree_" + std::to_string(t) + "(const double f[4]) {\n";
    emit_node(src, fm.trees[t], 0, 1);
    src += "}\n\n";
    for (const FlatNode& node : fm.trees[t].nodes) {
      if (node.feature >= 0) {
        ++branches;
      } else {
        ++leaves;
      }
    }
  }

  src += "int emg_forest_predict(const double f[4]) {\n";
  src += "  int votes[3] = {0, 0, 0};\n";
  for (std::size_t t = 0; t < fm.trees.size(); ++t) {
    src += "  votes[tree_" + std::to_string(t) + "(f)]++;\n";
  }
  src += "  int best = 0;\n";
  src += "  for (int c = 1; c < 3; ++c) {\n";
  src += "    if (votes[c] > votes[best]) best = c;\n";
  src += "  }\n";
  src += "  return best;\n";
  src += "}\n";

  out.node_count = branches + leaves;
  out.est_flash_bytes = branches * kBranchFlashBytes + leaves * kLeafFlashBytes;
  out.est_ram_bytes = kCodegenRamBytes;
  return out;
}

CodegenOutput codegen(const Forest& f) { return codegen(flatten(f)); }

// ---------------------------------------------------------------------------
// Interpreter over the generated text (test machinery).

namespace {

class SourceParser {
 public:
  explicit SourceParser(const std::string& src) : src_(src) {}

  // Parses every `tree_<i>` function plus the vote order in the predict
  // function; returns trees in vote order.
  std::vector<FlatTree> parse() {
    std::vector<FlatTree> trees;
    while (true) {
      skip_ws();
      if (pos_ >= src_.size()) break;
      if (try_consume("static int tree_")) {
        (void)parse_uint();  // definitions arrive in index order
        expect("(const double f[4]) {");
        FlatTree tree;
        parse_stmt(tree);
        expect("}");
        trees.push_back(std::move(tree));
      } else if (try_consume("int emg_forest_predict(const double f[4]) {")) {
        vote_order_.clear();
        expect("int votes[3] = {0, 0, 0};");
        while (true) {
          skip_ws();
          if (try_consume("votes[tree_")) {
            vote_order_.push_back(parse_uint());
            expect("(f)]++;");
          } else {
            break;
          }
        }
        // Remaining body is the fixed argmax boilerplate; skip to the end.
        pos_ = src_.size();
      } else {
        ++pos_;  // comment or unknown byte outside a function
      }
    }
    if (vote_order_.empty()) throw std::runtime_error("codegen parse: no vote function");
    std::vector<FlatTree> ordered;
    ordered.reserve(vote_order_.size());
    for (const std::size_t t : vote_order_) {
      if (t >= trees.size()) throw std::runtime_error("codegen parse: vote of unknown tree");
      ordered.push_back(trees[t]);
    }
    return ordered;
  }

 private:
  // Builds the statement into `tree` and returns the new node's index.
  int parse_stmt(FlatTree& tree) {
    skip_ws();
    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (try_consume("return ")) {
      const std::size_t cls = parse_uint();
      expect(";");
      tree.nodes[node_index].feature = -1;
      tree.nodes[node_index].leaf_class = static_cast<std::uint8_t>(cls);
      return node_index;
    }
    expect("if (f[");
    const std::size_t feature = parse_uint();
    expect("] <= ");
    const double threshold = parse_double();
    expect(") {");
    const int left = parse_stmt(tree);
    expect("} else {");
    const int right = parse_stmt(tree);
    expect("}");
    tree.nodes[node_index].feature = static_cast<std::int8_t>(feature);
    tree.nodes[node_index].threshold = static_cast<float>(threshold);
    tree.nodes[node_index].left = static_cast<std::uint16_t>(left);
    tree.nodes[node_index].right = static_cast<std::uint16_t>(right);
    return node_index;
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])) != 0) {
      ++pos_;
    }
  }

  bool try_consume(const std::string& text) {
    if (src_.compare(pos_, text.size(), text) == 0) {
      pos_ += text.size();
      return true;
    }
    return false;
  }

  void expect(const std::string& text) {
    skip_ws();
    if (!try_consume(text)) {
      throw std::runtime_error("codegen parse: expected '" + text + "' at offset " +
                               std::to_string(pos_));
    }
  }

  std::size_t parse_uint() {
    skip_ws();
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("codegen parse: expected integer");
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    return value;
  }

  double parse_double() {
    skip_ws();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("codegen parse: expected number");
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    return value;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  std::vector<std::size_t> vote_order_;
};

}  // namespace

Class interpret_codegen(const std::string& source, const std::array<double, kNumFeatures>& v) {
  SourceParser parser(source);
  const std::vector<FlatTree> trees = parser.parse();
  std::array<std::uint32_t, 3> votes{};
  for (const FlatTree& tree : trees) {
    std::size_t idx = 0;
    while (tree.nodes[idx].feature >= 0) {
      const FlatNode& node = tree.nodes[idx];
      idx = v[node.feature] <= static_cast<double>(node.threshold) ? node.left : node.right;
    }
    ++votes[tree.nodes[idx].leaf_class];
  }
  return argmax_class(votes);
}

// ---------------------------------------------------------------------------
// Streaming.

Smoother::Smoother(int horizon) : horizon_(horizon) {
  if (horizon < 1) throw std::invalid_argument("smoother: horizon must be >= 1");
}

Class Smoother::step(Class p) {
  buffer_.push_back(p);
  if (static_cast<int>(buffer_.size()) > horizon_) buffer_.pop_front();

  std::array<std::uint32_t, 3> counts{};
  for (const Class c : buffer_) ++counts[static_cast<std::size_t>(c)];
  const std::uint32_t top = *std::max_element(counts.begin(), counts.end());
  int n_tied = 0;
  int winner = 0;
  for (int c = 0; c < 3; ++c) {
    if (counts[c] == top) {
      ++n_tied;
      if (n_tied == 1) winner = c;  // smallest tied code
    }
  }
  if (n_tied == 1) {
    output_ = static_cast<Class>(winner);
  } else if (!has_output_) {
    output_ = static_cast<Class>(winner);  // first-output tie: smallest code
  }
  // Tied with history: previous output is retained.
  has_output_ = true;
  return output_;
}

std::vector<StreamPoint> run_stream(const std::vector<int>& adc, const TrainedModel& model,
                                    int stride_ms, int horizon_ms) {
  if (stride_ms < 1 || kWindowLen % stride_ms != 0) {
    throw std::invalid_argument("stream: stride must divide the 1000 ms window");
  }
  if (horizon_ms < stride_ms || horizon_ms % stride_ms != 0) {
    throw std::invalid_argument("stream: horizon must be a multiple of the stride");
  }
  if (adc.size() < static_cast<std::size_t>(kWindowLen)) {
    throw std::runtime_error("stream: shorter than one window");
  }

  Smoother smoother(horizon_ms / stride_ms);
  std::vector<StreamPoint> trace;
  Window w;
  w.samples.resize(kWindowLen);
  for (std::size_t start = 0; start + kWindowLen <= adc.size();
       start += static_cast<std::size_t>(stride_ms)) {
    for (int i = 0; i < kWindowLen; ++i) {
      w.samples[i] = static_cast<std::uint16_t>(std::clamp(adc[start + i], 0, kAdcMax));
    }
    const FeatureVector f = extract_stat_features(w);
    StreamPoint pt;
    pt.t_ms = start + kWindowLen - 1;
    pt.raw = model.predict(w, f);
    pt.smoothed = smoother.step(pt.raw);
    trace.push_back(pt);
  }
  return trace;
}

std::string trace_to_csv(const std::vector<StreamPoint>& trace) {
  std::string out = "t_ms,raw,smoothed\n";
  for (const StreamPoint& pt : trace) {
    out += std::to_string(pt.t_ms);
    out.push_back(',');
    out += class_name(pt.raw);
    out.push_back(',');
    out += class_name(pt.smoothed);
    out.push_back('\n');
  }
  return out;
}

int count_transitions(const std::vector<StreamPoint>& trace, bool smoothed) {
  int n = 0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const Class a = smoothed ? trace[i - 1].smoothed : trace[i - 1].raw;
    const Class b = smoothed ? trace[i].smoothed : trace[i].raw;
    if (a != b) ++n;
  }
  return n;
}

}  // namespace emg
