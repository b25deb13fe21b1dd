#include "emg/features.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace emg {

FeatureVector extract_stat_features(const Window& w) {
  const std::size_t n = w.samples.size();
  double sum = 0.0;
  for (const auto s : w.samples) sum += s;
  const double mean = sum / static_cast<double>(n);

  // All of Set A lives on the AC component: the raw signal rides on a ~2048
  // baseline that would otherwise swamp MAV and pin ZCR at zero.
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  double peak = 0.0;
  int crossings = 0;
  int prev_sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = static_cast<double>(w.samples[i]) - mean;
    abs_sum += std::abs(c);
    sq_sum += c * c;
    peak = std::max(peak, std::abs(c));
    const int sign = c > 0.0 ? 1 : (c < 0.0 ? -1 : 0);
    if (sign != 0) {
      if (prev_sign != 0 && sign != prev_sign) ++crossings;
      prev_sign = sign;
    }
  }

  FeatureVector f;
  f.mav = abs_sum / static_cast<double>(n);
  f.sd = n > 1 ? std::sqrt(sq_sum / static_cast<double>(n - 1)) : 0.0;
  f.max_amp = peak;
  f.zcr = crossings;
  return f;
}

std::vector<FeatureVector> extract_features(const Dataset& ds) {
  std::vector<FeatureVector> out(ds.windows.size());
  const std::int64_t n = static_cast<std::int64_t>(ds.windows.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = extract_stat_features(ds.windows[i]);
  }
  return out;
}

std::vector<Class> dataset_labels(const Dataset& ds) {
  std::vector<Class> labels;
  labels.reserve(ds.windows.size());
  for (const auto& w : ds.windows) {
    if (!w.label) throw std::runtime_error("dataset has unlabeled windows");
    labels.push_back(*w.label);
  }
  return labels;
}

std::array<double, kNumFeatures> Standardizer::apply(const FeatureVector& v) const {
  return apply(v.as_array());
}

std::array<double, kNumFeatures> Standardizer::apply(
    const std::array<double, kNumFeatures>& v) const {
  std::array<double, kNumFeatures> out;
  for (int d = 0; d < kNumFeatures; ++d) out[d] = (v[d] - mean[d]) / scale[d];
  return out;
}

Standardizer fit_standardizer(const std::vector<FeatureVector>& x) {
  if (x.empty()) throw std::invalid_argument("standardizer: empty input");
  const double n = static_cast<double>(x.size());
  Standardizer s;
  for (const auto& v : x) {
    const auto a = v.as_array();
    for (int d = 0; d < kNumFeatures; ++d) s.mean[d] += a[d];
  }
  for (int d = 0; d < kNumFeatures; ++d) s.mean[d] /= n;
  std::array<double, kNumFeatures> var{};
  for (const auto& v : x) {
    const auto a = v.as_array();
    for (int d = 0; d < kNumFeatures; ++d) {
      const double c = a[d] - s.mean[d];
      var[d] += c * c;
    }
  }
  for (int d = 0; d < kNumFeatures; ++d) {
    const double sd = std::sqrt(var[d] / n);  // population: two points -> scale 1
    s.scale[d] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string feature_table_csv(const std::vector<FeatureVector>& feats,
                              const std::vector<Class>& labels) {
  if (feats.size() != labels.size()) throw std::invalid_argument("feature table: size mismatch");
  std::string out = "mav,sd,max,zcr,label\n";
  for (std::size_t i = 0; i < feats.size(); ++i) {
    append_double(out, feats[i].mav);
    out.push_back(',');
    append_double(out, feats[i].sd);
    out.push_back(',');
    append_double(out, feats[i].max_amp);
    out.push_back(',');
    out.append(std::to_string(feats[i].zcr));
    out.push_back(',');
    out.append(class_name(labels[i]));
    out.push_back('\n');
  }
  return out;
}

}  // namespace emg
