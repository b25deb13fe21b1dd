#include "emg/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "emg/rng.hpp"

namespace emg {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

[[noreturn]] void row_error(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("csv line " + std::to_string(line_no) + ": " + what);
}

std::uint64_t parse_u64_field(std::string_view field, std::size_t line_no, const char* name) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    row_error(line_no, std::string("malformed ") + name + " '" + std::string(field) + "'");
  }
  return value;
}

int parse_adc_field(std::string_view field, std::size_t line_no) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    row_error(line_no, "malformed adc '" + std::string(field) + "'");
  }
  if (value < 0 || value > kAdcMax) row_error(line_no, "adc out of range");
  return value;
}

// Splits `line` at commas into at most `max_fields` views; returns the count.
std::size_t split_fields(std::string_view line, std::string_view* out, std::size_t max_fields) {
  std::size_t n = 0;
  std::size_t start = 0;
  while (n < max_fields) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out[n++] = line.substr(start);
      return n;
    }
    out[n++] = line.substr(start, comma - start);
    start = comma + 1;
  }
  return n;
}

// Shared row walker for the labeled and unlabeled variants.
template <typename RowFn>
void parse_csv_rows(const std::string& text, std::string_view expected_header, RowFn&& on_row) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::uint64_t prev_t = 0;
  bool have_prev = false;

  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line = trim_cr(std::string_view(text).substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;

    if (!header_seen) {
      if (line != expected_header) {
        row_error(line_no, "expected header '" + std::string(expected_header) + "'");
      }
      header_seen = true;
      continue;
    }

    std::string_view fields[4];
    const std::size_t n_fields = split_fields(line, fields, 4);
    const std::uint64_t t = parse_u64_field(fields[0], line_no, "timestamp");
    if (have_prev && t <= prev_t) row_error(line_no, "non-monotonic timestamp");
    prev_t = t;
    have_prev = true;
    on_row(line_no, t, fields, n_fields);
  }
  if (!header_seen) throw std::runtime_error("csv: empty input");
}

// Slow-drift + white-noise floor shared by all three classes.
void add_relax_background(std::vector<double>& x, const SynthConfig& cfg, Xoshiro256ss& rng) {
  const double drift_amp = 2.0 * cfg.relax_sigma;
  const double drift_hz = rng.uniform(0.2, 0.8);
  const double drift_phase = rng.uniform(0.0, 2.0 * kPi);
  for (int i = 0; i < kWindowLen; ++i) {
    const double t = static_cast<double>(i) / kSampleRateHz;
    x[i] += rng.normal(0.0, cfg.relax_sigma);
    x[i] += drift_amp * std::sin(2.0 * kPi * drift_hz * t + drift_phase);
  }
}

void add_clench_burst(std::vector<double>& x, const SynthConfig& cfg, Xoshiro256ss& rng) {
  // Broadband content as a bank of 20..150 Hz sinusoids with random phase;
  // equal per-component amplitude chosen so the summed variance is sigma^2.
  constexpr int kComponents = 27;  // 20, 25, ..., 150 Hz
  const double amp = cfg.clench_sigma * std::sqrt(2.0 / kComponents);
  for (int c = 0; c < kComponents; ++c) {
    const double hz = 20.0 + 5.0 * c;
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    for (int i = 0; i < kWindowLen; ++i) {
      const double t = static_cast<double>(i) / kSampleRateHz;
      x[i] += amp * std::sin(2.0 * kPi * hz * t + phase);
    }
  }
}

void add_motion_artifact(std::vector<double>& x, const SynthConfig& cfg, Xoshiro256ss& rng) {
  // Low-frequency sway: a few 1-10 Hz sinusoids.
  const int n_waves = 2 + static_cast<int>(rng.uniform_int(3));  // 2..4
  for (int c = 0; c < n_waves; ++c) {
    const double hz = rng.uniform(1.0, 10.0);
    const double amp = cfg.artifact_amp * rng.uniform(0.5, 1.0);
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    for (int i = 0; i < kWindowLen; ++i) {
      const double t = static_cast<double>(i) / kSampleRateHz;
      x[i] += amp * std::sin(2.0 * kPi * hz * t + phase);
    }
  }
  // Sparse mechanical spikes (cable hits, jolts): short triangular pulses.
  const int n_spikes = 1 + static_cast<int>(rng.uniform_int(4));  // 1..4
  for (int s = 0; s < n_spikes; ++s) {
    const int center = static_cast<int>(rng.uniform_int(kWindowLen));
    const int half_width = 3 + static_cast<int>(rng.uniform_int(8));  // 3..10
    const double sign = rng.next_double() < 0.5 ? -1.0 : 1.0;
    const double amp = sign * cfg.artifact_amp * rng.uniform(1.5, 3.5);
    for (int i = std::max(0, center - half_width);
         i < std::min(kWindowLen, center + half_width + 1); ++i) {
      const double frac = 1.0 - std::abs(i - center) / static_cast<double>(half_width + 1);
      x[i] += amp * frac;
    }
  }
}

Window render_window(const std::vector<double>& x, Class label) {
  Window w;
  w.samples.resize(kWindowLen);
  for (int i = 0; i < kWindowLen; ++i) {
    const long long v = std::llround(x[i]);
    w.samples[i] = static_cast<std::uint16_t>(std::clamp<long long>(v, 0, kAdcMax));
  }
  w.label = label;
  return w;
}

}  // namespace

const char* class_name(Class c) {
  switch (c) {
    case Class::RELAX: return "RELAX";
    case Class::CLENCH: return "CLENCH";
    case Class::NOISE: return "NOISE";
  }
  return "?";
}

Class parse_class(const std::string& name) {
  if (name == "RELAX") return Class::RELAX;
  if (name == "CLENCH") return Class::CLENCH;
  if (name == "NOISE") return Class::NOISE;
  throw std::runtime_error("unknown label '" + name + "'");
}

std::array<std::size_t, 3> Dataset::class_counts() const {
  std::array<std::size_t, 3> counts{};
  for (const auto& w : windows) {
    if (w.label) ++counts[static_cast<std::size_t>(*w.label)];
  }
  return counts;
}

void SynthConfig::validate() const {
  if (n_windows_per_class <= 0) throw std::invalid_argument("synth: windows per class must be positive");
  if (baseline < 0 || baseline > kAdcMax) throw std::invalid_argument("synth: baseline outside ADC range");
  if (relax_sigma <= 0 || clench_sigma <= 0 || artifact_amp <= 0) {
    throw std::invalid_argument("synth: amplitudes must be positive");
  }
}

std::vector<LabeledSample> parse_session_csv(const std::string& text) {
  std::vector<LabeledSample> out;
  parse_csv_rows(text, "timestamp_ms,adc,label",
                 [&](std::size_t line_no, std::uint64_t t, std::string_view* fields,
                     std::size_t n_fields) {
                   if (n_fields != 3) row_error(line_no, "expected 3 fields");
                   const int adc = parse_adc_field(fields[1], line_no);
                   Class label;
                   try {
                     label = parse_class(std::string(fields[2]));
                   } catch (const std::exception& e) {
                     row_error(line_no, e.what());
                   }
                   out.push_back({t, adc, label});
                 });
  return out;
}

std::vector<Sample> parse_stream_csv(const std::string& text) {
  std::vector<Sample> out;
  const bool labeled = text.rfind("timestamp_ms,adc,label", 0) == 0;
  parse_csv_rows(text, labeled ? "timestamp_ms,adc,label" : "timestamp_ms,adc",
                 [&](std::size_t line_no, std::uint64_t t, std::string_view* fields,
                     std::size_t n_fields) {
                   if (n_fields != (labeled ? 3u : 2u)) row_error(line_no, "bad field count");
                   out.push_back({t, parse_adc_field(fields[1], line_no)});
                 });
  return out;
}

Dataset segment_windows(const std::vector<LabeledSample>& samples) {
  if (samples.size() < static_cast<std::size_t>(kWindowLen)) {
    throw std::runtime_error("segment: input shorter than one window");
  }
  Dataset ds;
  ds.source = "segmented stream";
  std::size_t run_start = 0;
  const auto flush_run = [&](std::size_t run_end) {
    // Emit consecutive windows inside one constant-label run; drop remainder.
    const Class label = samples[run_start].label;
    for (std::size_t b = run_start; b + kWindowLen <= run_end; b += kWindowLen) {
      Window w;
      w.samples.resize(kWindowLen);
      for (int i = 0; i < kWindowLen; ++i) {
        w.samples[i] = static_cast<std::uint16_t>(samples[b + i].adc);
      }
      w.label = label;
      ds.windows.push_back(std::move(w));
    }
  };
  for (std::size_t i = 1; i <= samples.size(); ++i) {
    if (i == samples.size() || samples[i].label != samples[run_start].label) {
      flush_run(i);
      run_start = i;
    }
  }
  return ds;
}

Dataset synth_dataset(const SynthConfig& cfg) {
  cfg.validate();
  Dataset ds;
  {
    std::ostringstream meta;
    meta << "synthetic seed=" << cfg.seed << " per_class=" << cfg.n_windows_per_class;
    ds.source = meta.str();
  }
  ds.windows.resize(static_cast<std::size_t>(cfg.n_windows_per_class) * 3);

#pragma omp parallel for collapse(2) schedule(static)
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < cfg.n_windows_per_class; ++i) {
      const Class label = static_cast<Class>(c);
      Xoshiro256ss rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(c),
                                   static_cast<std::uint64_t>(i)));
      std::vector<double> x(kWindowLen, static_cast<double>(cfg.baseline));
      add_relax_background(x, cfg, rng);
      if (label == Class::CLENCH) add_clench_burst(x, cfg, rng);
      if (label == Class::NOISE) add_motion_artifact(x, cfg, rng);
      ds.windows[static_cast<std::size_t>(c) * cfg.n_windows_per_class + i] =
          render_window(x, label);
    }
  }
  return ds;
}

std::string dataset_to_csv(const Dataset& ds) {
  std::string out = "timestamp_ms,adc,label\n";
  out.reserve(out.size() + ds.windows.size() * kWindowLen * 16);
  std::uint64_t t = 0;
  for (const auto& w : ds.windows) {
    if (!w.label) throw std::runtime_error("dataset export requires labeled windows");
    const char* name = class_name(*w.label);
    for (int i = 0; i < kWindowLen; ++i, ++t) {
      out.append(std::to_string(t));
      out.push_back(',');
      out.append(std::to_string(static_cast<int>(w.samples[i])));
      out.push_back(',');
      out.append(name);
      out.push_back('\n');
    }
  }
  return out;
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  write_text_file(path, dataset_to_csv(ds));
}

Dataset read_dataset_csv(const std::string& path) {
  Dataset ds = segment_windows(parse_session_csv(read_text_file(path)));
  ds.source = path;
  return ds;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace emg
