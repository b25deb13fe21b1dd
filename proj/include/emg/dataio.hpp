#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace emg {

constexpr int kWindowLen = 1000;      // samples per classification window
constexpr int kSampleRateHz = 1000;   // fixed acquisition rate
constexpr int kAdcMax = 4095;         // 12-bit converter
constexpr int kNumClasses = 3;

enum class Class : std::uint8_t { RELAX = 0, CLENCH = 1, NOISE = 2 };

const char* class_name(Class c);
// Throws on anything other than RELAX/CLENCH/NOISE.
Class parse_class(const std::string& name);

struct Sample {
  std::uint64_t t_ms = 0;
  int adc = 0;
};

struct LabeledSample {
  std::uint64_t t_ms = 0;
  int adc = 0;
  Class label = Class::RELAX;
};

struct Window {
  std::vector<std::uint16_t> samples;  // exactly kWindowLen values in [0, kAdcMax]
  std::optional<Class> label;
};

struct Dataset {
  std::vector<Window> windows;
  std::string source;

  std::array<std::size_t, 3> class_counts() const;
};

struct SynthConfig {
  int n_windows_per_class = 100;
  std::uint64_t seed = 1738;
  int baseline = 2048;
  double relax_sigma = 6.0;
  double clench_sigma = 150.0;
  double artifact_amp = 400.0;

  void validate() const;  // throws std::invalid_argument
};

// Reads a session CSV with header `timestamp_ms,adc,label`. Rows must have
// strictly increasing timestamps, adc in [0, 4095] and a known label; any
// violation throws with the offending line number. LF and CRLF both accepted.
std::vector<LabeledSample> parse_session_csv(const std::string& text);

// Same schema minus the label column (a bare `timestamp_ms,adc` stream is
// accepted too); used for replaying unlabeled streams.
std::vector<Sample> parse_stream_csv(const std::string& text);

// Cuts a labeled sample stream into 1000-sample windows. Window accumulation
// restarts at every label change, so every emitted window is single-label;
// the remainder of each label run (< 1000 samples) is discarded.
Dataset segment_windows(const std::vector<LabeledSample>& samples);

// Deterministic three-class generator. Per class, window i draws from an
// independent xoshiro256** stream seeded by derive_seed(cfg.seed, class, i):
//   RELAX  = baseline + white noise (relax_sigma) + slow drift sinusoid
//   CLENCH = RELAX background + broadband 20-150 Hz content (clench_sigma)
//   NOISE  = RELAX background + 1-10 Hz sinusoids (artifact_amp) + sparse spikes
// Values are rounded to the nearest integer and clipped to [0, 4095].
// Windows are emitted grouped by class: all RELAX, then CLENCH, then NOISE.
Dataset synth_dataset(const SynthConfig& cfg);

// Lossless Dataset <-> session CSV round trip (timestamps are the running
// sample index in milliseconds).
std::string dataset_to_csv(const Dataset& ds);
void write_dataset_csv(const Dataset& ds, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace emg
