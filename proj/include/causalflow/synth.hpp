#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "causalflow/recording.hpp"
#include "causalflow/rng.hpp"
#include "causalflow/wavelet.hpp"

namespace causalflow {

// Uniform scale-factor law; lo == hi encodes a fixed factor.
struct ScaleLaw {
  double lo = 1.0;
  double hi = 1.0;

  bool is_fixed() const { return lo == hi; }
};

struct BandSpec {
  std::string name;
  double f_lo = 0.0;
  double f_hi = 0.0;
  int level = 1;          // dyadic level holding this band
  bool is_approx = false; // true: approximation at `level`, else detail
  ScaleLaw high_activity;
  ScaleLaw low_activity;
};

struct SourceSinkPair {
  std::string source;
  std::string sink;
};

struct BandRouting {
  std::string band;
  std::vector<SourceSinkPair> pairs;
};

struct Electrode {
  std::string name;
  Eigen::Vector3d position;  // unit sphere
};

struct ElectrodeLayout {
  std::vector<Electrode> electrodes;
  std::vector<BandRouting> routing;

  int index_of(const std::string& name) const;  // -1 when absent
  void validate() const;
};

enum class Activity { High, Low };

const char* to_string(Activity activity);
Activity activity_from_string(const std::string& name);

struct SynthConfig {
  double sample_rate = 250.0;
  long n_samples = 430500;
  int levels = 5;
  std::string wavelet = "db4";
  double logistic_scale = 1.0;
  std::vector<BandSpec> bands;
  ElectrodeLayout layout;
  int source_sink_lag = 1;     // samples; sink receives the lagged source copy
  double sensor_noise = 0.75;  // additive white noise std-dev per electrode
  std::uint8_t tag_high = 2;
  std::uint8_t tag_low = 1;

  void validate() const;
};

std::vector<BandSpec> default_bands();
ElectrodeLayout default_layout();
SynthConfig default_synth_config();

SynthConfig synth_config_from_json_text(const std::string& text);
std::string synth_config_to_json_text(const SynthConfig& cfg);

struct SyntheticTrial {
  TrialRecording recording;
  Activity activity = Activity::High;
  std::uint64_t seed = 0;
  int trial_index = 0;
  std::map<std::string, double> scale_draws;  // "band/source" -> factor
};

struct BandDraw {
  std::vector<double> coefficients;  // already multiplied by the scale draw
  double scale = 1.0;
};

// i.i.d. logistic(0, s) coefficients times one scale factor drawn from the
// band's activity law.
BandDraw draw_band_coefficients(const BandSpec& band, Activity activity,
                                long n_coeffs, double logistic_scale, Rng& rng);

long band_coefficient_count(const BandSpec& band, long n_samples, int levels);

// Inverse dyadic wavelet synthesis of per-band coefficient sequences; bands
// not present are zero. Lengths not divisible by 2^levels are padded up and
// the padded length reported through `padded_to`.
std::vector<double> synthesize_source_signal(
    const WaveletFilter& filter, int levels, long n_samples,
    const std::vector<std::pair<const BandSpec*, std::vector<double>>>& parts,
    long* padded_to = nullptr);

// Normalized inverse squared great-circle-distance weights of each layout
// electrode against the named sources; rows sum to 1. An electrode coinciding
// with a source copies that source exactly.
Eigen::MatrixXd mixing_weights(const std::vector<std::string>& source_names,
                               const ElectrodeLayout& layout);

// source_signals: one row per source name. Returns n_electrodes x n_samples.
Eigen::MatrixXd spatial_mix(const std::vector<std::string>& source_names,
                            const Eigen::MatrixXd& source_signals,
                            const ElectrodeLayout& layout);

SyntheticTrial generate_trial(const SynthConfig& cfg, Activity activity,
                              int trial_index, std::uint64_t seed);

std::vector<SyntheticTrial> generate_dataset(const SynthConfig& cfg,
                                             Activity activity, int n_trials,
                                             std::uint64_t seed,
                                             int threads = 0);

}  // namespace causalflow
