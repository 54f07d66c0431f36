#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "causalflow/io.hpp"
#include "causalflow/measures.hpp"
#include "causalflow/oracle.hpp"
#include "causalflow/recording.hpp"
#include "causalflow/stats.hpp"
#include "causalflow/synth.hpp"

namespace causalflow {

inline constexpr int kFormatVersion = 1;

enum class AnalysisMode {
  PooledWindows,  // pool sections across trials per sliding-window position
  PerTrial,       // tile each trial into blocks; one rate per trial
};

struct PipelineConfig {
  // empty = identity grouping: channel i becomes ROI i+1
  std::map<std::string, int> roi_of_channel;
  int window_length = 32;
  int edge_overlap = 8;
  double ridge = 1e-9;
  std::vector<MeasureKind> measures = {
      MeasureKind::Cbi, MeasureKind::MasseyDi, MeasureKind::SumTransferEntropy,
      MeasureKind::KamitakeDi};
  AnalysisMode mode = AnalysisMode::PooledWindows;
  bool condition_on_others = true;  // false: empty Z role, unconditioned
  bool per_sample_normalize = false;
  bool bits = false;
  long section_cap = 0;
  std::uint64_t pool_seed = 7;
  int bootstrap_resamples = 2000;
  std::uint64_t bootstrap_seed = 2020;
  SignificanceConfig significance;   // c = 0.85, alpha = 0.05
  double analysis_span_ms = 1000.0;  // ROC class span after tag onset; <= 0: all
  std::uint8_t positive_tag = 2;
  std::uint8_t negative_tag = 1;
  int threads = 0;
  double csv_sample_rate = 0.0;  // required for CSV trial input

  void validate() const;
};

PipelineConfig pipeline_config_from_json_text(const std::string& text);
std::string pipeline_config_to_json_text(const PipelineConfig& cfg);

// FNV-1a over the canonical JSON dump.
std::string config_hash(const std::string& canonical_json);

struct DatasetManifest {
  int version = kFormatVersion;
  std::vector<std::string> files;  // relative to the manifest directory
  std::vector<std::string> channels;
  double sample_rate = 0.0;
  std::uint64_t seed = 0;
  std::string generator;  // "synth-eeg" | "linear-relay" | ""
  std::string config_hash;
  std::string synth_config_json;  // generator echo, optional
};

std::string manifest_to_json_text(const DatasetManifest& manifest);
DatasetManifest manifest_from_json_text(const std::string& text);

// Loads every trial listed in a manifest (or a single trial file).
std::vector<TrialRecording> load_dataset(const std::string& path,
                                         const PipelineConfig& cfg);

struct RateTable {
  std::vector<RateRow> rows;
  long clamp_total = 0;
  long clamp_clamped = 0;
  long clamp_severe = 0;

  double clamped_fraction() const {
    return clamp_total == 0
               ? 0.0
               : static_cast<double>(clamp_clamped) / clamp_total;
  }
};

// Rate vectors for every ordered ROI pair (or the given subset) and measure.
RateTable analyze_dataset(
    const PipelineConfig& cfg, const std::vector<TrialRecording>& trials,
    const std::vector<std::pair<int, int>>& pairs = {});

struct PairRocOutput {
  int source = 0;
  int dest = 0;
  MeasureKind measure = MeasureKind::Cbi;
  RocCurve curve;
  BootstrapResult boot;
  SignificanceResult sig;
};

struct RocOutputs {
  std::vector<PairRocOutput> pairs;
  ConnectivityMatrix matrix;
};

RocOutputs roc_analysis(const PipelineConfig& cfg, const RateTable& rates);

std::string roc_outputs_to_json_text(const RocOutputs& outputs,
                                     const PipelineConfig& cfg);
std::string matrix_to_json_text(const RocOutputs& outputs,
                                const PipelineConfig& cfg);
std::string matrix_to_csv_text(const ConnectivityMatrix& matrix);

// Re-threshold previously computed ROC results against a new cutoff.
RocOutputs rethreshold(const RocOutputs& outputs, const SignificanceConfig& cfg);
RocOutputs roc_outputs_from_json_text(const std::string& text);

struct DiagnoseEntry {
  int roi = 0;
  std::uint8_t tag = 0;
  long n_samples = 0;
  MomentSummary moments;
  bool fit_ok = false;
  GaussianFit fit;
  std::string fit_error;
  Histogram histogram;
};

struct DiagnoseReport {
  std::vector<DiagnoseEntry> entries;
};

DiagnoseReport diagnose_dataset(const PipelineConfig& cfg,
                                const std::vector<TrialRecording>& trials,
                                int n_bins = 101,
                                long max_samples_per_entry = 1000000);

std::string diagnose_to_json_text(const DiagnoseReport& report);
std::string identity_report_to_json_text(const IdentityReport& report);

// Linear relay chain X -> Z -> Y with unit delays; small ground-truth dataset
// for the implied-connectivity demonstration.
TrialRecording generate_relay_trial(long n_samples, double sample_rate,
                                    std::uint64_t seed, std::uint8_t tag);

}  // namespace causalflow
