#pragma once

#include <string>
#include <vector>

#include "causalflow/measures.hpp"
#include "causalflow/recording.hpp"

namespace causalflow {

// Trial container, little-endian:
//   magic "CFL1" | u32 n_channels | u64 n_samples | f64 sample_rate |
//   channel-major f64 data | u8 tag per sample
// Channel names are not part of the container; they come from the dataset
// manifest (or default to ch1..chN).
void write_trial_binary(const std::string& path, const TrialRecording& trial);
TrialRecording read_trial_binary(const std::string& path);

// CSV: header row of channel names with an optional trailing "tag" column,
// one row per sample. Sample rate is not representable in CSV and must be
// supplied by the caller.
void write_trial_csv(const std::string& path, const TrialRecording& trial);
TrialRecording read_trial_csv(const std::string& path, double sample_rate);

// Dispatch on the CFL1 magic.
TrialRecording read_trial(const std::string& path, double csv_sample_rate = 0.0);

struct RateRow {
  int x_roi = 0;
  int y_roi = 0;
  MeasureKind measure = MeasureKind::Cbi;
  std::uint8_t tag = 0;
  long window_index = 0;
  double window_time_ms = 0.0;
  double rate_nats = 0.0;
};

// Columns: pair,measure,tag,window_index,window_time_ms,rate_nats
// (rate_bits when bits = true).
void write_rate_csv(const std::string& path, const std::vector<RateRow>& rows,
                    bool bits = false);
std::vector<RateRow> read_rate_csv(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace causalflow
