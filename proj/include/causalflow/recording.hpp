#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace causalflow {

// One multichannel recording. Rows are channels, columns are samples; every
// sample carries exactly one quality/activity tag.
struct TrialRecording {
  Eigen::MatrixXd channels;  // n_channels x n_samples
  double sample_rate = 0.0;
  std::vector<std::uint8_t> tags;
  std::vector<std::string> channel_names;

  int n_channels() const { return static_cast<int>(channels.rows()); }
  long n_samples() const { return static_cast<long>(channels.cols()); }
  void validate() const;
};

struct RoiGrouping {
  std::map<std::string, int> roi_of_channel;

  std::vector<int> roi_ids() const;  // sorted, unique
  void validate() const;
};

enum class RoiAggregation { PerElectrodeRealization, RoiMean };

// Channels regrouped by ROI; each ROI holds its realizations as rows.
struct GroupedRecording {
  std::map<int, Eigen::MatrixXd> rois;  // roi id -> n_realizations x n_samples
  double sample_rate = 0.0;
  std::vector<std::uint8_t> tags;

  long n_samples() const {
    return rois.empty() ? 0 : static_cast<long>(rois.begin()->second.cols());
  }
  std::vector<int> roi_ids() const;
};

GroupedRecording group_into_rois(const TrialRecording& recording,
                                 const RoiGrouping& grouping,
                                 RoiAggregation aggregation);

// One window position: `start` sample, the tag of the segment it lies in, and
// its index within that segment (windows are enumerated per constant-tag
// segment so positions are comparable across trials).
struct WindowSlot {
  long start = 0;
  int index_in_segment = 0;
  std::uint8_t tag = 0;
};

// Consecutive windows advance by window_len - 2 * edge_overlap samples within
// each constant-tag segment; windows that would straddle a tag change are
// dropped. Returns an empty list when no segment fits a whole window.
std::vector<WindowSlot> slice_windows(const std::vector<std::uint8_t>& tags,
                                      int window_len, int edge_overlap);

}  // namespace causalflow
