#include "causalflow/recording.hpp"

#include <cmath>
#include <set>

#include "causalflow/errors.hpp"

namespace causalflow {

void TrialRecording::validate() const {
  if (!(sample_rate > 0.0)) {
    throw Error(ErrorKind::Data, "ensemble-core", "TrialRecording",
                "sample_rate", "sample rate must be positive");
  }
  if (tags.size() != static_cast<std::size_t>(n_samples())) {
    throw Error(ErrorKind::Data, "ensemble-core", "TrialRecording", "labels",
                "expected one tag per sample, got " +
                    std::to_string(tags.size()) + " tags for " +
                    std::to_string(n_samples()) + " samples");
  }
  if (channel_names.size() != static_cast<std::size_t>(n_channels())) {
    throw Error(ErrorKind::Data, "ensemble-core", "TrialRecording",
                "channel_names", "expected one name per channel");
  }
}

std::vector<int> RoiGrouping::roi_ids() const {
  std::set<int> ids;
  for (const auto& [name, roi] : roi_of_channel) ids.insert(roi);
  return {ids.begin(), ids.end()};
}

void RoiGrouping::validate() const {
  if (roi_of_channel.empty()) {
    throw Error(ErrorKind::Config, "ensemble-core", "RoiGrouping",
                "roi_of_channel", "grouping is empty");
  }
}

std::vector<int> GroupedRecording::roi_ids() const {
  std::vector<int> ids;
  ids.reserve(rois.size());
  for (const auto& [roi, mat] : rois) ids.push_back(roi);
  return ids;
}

GroupedRecording group_into_rois(const TrialRecording& recording,
                                 const RoiGrouping& grouping,
                                 RoiAggregation aggregation) {
  recording.validate();
  grouping.validate();

  std::map<int, std::vector<int>> channels_of_roi;
  for (int ch = 0; ch < recording.n_channels(); ++ch) {
    const std::string& name = recording.channel_names[static_cast<std::size_t>(ch)];
    auto it = grouping.roi_of_channel.find(name);
    if (it == grouping.roi_of_channel.end()) {
      throw Error(ErrorKind::Config, "ensemble-core", "group_into_rois",
                  "channel_name", "channel '" + name + "' has no ROI");
    }
    channels_of_roi[it->second].push_back(ch);
  }

  GroupedRecording out;
  out.sample_rate = recording.sample_rate;
  out.tags = recording.tags;
  const long n = recording.n_samples();
  for (const auto& [roi, channels] : channels_of_roi) {
    if (aggregation == RoiAggregation::PerElectrodeRealization) {
      Eigen::MatrixXd m(channels.size(), n);
      for (std::size_t r = 0; r < channels.size(); ++r) {
        m.row(static_cast<Eigen::Index>(r)) = recording.channels.row(channels[r]);
      }
      out.rois.emplace(roi, std::move(m));
    } else {
      Eigen::MatrixXd m(1, n);
      m.setZero();
      for (int ch : channels) m.row(0) += recording.channels.row(ch);
      m.row(0) /= static_cast<double>(channels.size());
      out.rois.emplace(roi, std::move(m));
    }
  }
  return out;
}

std::vector<WindowSlot> slice_windows(const std::vector<std::uint8_t>& tags,
                                      int window_len, int edge_overlap) {
  if (window_len <= 2 * edge_overlap || edge_overlap < 0) {
    throw Error(ErrorKind::Parameter, "ensemble-core", "slice_windows",
                "edge_overlap",
                "require N > 2*edge_overlap, got N = " +
                    std::to_string(window_len) + ", overlap = " +
                    std::to_string(edge_overlap));
  }
  const long n = static_cast<long>(tags.size());
  const long stride = window_len - 2L * edge_overlap;

  std::vector<WindowSlot> slots;
  long seg_start = 0;
  while (seg_start < n) {
    long seg_end = seg_start;
    while (seg_end < n && tags[static_cast<std::size_t>(seg_end)] ==
                              tags[static_cast<std::size_t>(seg_start)]) {
      ++seg_end;
    }
    int k = 0;
    for (long start = seg_start; start + window_len <= seg_end;
         start += stride) {
      slots.push_back({start, k++, tags[static_cast<std::size_t>(seg_start)]});
    }
    seg_start = seg_end;
  }
  return slots;
}

}  // namespace causalflow
