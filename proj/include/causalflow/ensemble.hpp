#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "causalflow/prefix_covariance.hpp"
#include "causalflow/recording.hpp"

namespace causalflow {

// Aligned realizations of the (X, Y, Z-block) processes over one window.
// Section s, variable v, time t lives at sections()(s, t * n_vars + v).
class WindowEnsemble {
 public:
  WindowEnsemble(Eigen::MatrixXd sections, VarLayout layout, int window_length);

  const Eigen::MatrixXd& sections() const { return sections_; }
  const VarLayout& layout() const { return layout_; }
  int window_length() const { return n_; }
  int n_vars() const { return static_cast<int>(layout_.size()); }
  long n_sections() const { return static_cast<long>(sections_.rows()); }

 private:
  Eigen::MatrixXd sections_;
  VarLayout layout_;
  int n_;
};

struct PoolOptions {
  std::uint64_t seed = 0;     // electrode-pairing shuffle stream
  long section_cap = 0;       // 0 = unlimited; otherwise seeded subsample
  int edge_overlap = 0;
  // Realizations kept per X/Y ROI; 0 derives the global minimum electrode
  // count over all grouped ROIs so every pair pools equally many sections.
  int min_realizations = 0;
  bool include_z = true;  // false: empty Z role (unconditioned measures)
};

// Pools the window at position `window_index` (within constant-tag segments of
// tag `tag`) across trials, segments and electrode pairings. X and Y ROIs
// contribute per-electrode realizations, every other ROI enters the Z block as
// its spatial mean.
WindowEnsemble pool_sections(const std::vector<GroupedRecording>& trials,
                             int window_index, int window_len, int x_roi,
                             int y_roi, std::uint8_t tag,
                             const PoolOptions& options = {});

// Per-trial variant: every window slot with `tag` inside one trial becomes a
// section (the block-tiling scheme used for the synthetic benchmark).
WindowEnsemble pool_trial_sections(const GroupedRecording& trial,
                                   int window_len, int x_roi, int y_roi,
                                   std::uint8_t tag,
                                   const PoolOptions& options = {});

// Sample covariance of the stacked (n_vars * N)-vector over sections, mean
// subtracted per coordinate, plus ridge * trace(C)/dim on the diagonal.
PrefixCovariance estimate_joint_covariance(const WindowEnsemble& ensemble,
                                           double ridge);

}  // namespace causalflow
