#include "causalflow/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "causalflow/errors.hpp"
#include "causalflow/rng.hpp"

namespace causalflow {

WindowEnsemble::WindowEnsemble(Eigen::MatrixXd sections, VarLayout layout,
                               int window_length)
    : sections_(std::move(sections)), layout_(std::move(layout)),
      n_(window_length) {
  validate_layout(layout_);
  if (n_ < 1) {
    throw Error(ErrorKind::Parameter, "ensemble-core", "WindowEnsemble", "N",
                "window length must be >= 1");
  }
  if (sections_.rows() < 1) {
    throw Error(ErrorKind::Data, "ensemble-core", "WindowEnsemble",
                "n_sections", "ensemble needs at least one section");
  }
  const Eigen::Index dim =
      static_cast<Eigen::Index>(layout_.size()) * static_cast<Eigen::Index>(n_);
  if (sections_.cols() != dim) {
    throw Error(ErrorKind::Data, "ensemble-core", "WindowEnsemble", "sections",
                "section width " + std::to_string(sections_.cols()) +
                    " does not match n_vars*N = " + std::to_string(dim));
  }
}

namespace {

struct SectionSource {
  const GroupedRecording* trial;
  long start;
};

int derive_keep_count(const GroupedRecording& trial,
                      const PoolOptions& options) {
  if (options.min_realizations > 0) return options.min_realizations;
  int keep = 0;
  for (const auto& [roi, mat] : trial.rois) {
    const int count = static_cast<int>(mat.rows());
    if (keep == 0 || count < keep) keep = count;
  }
  return keep;
}

std::vector<int> roi_permutation(int n_realizations, int keep, int roi,
                                 std::uint64_t seed) {
  std::vector<int> perm(static_cast<std::size_t>(n_realizations));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = Rng::derive(seed, 0x9010u + static_cast<std::uint64_t>(roi));
  rng.shuffle(perm);
  perm.resize(static_cast<std::size_t>(std::min(keep, n_realizations)));
  return perm;
}

WindowEnsemble assemble(const std::vector<SectionSource>& sources,
                        int window_len, int x_roi, int y_roi,
                        const PoolOptions& options, const char* op) {
  if (sources.empty()) {
    throw Error(ErrorKind::Data, "ensemble-core", op, "tag",
                "no matching sections to pool");
  }
  const GroupedRecording& first = *sources.front().trial;
  if (!first.rois.count(x_roi) || !first.rois.count(y_roi)) {
    throw Error(ErrorKind::Config, "ensemble-core", op, "roi",
                "requested ROI pair (" + std::to_string(x_roi) + "," +
                    std::to_string(y_roi) + ") not present in grouping");
  }
  if (x_roi == y_roi) {
    throw Error(ErrorKind::Config, "ensemble-core", op, "roi",
                "X and Y must be distinct ROIs");
  }

  std::vector<int> z_rois;
  if (options.include_z) {
    for (const auto& [roi, mat] : first.rois) {
      if (roi != x_roi && roi != y_roi) z_rois.push_back(roi);
    }
  }

  VarLayout layout;
  layout.push_back({Role::X, x_roi});
  layout.push_back({Role::Y, y_roi});
  for (int roi : z_rois) layout.push_back({Role::Z, roi});
  const int n_vars = static_cast<int>(layout.size());

  const int keep = derive_keep_count(first, options);
  const std::vector<int> x_perm = roi_permutation(
      static_cast<int>(first.rois.at(x_roi).rows()), keep, x_roi, options.seed);
  const std::vector<int> y_perm = roi_permutation(
      static_cast<int>(first.rois.at(y_roi).rows()), keep, y_roi, options.seed);
  const int pairings = static_cast<int>(std::min(x_perm.size(), y_perm.size()));

  const long total = static_cast<long>(sources.size()) * pairings;
  Eigen::MatrixXd sections(total, static_cast<Eigen::Index>(n_vars) * window_len);

  // Z-roi spatial means, cached per distinct trial.
  std::map<const GroupedRecording*, Eigen::MatrixXd> z_mean_cache;
  auto z_means = [&](const GroupedRecording* trial) -> const Eigen::MatrixXd& {
    auto it = z_mean_cache.find(trial);
    if (it != z_mean_cache.end()) return it->second;
    Eigen::MatrixXd m(z_rois.size(), trial->n_samples());
    for (std::size_t zi = 0; zi < z_rois.size(); ++zi) {
      const Eigen::MatrixXd& roi_mat = trial->rois.at(z_rois[zi]);
      m.row(static_cast<Eigen::Index>(zi)) =
          roi_mat.colwise().mean();
    }
    return z_mean_cache.emplace(trial, std::move(m)).first->second;
  };

  long s = 0;
  for (const SectionSource& src : sources) {
    const Eigen::MatrixXd& x_mat = src.trial->rois.at(x_roi);
    const Eigen::MatrixXd& y_mat = src.trial->rois.at(y_roi);
    const Eigen::MatrixXd& z_mat = z_means(src.trial);
    for (int r = 0; r < pairings; ++r, ++s) {
      for (int t = 0; t < window_len; ++t) {
        const long col = src.start + t;
        sections(s, static_cast<Eigen::Index>(t) * n_vars + 0) =
            x_mat(x_perm[static_cast<std::size_t>(r)], col);
        sections(s, static_cast<Eigen::Index>(t) * n_vars + 1) =
            y_mat(y_perm[static_cast<std::size_t>(r)], col);
        for (std::size_t zi = 0; zi < z_rois.size(); ++zi) {
          sections(s, static_cast<Eigen::Index>(t) * n_vars + 2 +
                          static_cast<Eigen::Index>(zi)) =
              z_mat(static_cast<Eigen::Index>(zi), col);
        }
      }
    }
  }

  if (options.section_cap > 0 && total > options.section_cap) {
    std::vector<long> pick(static_cast<std::size_t>(total));
    std::iota(pick.begin(), pick.end(), 0L);
    Rng rng = Rng::derive(options.seed, 0x5ab5a3bull);
    rng.shuffle(pick);
    pick.resize(static_cast<std::size_t>(options.section_cap));
    std::sort(pick.begin(), pick.end());
    Eigen::MatrixXd sub(options.section_cap, sections.cols());
    for (long i = 0; i < options.section_cap; ++i) {
      sub.row(i) = sections.row(pick[static_cast<std::size_t>(i)]);
    }
    sections.swap(sub);
  }

  return WindowEnsemble(std::move(sections), std::move(layout), window_len);
}

}  // namespace

WindowEnsemble pool_sections(const std::vector<GroupedRecording>& trials,
                             int window_index, int window_len, int x_roi,
                             int y_roi, std::uint8_t tag,
                             const PoolOptions& options) {
  std::vector<SectionSource> sources;
  for (const GroupedRecording& trial : trials) {
    for (const WindowSlot& slot :
         slice_windows(trial.tags, window_len, options.edge_overlap)) {
      if (slot.tag == tag && slot.index_in_segment == window_index) {
        sources.push_back({&trial, slot.start});
      }
    }
  }
  return assemble(sources, window_len, x_roi, y_roi, options, "pool_sections");
}

WindowEnsemble pool_trial_sections(const GroupedRecording& trial,
                                   int window_len, int x_roi, int y_roi,
                                   std::uint8_t tag,
                                   const PoolOptions& options) {
  std::vector<SectionSource> sources;
  for (const WindowSlot& slot :
       slice_windows(trial.tags, window_len, options.edge_overlap)) {
    if (slot.tag == tag) sources.push_back({&trial, slot.start});
  }
  return assemble(sources, window_len, x_roi, y_roi, options,
                  "pool_trial_sections");
}

PrefixCovariance estimate_joint_covariance(const WindowEnsemble& ensemble,
                                           double ridge) {
  const Eigen::MatrixXd& sections = ensemble.sections();
  const long s = ensemble.n_sections();
  if (s < 2) {
    throw Error(ErrorKind::Estimation, "ensemble-core",
                "estimate_joint_covariance", "n_sections",
                "need at least 2 sections, got " + std::to_string(s));
  }
  if (!sections.allFinite()) {
    throw Error(ErrorKind::Data, "ensemble-core", "estimate_joint_covariance",
                "sections", "non-finite sample values");
  }
  if (ridge < 0.0) {
    throw Error(ErrorKind::Parameter, "ensemble-core",
                "estimate_joint_covariance", "ridge",
                "ridge must be non-negative");
  }

  const Eigen::RowVectorXd mean = sections.colwise().mean();
  const Eigen::MatrixXd centered = sections.rowwise() - mean;
  Eigen::MatrixXd c =
      (centered.transpose() * centered) / static_cast<double>(s - 1);
  c = ((c + c.transpose()) * 0.5).eval();
  const double dim = static_cast<double>(c.rows());
  c.diagonal().array() += ridge * c.trace() / dim;

  return PrefixCovariance(std::move(c), ensemble.layout(),
                          ensemble.window_length(), ridge);
}

}  // namespace causalflow
