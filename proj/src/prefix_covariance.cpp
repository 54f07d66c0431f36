#include "causalflow/prefix_covariance.hpp"

#include <cmath>
#include <string>

#include "causalflow/errors.hpp"

namespace causalflow {

void validate_layout(const VarLayout& layout) {
  int n_x = 0, n_y = 0;
  for (const VarSlot& slot : layout) {
    if (slot.role == Role::X) ++n_x;
    if (slot.role == Role::Y) ++n_y;
  }
  if (n_x != 1 || n_y != 1) {
    throw Error(ErrorKind::Config, "ensemble-core", "validate_layout", "layout",
                "layout must contain exactly one X and one Y slot, got " +
                    std::to_string(n_x) + " X and " + std::to_string(n_y) +
                    " Y");
  }
}

double log_det_psd(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 && m.cols() == 0) return 0.0;  // log|C(empty)| = 0
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::Parameter, "ensemble-core", "log_det_psd", "M",
                "matrix is not square");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double sym_err = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && sym_err > 1e-8 * scale) {
    throw Error(ErrorKind::Parameter, "ensemble-core", "log_det_psd", "M",
                "matrix is not symmetric (max asymmetry " +
                    std::to_string(sym_err) + ")");
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorKind::Numeric, "ensemble-core", "log_det_psd", "M",
                "LDLT factorization failed");
  }
  const Eigen::VectorXd d = ldlt.vectorD();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) {
      throw Error(ErrorKind::Numeric, "ensemble-core", "log_det_psd", "M",
                  "matrix is not positive definite, pivot " +
                      std::to_string(i) + " = " + std::to_string(d[i]));
    }
    log_det += std::log(d[i]);
  }
  return log_det;
}

PrefixCovariance::PrefixCovariance(Eigen::MatrixXd c, VarLayout layout,
                                   int window_length, double ridge)
    : c_(std::move(c)), layout_(std::move(layout)), n_(window_length),
      ridge_(ridge) {
  validate_layout(layout_);
  if (n_ < 1) {
    throw Error(ErrorKind::Parameter, "ensemble-core", "PrefixCovariance", "N",
                "window length must be >= 1");
  }
  const Eigen::Index dim =
      static_cast<Eigen::Index>(layout_.size()) * static_cast<Eigen::Index>(n_);
  if (c_.rows() != dim || c_.cols() != dim) {
    throw Error(ErrorKind::Parameter, "ensemble-core", "PrefixCovariance", "C",
                "covariance size " + std::to_string(c_.rows()) +
                    " does not match n_vars*N = " + std::to_string(dim));
  }
  const double scale = c_.size() ? c_.cwiseAbs().maxCoeff() : 0.0;
  if (scale > 0.0 &&
      (c_ - c_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorKind::Data, "ensemble-core", "PrefixCovariance", "C",
                "covariance is not symmetric");
  }
  for (std::size_t v = 0; v < layout_.size(); ++v) {
    switch (layout_[v].role) {
      case Role::X: x_var_ = static_cast<int>(v); break;
      case Role::Y: y_var_ = static_cast<int>(v); break;
      case Role::Z: z_vars_.push_back(static_cast<int>(v)); break;
    }
  }
}

std::vector<int> PrefixCovariance::selector_indices(
    const PrefixSelector& sel) const {
  if (sel.n_x < 0 || sel.n_x > n_ || sel.n_y < 0 || sel.n_y > n_ ||
      sel.n_z < 0 || sel.n_z > n_) {
    throw Error(ErrorKind::Index, "ensemble-core", "select_submatrix",
                "selector",
                "selector (" + std::to_string(sel.n_x) + "," +
                    std::to_string(sel.n_y) + "," + std::to_string(sel.n_z) +
                    ") out of range for N = " + std::to_string(n_));
  }
  const int v = n_vars();
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(sel.n_x + sel.n_y) +
              static_cast<std::size_t>(sel.n_z) * z_vars_.size());
  const int t_max = std::max(sel.n_x, std::max(sel.n_y, sel.n_z));
  for (int t = 0; t < t_max; ++t) {
    for (int var = 0; var < v; ++var) {
      const Role role = layout_[static_cast<std::size_t>(var)].role;
      const bool in = (role == Role::X && t < sel.n_x) ||
                      (role == Role::Y && t < sel.n_y) ||
                      (role == Role::Z && t < sel.n_z);
      if (in) idx.push_back(t * v + var);
    }
  }
  return idx;
}

Eigen::MatrixXd PrefixCovariance::submatrix(const PrefixSelector& sel) const {
  const std::vector<int> idx = selector_indices(sel);
  Eigen::MatrixXd sub(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          c_(idx[i], idx[j]);
    }
  }
  return sub;
}

double PrefixLogDet::operator()(int n_x, int n_y, int n_z) {
  const int n = pc_->window_length() + 1;
  const int key = (n_x * n + n_y) * n + n_z;
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  double value;
  try {
    value = log_det_psd(pc_->submatrix({n_x, n_y, n_z}));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Numeric) {
      throw Error(ErrorKind::Numeric, e.module_name(), e.operation(),
                  "selector(" + std::to_string(n_x) + "," +
                      std::to_string(n_y) + "," + std::to_string(n_z) + ")",
                  e.what());
    }
    throw;
  }
  cache_.emplace(key, value);
  return value;
}

}  // namespace causalflow
