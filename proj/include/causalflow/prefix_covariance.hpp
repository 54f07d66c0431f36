#pragma once

#include <Eigen/Dense>
#include <unordered_map>
#include <vector>

namespace causalflow {

enum class Role { X, Y, Z };

struct VarSlot {
  Role role;
  int roi = 0;
};

// Ordered per-time-step variable layout. Exactly one X and one Y slot; any
// number of Z slots (the Z block holds all side processes jointly).
using VarLayout = std::vector<VarSlot>;

void validate_layout(const VarLayout& layout);

// Prefix selector (n_x, n_y, n_z) names the index set
// {X_1..X_nx} u {Y_1..Y_ny} u {Z_1..Z_nz} with the Z block taken jointly per
// time step. Variable v at time t occupies stacked index t * n_vars + v.
struct PrefixSelector {
  int n_x = 0;
  int n_y = 0;
  int n_z = 0;
};

// Natural-log determinant of a symmetric positive-definite matrix via LDLT.
// Empty matrix -> 0 by convention. Throws Numeric error naming the failing
// pivot if the factorization finds a non-positive pivot.
double log_det_psd(const Eigen::MatrixXd& m);

class PrefixCovariance {
 public:
  PrefixCovariance(Eigen::MatrixXd c, VarLayout layout, int window_length,
                   double ridge);

  const Eigen::MatrixXd& matrix() const { return c_; }
  const VarLayout& layout() const { return layout_; }
  int window_length() const { return n_; }
  int n_vars() const { return static_cast<int>(layout_.size()); }
  double ridge() const { return ridge_; }

  int x_var() const { return x_var_; }
  int y_var() const { return y_var_; }
  const std::vector<int>& z_vars() const { return z_vars_; }

  // Stacked indices named by the selector, in increasing index order.
  std::vector<int> selector_indices(const PrefixSelector& sel) const;
  Eigen::MatrixXd submatrix(const PrefixSelector& sel) const;

 private:
  Eigen::MatrixXd c_;
  VarLayout layout_;
  int n_ = 0;
  double ridge_ = 0.0;
  int x_var_ = -1;
  int y_var_ = -1;
  std::vector<int> z_vars_;
};

// Memoizing log-determinant evaluator over prefix selectors of one window
// covariance. The measures of one window share an instance so repeated
// selectors are factorized once.
class PrefixLogDet {
 public:
  explicit PrefixLogDet(const PrefixCovariance& pc) : pc_(&pc) {}

  const PrefixCovariance& covariance() const { return *pc_; }
  int window_length() const { return pc_->window_length(); }

  double operator()(int n_x, int n_y, int n_z);

 private:
  const PrefixCovariance* pc_;
  std::unordered_map<int, double> cache_;
};

}  // namespace causalflow
