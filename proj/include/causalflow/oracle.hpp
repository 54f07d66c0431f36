#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "causalflow/measures.hpp"

namespace causalflow {

// Dense joint pmf over (x^N, y^N, z^N) tuples with fixed per-step alphabets.
// Axis 3*t + v (v: 0 = X, 1 = Y, 2 = Z) with axis 0 slowest in the flat
// table. az == 1 encodes "no side process".
struct JointPmf {
  int ax = 2;
  int ay = 2;
  int az = 1;
  int horizon = 1;
  std::vector<double> p;

  static constexpr long kDefaultMaxTable = 1000000;

  long table_size() const;
  int n_axes() const { return 3 * horizon; }
  int axis_card(int axis) const {
    const int v = axis % 3;
    return v == 0 ? ax : (v == 1 ? ay : az);
  }
  void validate(double tol = 1e-12) const;
};

struct KernelParent {
  std::string node;  // "X", "Y" or "Z"
  int delay = 1;     // 0 = same time step; time index below 1 reads symbol 0
};

struct NodeSpec {
  std::string name;
  int alphabet = 2;
  std::vector<KernelParent> parents;
  // One row per parent-symbol combination (first parent most significant),
  // each row a pmf over the node's alphabet.
  std::vector<std::vector<double>> kernel;
};

// Structural description of a small synthetic network over nodes X, Y, Z with
// per-node update kernels; omitted nodes get a constant single-symbol process.
struct ChannelSpec {
  int horizon = 1;
  std::vector<NodeSpec> nodes;
  long max_table = JointPmf::kDefaultMaxTable;
};

// Exact joint pmf by chain-rule product over time.
JointPmf build_pmf(const ChannelSpec& spec);

ChannelSpec channel_spec_from_json_text(const std::string& text);
std::string channel_spec_to_json_text(const ChannelSpec& spec);

// Entropy-sum form by exact enumeration of marginal-table entropies.
double oracle_measure(const JointPmf& pmf, MeasureKind kind,
                      Direction dir = Direction::XtoY, bool conditioned = true);

// Per-step KL-divergence form: enumerates conditioning histories weighted by
// their probabilities. Must match oracle_measure to ~1e-12.
double oracle_measure_kl(const JointPmf& pmf, MeasureKind kind,
                         Direction dir = Direction::XtoY,
                         bool conditioned = true);

// sum_n I(X_n; Y_n | X^{n-1} Y^{n-1} Z^{n-1}) by entropy enumeration.
double oracle_instantaneous_mi(const JointPmf& pmf, bool conditioned = true);

struct IdentityReport {
  struct Item {
    std::string name;
    double residual;
  };
  std::vector<Item> items;

  double max_residual() const;
  bool pass(double tol) const { return max_residual() < tol; }
};

// Evaluates both sides of every inter-measure identity plus the KL-vs-entropy
// form equivalence for each measure kind.
IdentityReport verify_identities(const JointPmf& pmf);

// i.i.d. tuples drawn from the pmf; row = sample, column = axis digit.
Eigen::MatrixXi sample_from_pmf(const JointPmf& pmf, long n_samples,
                                std::uint64_t seed);

// Plug-in pmf from empirical tuples (counts / n).
JointPmf estimate_pmf(const Eigen::MatrixXi& samples, int ax, int ay, int az,
                      int horizon);

}  // namespace causalflow
