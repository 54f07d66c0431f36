#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "causalflow/prefix_covariance.hpp"

namespace causalflow {

enum class MeasureKind {
  Cbi,                 // causal bidirectional information, symmetric
  MasseyDi,            // causally conditioned Massey directed information
  KamitakeDi,          // causally conditioned Kamitake directed information
  SumTransferEntropy,  // causally conditioned sum transfer entropy
  CausalMi,            // causally conditioned mutual information
  ConditionalMi,       // MI conditioned on the full Z past block
};

enum class Direction { XtoY, YtoX };

const char* to_string(MeasureKind kind);
MeasureKind measure_from_string(const std::string& name);
bool is_symmetric(MeasureKind kind);
const std::vector<MeasureKind>& all_measures();

// 0.5 * log((2*pi*e)^n |C|); differential entropy of an n-dim Gaussian.
double gaussian_entropy(const Eigen::MatrixXd& c);

// Per-window information rates in nats (sum over n = 1..N). Values are raw:
// tiny negative round-off is NOT clamped here so identities stay exact;
// clamping happens when rate vectors are assembled.
double cbi_rate(PrefixLogDet& ld);
double massey_rate(PrefixLogDet& ld, Direction dir = Direction::XtoY);
double kamitake_rate(PrefixLogDet& ld, Direction dir = Direction::XtoY);
double sum_te_rate(PrefixLogDet& ld, Direction dir = Direction::XtoY);
double causal_mi_rate(PrefixLogDet& ld);
double conditional_mi_rate(PrefixLogDet& ld);

// sum_n I(X_n; Y_n | X^{n-1} Y^{n-1} Z^{n-1}); the correction term relating
// Massey directed information to sum transfer entropy.
double instantaneous_mi_rate(PrefixLogDet& ld);

// Causally conditioned MI by its chain expansion sum_n I(X^N; Y_n | Y^{n-1}
// Z^{n-1}); an independent route used to cross-check causal_mi_rate.
double causal_mi_rate_chain(PrefixLogDet& ld, Direction dir = Direction::XtoY);

double measure_rate(PrefixLogDet& ld, MeasureKind kind,
                    Direction dir = Direction::XtoY);

// Convenience overloads building a fresh evaluator.
double cbi_rate(const PrefixCovariance& pc);
double massey_rate(const PrefixCovariance& pc, Direction dir = Direction::XtoY);
double kamitake_rate(const PrefixCovariance& pc,
                     Direction dir = Direction::XtoY);
double sum_te_rate(const PrefixCovariance& pc, Direction dir = Direction::XtoY);
double causal_mi_rate(const PrefixCovariance& pc);
double conditional_mi_rate(const PrefixCovariance& pc);
double measure_rate(const PrefixCovariance& pc, MeasureKind kind,
                    Direction dir = Direction::XtoY);

struct RateVector {
  std::vector<double> values;  // one per window position, nats
  MeasureKind measure = MeasureKind::Cbi;
  int x_roi = 0;
  int y_roi = 0;
  std::uint8_t tag = 0;
};

// Round-off bookkeeping for the negative-value clamp.
struct ClampStats {
  std::atomic<long> total{0};
  std::atomic<long> clamped{0};
  std::atomic<long> severe{0};  // below -1e-8, beyond plain round-off

  double clamped_fraction() const {
    const long t = total.load();
    return t == 0 ? 0.0 : static_cast<double>(clamped.load()) / t;
  }
};

inline constexpr double kClampTolerance = 1e-8;

// Negative values are clamped to zero and counted; values below the tolerance
// are additionally counted as severe.
double clamp_rate(double value, ClampStats* stats);

// Evaluates the requested measures over per-window covariances for one
// ordered ROI pair and tag; one RateVector per kind, K entries each.
std::vector<RateVector> rate_vectors_over_windows(
    const std::vector<PrefixCovariance>& windows, int x_roi, int y_roi,
    std::uint8_t tag, const std::vector<MeasureKind>& kinds,
    bool per_sample_normalize = false, ClampStats* stats = nullptr);

}  // namespace causalflow
