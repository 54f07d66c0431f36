#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "causalflow/measures.hpp"

namespace causalflow {

// Standard normal cdf via the Hart rational approximation (West's
// double-precision variant); pure arithmetic with fixed constants so p-values
// are stable across platforms. Absolute error < 1e-14.
double normal_cdf(double x);

struct RocCurve {
  // thresholds descending from +inf to -inf; points (fp[i], tp[i]) computed
  // with strict score > threshold counting, so the curve runs (0,0) -> (1,1).
  std::vector<double> thresholds;
  std::vector<double> fp;
  std::vector<double> tp;
  double theta_trapezoid = 0.5;
  double theta_mann_whitney = 0.5;

  double theta() const { return theta_trapezoid; }
};

// Thresholds are the observed scores themselves plus +-inf sentinels.
RocCurve roc_points(const std::vector<double>& pos,
                    const std::vector<double>& neg);

struct AucResult {
  double trapezoid = 0.5;
  double mann_whitney = 0.5;  // pair statistic with half credit for ties
};

// Both routes; throws Numeric if they disagree beyond 1e-12.
AucResult auc(const std::vector<double>& pos, const std::vector<double>& neg);

struct BootstrapResult {
  double theta_hat = 0.5;        // observed AUC
  std::vector<double> theta_b;   // resampled AUCs
  double sigma = 0.0;            // std-dev with (B-1) denominator
  int block_len = 1;             // l = round(N_p^(1/3))
  int n_blocks = 1;              // m = floor(N_p / l)
  int resamples = 0;             // B

  double mean() const;
};

// Overlapping-block bootstrap, resampling strictly within each class with
// per-resample derived RNG streams. block_len 0 derives l per class from its
// own size.
BootstrapResult block_bootstrap(const std::vector<double>& pos,
                                const std::vector<double>& neg, int resamples,
                                std::uint64_t seed, int block_len = 0,
                                int threads = 0);

struct SignificanceConfig {
  double c = 0.85;      // AUC cutoff of the null hypothesis theta <= c
  double alpha = 0.05;  // significance threshold

  void validate() const;
};

struct SignificanceResult {
  double p_value = 1.0;      // Phi((c - mean(theta_b)) / sigma)
  double p_empirical = 1.0;  // Pr_b(theta_b <= c), reported alongside
  bool reject = false;
};

SignificanceResult significance_test(const BootstrapResult& boot,
                                     const SignificanceConfig& cfg);

struct MomentSummary {
  double mean = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // moment definition; Gaussian -> 3
  bool non_normal = false;
};

inline constexpr double kSkewnessCutoff = 2.0;
inline constexpr double kKurtosisCutoff = 7.0;

MomentSummary skewness_kurtosis(const std::vector<double>& samples);

struct Histogram {
  std::vector<double> edges;   // n_bins + 1
  std::vector<double> counts;  // n_bins

  static Histogram build(const std::vector<double>& samples, int n_bins);
  long n_bins() const { return static_cast<long>(counts.size()); }
  double total() const;
};

struct GaussianFit {
  double mu = 0.0;
  double sigma = 1.0;
  double objective = 0.0;  // L1 distance between fit and histogram density
};

// (mu, sigma) minimizing the L1 distance between the Gaussian density and the
// histogram density; Nelder-Mead from the moment estimate, objective
// tolerance 1e-6.
GaussianFit l1_gaussian_fit(const Histogram& hist);

double l1_fit_objective(const Histogram& hist, double mu, double sigma);

struct Spectrum {
  std::vector<double> freq;
  std::vector<double> power;  // one-sided PSD
  double df = 0.0;

  double band_power(double f_lo, double f_hi) const;
};

// Welch PSD with Hann window and 50% segment overlap.
Spectrum welch_psd(const std::vector<double>& x, double sample_rate,
                   int segment = 4096);
double band_power(const std::vector<double>& x, double sample_rate,
                  double f_lo, double f_hi);

struct PairBootstrap {
  int source = 0;
  int dest = 0;
  MeasureKind measure = MeasureKind::Cbi;
  BootstrapResult boot;
};

struct PairTestResult {
  int source = 0;
  int dest = 0;
  MeasureKind measure = MeasureKind::Cbi;
  double theta = 0.5;
  double p_value = 1.0;
  double p_empirical = 1.0;
  bool significant = false;
};

std::vector<PairTestResult> evaluate_pairs(
    const std::vector<PairBootstrap>& pairs, const SignificanceConfig& cfg);

struct ConnectivityMatrix {
  std::vector<int> rois;  // sorted roi ids, rows = source, cols = dest
  std::map<MeasureKind, std::vector<std::vector<bool>>> significant;
};

ConnectivityMatrix connectivity_change_matrix(
    const std::vector<PairBootstrap>& pairs, const SignificanceConfig& cfg);

}  // namespace causalflow
