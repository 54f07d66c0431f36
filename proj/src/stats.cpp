#include "causalflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <set>

#include <unsupported/Eigen/FFT>

#include "causalflow/errors.hpp"
#include "causalflow/parallel.hpp"
#include "causalflow/rng.hpp"

namespace causalflow {

double normal_cdf(double x) {
  // Hart (1968) rational approximation, double-precision constants as given
  // by West (2005).
  const double xabs = std::abs(x);
  double cum;
  if (xabs > 37.0) {
    cum = 0.0;
  } else {
    const double e = std::exp(-xabs * xabs / 2.0);
    if (xabs < 7.07106781186547) {
      double num = 3.52624965998911e-02 * xabs + 0.700383064443688;
      num = num * xabs + 6.37396220353165;
      num = num * xabs + 33.912866078383;
      num = num * xabs + 112.079291497871;
      num = num * xabs + 221.213596169931;
      num = num * xabs + 220.206867912376;
      double den = 8.83883476483184e-02 * xabs + 1.75566716318264;
      den = den * xabs + 16.064177579207;
      den = den * xabs + 86.7807322029461;
      den = den * xabs + 296.564248779674;
      den = den * xabs + 637.333633378831;
      den = den * xabs + 793.826512519948;
      den = den * xabs + 440.413735824752;
      cum = e * num / den;
    } else {
      double build = xabs + 0.65;
      build = xabs + 4.0 / build;
      build = xabs + 3.0 / build;
      build = xabs + 2.0 / build;
      build = xabs + 1.0 / build;
      cum = e / (build * 2.506628274631000502415765);
    }
  }
  return x > 0.0 ? 1.0 - cum : cum;
}

namespace {

void check_scores(const std::vector<double>& scores, const char* which) {
  if (scores.empty()) {
    throw Error(ErrorKind::Data, "stats-roc", "roc_points", which,
                std::string(which) + " class is empty");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw Error(ErrorKind::Data, "stats-roc", "roc_points", which,
                  std::string(which) + " class has non-finite scores");
    }
  }
}

// wins + half-ties over all (positive, negative) pairs, by merging the two
// sorted score lists per distinct value.
double mann_whitney_theta(std::vector<double> pos, std::vector<double> neg) {
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  const double n_p = static_cast<double>(pos.size());
  const double n_n = static_cast<double>(neg.size());
  double credit = 0.0;
  std::size_t i = 0, j = 0;
  double neg_below = 0.0;
  while (i < pos.size()) {
    const double v = pos[i];
    while (j < neg.size() && neg[j] < v) {
      ++j;
    }
    neg_below = static_cast<double>(j);
    std::size_t j_ties = j;
    while (j_ties < neg.size() && neg[j_ties] == v) ++j_ties;
    const double ties = static_cast<double>(j_ties - j);
    std::size_t i_end = i;
    while (i_end < pos.size() && pos[i_end] == v) ++i_end;
    const double pos_at = static_cast<double>(i_end - i);
    credit += pos_at * (neg_below + 0.5 * ties);
    i = i_end;
  }
  return credit / (n_p * n_n);
}

}  // namespace

RocCurve roc_points(const std::vector<double>& pos,
                    const std::vector<double>& neg) {
  check_scores(pos, "positive");
  check_scores(neg, "negative");

  std::vector<double> pos_sorted = pos, neg_sorted = neg;
  std::sort(pos_sorted.begin(), pos_sorted.end());
  std::sort(neg_sorted.begin(), neg_sorted.end());

  std::set<double> distinct(pos.begin(), pos.end());
  distinct.insert(neg.begin(), neg.end());

  const double n_p = static_cast<double>(pos.size());
  const double n_n = static_cast<double>(neg.size());
  const double inf = std::numeric_limits<double>::infinity();

  RocCurve curve;
  curve.thresholds.push_back(inf);
  curve.fp.push_back(0.0);
  curve.tp.push_back(0.0);

  // descending thresholds; strict > counting per the tp/fp definitions
  for (auto it = distinct.rbegin(); it != distinct.rend(); ++it) {
    const double t = *it;
    const double tp_count = static_cast<double>(
        pos_sorted.end() -
        std::upper_bound(pos_sorted.begin(), pos_sorted.end(), t));
    const double fp_count = static_cast<double>(
        neg_sorted.end() -
        std::upper_bound(neg_sorted.begin(), neg_sorted.end(), t));
    curve.thresholds.push_back(t);
    curve.tp.push_back(tp_count / n_p);
    curve.fp.push_back(fp_count / n_n);
  }
  curve.thresholds.push_back(-inf);
  curve.fp.push_back(1.0);
  curve.tp.push_back(1.0);

  double area2 = 0.0;  // twice the area, in probability units
  for (std::size_t k = 0; k + 1 < curve.fp.size(); ++k) {
    area2 += (curve.fp[k + 1] - curve.fp[k]) * (curve.tp[k + 1] + curve.tp[k]);
  }
  curve.theta_trapezoid = 0.5 * area2;
  curve.theta_mann_whitney = mann_whitney_theta(pos, neg);

  if (std::abs(curve.theta_trapezoid - curve.theta_mann_whitney) > 1e-12) {
    throw Error(ErrorKind::Numeric, "stats-roc", "auc", "theta",
                "trapezoid and Mann-Whitney AUC disagree: " +
                    std::to_string(curve.theta_trapezoid) + " vs " +
                    std::to_string(curve.theta_mann_whitney));
  }
  return curve;
}

AucResult auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  const RocCurve curve = roc_points(pos, neg);
  return {curve.theta_trapezoid, curve.theta_mann_whitney};
}

double BootstrapResult::mean() const {
  if (theta_b.empty()) return theta_hat;
  return std::accumulate(theta_b.begin(), theta_b.end(), 0.0) /
         static_cast<double>(theta_b.size());
}

namespace {

int derive_block_len(std::size_t n) {
  const int l = static_cast<int>(
      std::lround(std::cbrt(static_cast<double>(n))));
  return std::max(1, l);
}

std::vector<double> resample_blocks(const std::vector<double>& scores,
                                    int block_len, Rng& rng) {
  const long n = static_cast<long>(scores.size());
  const long l = block_len;
  const long n_blocks = n / l;            // m = floor(N / l)
  const long n_starts = n - l + 1;        // overlapping blocks
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_blocks * l));
  for (long b = 0; b < n_blocks; ++b) {
    const long start = static_cast<long>(rng.below(static_cast<std::uint64_t>(n_starts)));
    for (long k = 0; k < l; ++k) {
      out.push_back(scores[static_cast<std::size_t>(start + k)]);
    }
  }
  return out;
}

}  // namespace

BootstrapResult block_bootstrap(const std::vector<double>& pos,
                                const std::vector<double>& neg, int resamples,
                                std::uint64_t seed, int block_len,
                                int threads) {
  check_scores(pos, "positive");
  check_scores(neg, "negative");
  if (resamples < 1) {
    throw Error(ErrorKind::Parameter, "stats-roc", "block_bootstrap", "B",
                "need at least one resample");
  }
  const int l_pos = block_len > 0 ? block_len : derive_block_len(pos.size());
  const int l_neg = block_len > 0 ? block_len : derive_block_len(neg.size());
  if (l_pos > static_cast<int>(pos.size()) ||
      l_neg > static_cast<int>(neg.size())) {
    throw Error(ErrorKind::Parameter, "stats-roc", "block_bootstrap", "l",
                "block length exceeds class size");
  }

  BootstrapResult result;
  result.theta_hat = mann_whitney_theta(pos, neg);
  result.block_len = l_pos;
  result.n_blocks = static_cast<int>(pos.size()) / l_pos;
  result.resamples = resamples;
  result.theta_b.assign(static_cast<std::size_t>(resamples), 0.0);

  parallel_for(
      resamples,
      [&](int b) {
        Rng rng_pos = Rng::derive(seed, 2 * static_cast<std::uint64_t>(b));
        Rng rng_neg = Rng::derive(seed, 2 * static_cast<std::uint64_t>(b) + 1);
        const std::vector<double> rp = resample_blocks(pos, l_pos, rng_pos);
        const std::vector<double> rn = resample_blocks(neg, l_neg, rng_neg);
        result.theta_b[static_cast<std::size_t>(b)] = mann_whitney_theta(rp, rn);
      },
      threads);

  const double mean = result.mean();
  if (resamples > 1) {
    double ss = 0.0;
    for (double t : result.theta_b) ss += (t - mean) * (t - mean);
    result.sigma = std::sqrt(ss / static_cast<double>(resamples - 1));
  }
  return result;
}

void SignificanceConfig::validate() const {
  if (!(c >= 0.5 && c < 1.0)) {
    throw Error(ErrorKind::Config, "stats-roc", "SignificanceConfig", "c",
                "cutoff c must be in [0.5, 1)");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::Config, "stats-roc", "SignificanceConfig", "alpha",
                "alpha must be in (0, 1)");
  }
}

SignificanceResult significance_test(const BootstrapResult& boot,
                                     const SignificanceConfig& cfg) {
  cfg.validate();
  if (boot.resamples < 2) {
    throw Error(ErrorKind::Parameter, "stats-roc", "significance_test", "B",
                "need at least 2 resamples, got " +
                    std::to_string(boot.resamples));
  }
  const double mean = boot.mean();
  SignificanceResult result;
  if (boot.sigma == 0.0) {
    const double d = cfg.c - mean;
    result.p_value = d > 0.0 ? 1.0 : (d < 0.0 ? 0.0 : 0.5);
  } else {
    result.p_value = normal_cdf((cfg.c - mean) / boot.sigma);
  }
  long below = 0;
  for (double t : boot.theta_b) {
    if (t <= cfg.c) ++below;
  }
  result.p_empirical =
      static_cast<double>(below) / static_cast<double>(boot.theta_b.size());
  result.reject = result.p_value <= cfg.alpha;
  return result;
}

MomentSummary skewness_kurtosis(const std::vector<double>& samples) {
  if (samples.size() < 2) {
    throw Error(ErrorKind::Estimation, "stats-roc", "skewness_kurtosis",
                "samples", "need at least 2 samples");
  }
  const double n = static_cast<double>(samples.size());
  const double mean =
      std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 <= 0.0) {
    throw Error(ErrorKind::Estimation, "stats-roc", "skewness_kurtosis",
                "samples", "zero variance");
  }
  MomentSummary s;
  s.mean = mean;
  s.skewness = m3 / std::pow(m2, 1.5);
  s.kurtosis = m4 / (m2 * m2);
  s.non_normal =
      std::abs(s.skewness) > kSkewnessCutoff || s.kurtosis > kKurtosisCutoff;
  return s;
}

Histogram Histogram::build(const std::vector<double>& samples, int n_bins) {
  if (samples.empty() || n_bins < 1) {
    throw Error(ErrorKind::Parameter, "stats-roc", "Histogram", "samples",
                "need samples and at least one bin");
  }
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) hi = lo + 1.0;  // degenerate data; single occupied bin
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  const double width = (hi - lo) / n_bins;
  for (int i = 0; i <= n_bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + width * i;
  h.counts.assign(static_cast<std::size_t>(n_bins), 0.0);
  for (double x : samples) {
    int bin = static_cast<int>((x - lo) / width);
    bin = std::clamp(bin, 0, n_bins - 1);
    h.counts[static_cast<std::size_t>(bin)] += 1.0;
  }
  return h;
}

double Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0.0);
}

double l1_fit_objective(const Histogram& hist, double mu, double sigma) {
  const double total = hist.total();
  double obj = 0.0;
  for (long i = 0; i < hist.n_bins(); ++i) {
    const double w = hist.edges[static_cast<std::size_t>(i) + 1] -
                     hist.edges[static_cast<std::size_t>(i)];
    const double center = hist.edges[static_cast<std::size_t>(i)] + 0.5 * w;
    const double density = hist.counts[static_cast<std::size_t>(i)] / (total * w);
    const double z = (center - mu) / sigma;
    const double pdf =
        std::exp(-0.5 * z * z) / (sigma * 2.506628274631000502415765);
    obj += std::abs(density - pdf) * w;
  }
  return obj;
}

GaussianFit l1_gaussian_fit(const Histogram& hist) {
  long nonempty = 0;
  for (double c : hist.counts) {
    if (c > 0.0) ++nonempty;
  }
  if (nonempty < 3) {
    throw Error(ErrorKind::Fit, "stats-roc", "l1_gaussian_fit", "histogram",
                "need at least 3 nonempty bins, got " +
                    std::to_string(nonempty));
  }

  // moment start from binned data
  const double total = hist.total();
  double mean = 0.0;
  for (long i = 0; i < hist.n_bins(); ++i) {
    const double center = 0.5 * (hist.edges[static_cast<std::size_t>(i)] +
                                 hist.edges[static_cast<std::size_t>(i) + 1]);
    mean += center * hist.counts[static_cast<std::size_t>(i)];
  }
  mean /= total;
  double var = 0.0;
  for (long i = 0; i < hist.n_bins(); ++i) {
    const double center = 0.5 * (hist.edges[static_cast<std::size_t>(i)] +
                                 hist.edges[static_cast<std::size_t>(i) + 1]);
    var += (center - mean) * (center - mean) *
           hist.counts[static_cast<std::size_t>(i)];
  }
  var /= total;
  if (var <= 0.0) {
    throw Error(ErrorKind::Fit, "stats-roc", "l1_gaussian_fit", "histogram",
                "histogram has zero spread");
  }

  // Nelder-Mead over (mu, log sigma)
  auto f = [&](double mu_p, double log_sigma) {
    return l1_fit_objective(hist, mu_p, std::exp(log_sigma));
  };
  struct Vertex {
    double mu, ls, value;
  };
  const double ls0 = 0.5 * std::log(var);
  std::vector<Vertex> simplex = {
      {mean, ls0, 0.0},
      {mean + 0.1 * std::sqrt(var), ls0, 0.0},
      {mean, ls0 + 0.1, 0.0},
  };
  for (Vertex& v : simplex) v.value = f(v.mu, v.ls);

  const double tol = 1e-6;
  for (int iter = 0; iter < 500; ++iter) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
    if (simplex[2].value - simplex[0].value < tol * (1.0 + simplex[0].value)) {
      break;
    }
    const double cmu = 0.5 * (simplex[0].mu + simplex[1].mu);
    const double cls = 0.5 * (simplex[0].ls + simplex[1].ls);
    Vertex refl{cmu + (cmu - simplex[2].mu), cls + (cls - simplex[2].ls), 0.0};
    refl.value = f(refl.mu, refl.ls);
    if (refl.value < simplex[0].value) {
      Vertex exp_v{cmu + 2.0 * (cmu - simplex[2].mu),
                   cls + 2.0 * (cls - simplex[2].ls), 0.0};
      exp_v.value = f(exp_v.mu, exp_v.ls);
      simplex[2] = exp_v.value < refl.value ? exp_v : refl;
    } else if (refl.value < simplex[1].value) {
      simplex[2] = refl;
    } else {
      Vertex contr{cmu + 0.5 * (simplex[2].mu - cmu),
                   cls + 0.5 * (simplex[2].ls - cls), 0.0};
      contr.value = f(contr.mu, contr.ls);
      if (contr.value < simplex[2].value) {
        simplex[2] = contr;
      } else {
        for (int k = 1; k < 3; ++k) {
          simplex[static_cast<std::size_t>(k)].mu =
              0.5 * (simplex[static_cast<std::size_t>(k)].mu + simplex[0].mu);
          simplex[static_cast<std::size_t>(k)].ls =
              0.5 * (simplex[static_cast<std::size_t>(k)].ls + simplex[0].ls);
          simplex[static_cast<std::size_t>(k)].value =
              f(simplex[static_cast<std::size_t>(k)].mu,
                simplex[static_cast<std::size_t>(k)].ls);
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(),
            [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
  return {simplex[0].mu, std::exp(simplex[0].ls), simplex[0].value};
}

Spectrum welch_psd(const std::vector<double>& x, double sample_rate,
                   int segment) {
  if (x.size() < 8) {
    throw Error(ErrorKind::Parameter, "stats-roc", "welch_psd", "x",
                "signal too short");
  }
  long seg = 1;
  while (seg * 2 <= static_cast<long>(x.size()) && seg * 2 <= segment) seg *= 2;

  std::vector<double> window(static_cast<std::size_t>(seg));
  double wss = 0.0;
  for (long i = 0; i < seg; ++i) {
    const double w =
        0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                              static_cast<double>(seg)));
    window[static_cast<std::size_t>(i)] = w;
    wss += w * w;
  }

  Eigen::FFT<double> fft;
  const long hop = seg / 2;
  const long n_freq = seg / 2 + 1;
  std::vector<double> psd(static_cast<std::size_t>(n_freq), 0.0);
  long n_segments = 0;
  std::vector<double> buf(static_cast<std::size_t>(seg));
  std::vector<std::complex<double>> spec;
  for (long start = 0; start + seg <= static_cast<long>(x.size());
       start += hop) {
    for (long i = 0; i < seg; ++i) {
      buf[static_cast<std::size_t>(i)] =
          x[static_cast<std::size_t>(start + i)] *
          window[static_cast<std::size_t>(i)];
    }
    fft.fwd(spec, buf);
    for (long k = 0; k < n_freq; ++k) {
      const double mag2 = std::norm(spec[static_cast<std::size_t>(k)]);
      const double one_sided = (k == 0 || k == seg / 2) ? 1.0 : 2.0;
      psd[static_cast<std::size_t>(k)] +=
          one_sided * mag2 / (sample_rate * wss);
    }
    ++n_segments;
  }

  Spectrum s;
  s.df = sample_rate / static_cast<double>(seg);
  s.freq.resize(static_cast<std::size_t>(n_freq));
  s.power.resize(static_cast<std::size_t>(n_freq));
  for (long k = 0; k < n_freq; ++k) {
    s.freq[static_cast<std::size_t>(k)] = s.df * static_cast<double>(k);
    s.power[static_cast<std::size_t>(k)] =
        psd[static_cast<std::size_t>(k)] / static_cast<double>(n_segments);
  }
  return s;
}

double Spectrum::band_power(double f_lo, double f_hi) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < freq.size(); ++k) {
    if (freq[k] >= f_lo && freq[k] < f_hi) sum += power[k] * df;
  }
  return sum;
}

double band_power(const std::vector<double>& x, double sample_rate,
                  double f_lo, double f_hi) {
  return welch_psd(x, sample_rate).band_power(f_lo, f_hi);
}

std::vector<PairTestResult> evaluate_pairs(
    const std::vector<PairBootstrap>& pairs, const SignificanceConfig& cfg) {
  std::vector<PairTestResult> out;
  out.reserve(pairs.size());
  for (const PairBootstrap& pair : pairs) {
    const SignificanceResult sig = significance_test(pair.boot, cfg);
    out.push_back({pair.source, pair.dest, pair.measure, pair.boot.theta_hat,
                   sig.p_value, sig.p_empirical, sig.reject});
  }
  return out;
}

ConnectivityMatrix connectivity_change_matrix(
    const std::vector<PairBootstrap>& pairs, const SignificanceConfig& cfg) {
  ConnectivityMatrix matrix;
  std::set<int> rois;
  std::set<MeasureKind> measures;
  for (const PairBootstrap& pair : pairs) {
    rois.insert(pair.source);
    rois.insert(pair.dest);
    measures.insert(pair.measure);
  }
  matrix.rois.assign(rois.begin(), rois.end());
  const std::size_t r = matrix.rois.size();
  for (MeasureKind kind : measures) {
    matrix.significant[kind].assign(r, std::vector<bool>(r, false));
  }
  auto roi_index = [&](int roi) {
    return static_cast<std::size_t>(
        std::lower_bound(matrix.rois.begin(), matrix.rois.end(), roi) -
        matrix.rois.begin());
  };
  for (const PairTestResult& res : evaluate_pairs(pairs, cfg)) {
    if (res.source == res.dest) continue;  // diagonal stays false
    matrix.significant[res.measure][roi_index(res.source)][roi_index(res.dest)] =
        res.significant;
  }
  return matrix;
}

}  // namespace causalflow
