#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "causalflow/errors.hpp"
#include "causalflow/rng.hpp"
#include "causalflow/stats.hpp"

using namespace causalflow;

namespace {

// brute-force pair counting; oracle for the Mann-Whitney statistic
double pair_count_theta(const std::vector<double>& pos,
                        const std::vector<double>& neg) {
  double credit = 0.0;
  for (double p : pos) {
    for (double n : neg) {
      if (p > n) credit += 1.0;
      else if (p == n) credit += 0.5;
    }
  }
  return credit / (static_cast<double>(pos.size()) * neg.size());
}

}  // namespace

TEST_CASE("normal_cdf against erfc and tabulated values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normal_cdf(-5.0) == doctest::Approx(2.8665157187919391e-7).epsilon(1e-9));
  for (double x = -8.0; x <= 8.0; x += 0.173) {
    const double reference = 0.5 * std::erfc(-x / std::sqrt(2.0));
    CHECK(std::abs(normal_cdf(x) - reference) < 1e-10);
  }
  CHECK(normal_cdf(40.0) == 1.0);
  CHECK(normal_cdf(-40.0) == 0.0);
}

TEST_CASE("roc_points basics") {
  SUBCASE("perfect separation") {
    const RocCurve curve = roc_points({2.0, 3.0}, {0.0, 1.0});
    CHECK(curve.theta_trapezoid == doctest::Approx(1.0));
    CHECK(curve.theta_mann_whitney == doctest::Approx(1.0));
    CHECK(curve.fp.front() == 0.0);
    CHECK(curve.tp.front() == 0.0);
    CHECK(curve.fp.back() == 1.0);
    CHECK(curve.tp.back() == 1.0);
  }
  SUBCASE("identical classes have no discriminative ability") {
    const std::vector<double> s{0.3, 0.7, 0.7, 1.2};
    const AucResult r = auc(s, s);
    CHECK(r.trapezoid == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("pos {1,3} vs neg {2}: one win of two pairs") {
    const AucResult r = auc({1.0, 3.0}, {2.0});
    CHECK(r.trapezoid == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.mann_whitney == doctest::Approx(pair_count_theta({1.0, 3.0}, {2.0})));
  }
  SUBCASE("thresholds are the observed scores with sentinels") {
    const RocCurve curve = roc_points({1.0, 3.0}, {2.0});
    REQUIRE(curve.thresholds.size() == 5);  // +inf, 3, 2, 1, -inf
    CHECK(std::isinf(curve.thresholds.front()));
    CHECK(curve.thresholds[1] == 3.0);
    CHECK(curve.thresholds[2] == 2.0);
    CHECK(curve.thresholds[3] == 1.0);
    CHECK(std::isinf(curve.thresholds.back()));
  }
  SUBCASE("monotone curve") {
    Rng rng(6);
    std::vector<double> pos, neg;
    for (int i = 0; i < 50; ++i) {
      pos.push_back(rng.normal() + 0.5);
      neg.push_back(rng.normal());
    }
    const RocCurve curve = roc_points(pos, neg);
    for (std::size_t k = 1; k < curve.fp.size(); ++k) {
      CHECK(curve.fp[k] >= curve.fp[k - 1]);
      CHECK(curve.tp[k] >= curve.tp[k - 1]);
    }
  }
  SUBCASE("empty class is an input error") {
    CHECK_THROWS_AS(roc_points({}, {1.0}), Error);
    CHECK_THROWS_AS(roc_points({1.0}, {}), Error);
  }
}

TEST_CASE("trapezoid AUC equals the Mann-Whitney statistic, ties included") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pos, neg;
    const int np = 2 + static_cast<int>(rng.below(40));
    const int nn = 2 + static_cast<int>(rng.below(40));
    // integer-ish scores force plenty of ties
    for (int i = 0; i < np; ++i) pos.push_back(static_cast<double>(rng.below(8)) + 1.0);
    for (int i = 0; i < nn; ++i) neg.push_back(static_cast<double>(rng.below(8)));
    const AucResult r = auc(pos, neg);
    CHECK(std::abs(r.trapezoid - r.mann_whitney) < 1e-12);
    CHECK(r.mann_whitney == doctest::Approx(pair_count_theta(pos, neg)).epsilon(1e-12));
  }
}

TEST_CASE("label swap maps theta to 1 - theta") {
  Rng rng(23);
  std::vector<double> pos, neg;
  for (int i = 0; i < 60; ++i) {
    pos.push_back(static_cast<double>(rng.below(10)));
    neg.push_back(static_cast<double>(rng.below(10)));
  }
  const AucResult fwd = auc(pos, neg);
  const AucResult rev = auc(neg, pos);
  CHECK(std::abs(fwd.mann_whitney + rev.mann_whitney - 1.0) < 1e-12);
}

TEST_CASE("score shift leaves the ROC unchanged") {
  std::vector<double> pos{0.1, 0.5, 0.9}, neg{0.0, 0.4};
  const RocCurve base = roc_points(pos, neg);
  for (double& s : pos) s += 10.0;
  for (double& s : neg) s += 10.0;
  const RocCurve shifted = roc_points(pos, neg);
  CHECK(base.fp == shifted.fp);
  CHECK(base.tp == shifted.tp);
  CHECK(base.theta_trapezoid == shifted.theta_trapezoid);
}

TEST_CASE("random equal classes give theta near one half") {
  Rng rng(31);
  std::vector<double> pos, neg;
  for (int i = 0; i < 1000; ++i) {
    pos.push_back(rng.normal());
    neg.push_back(rng.normal());
  }
  const AucResult r = auc(pos, neg);
  CHECK(r.trapezoid > 0.47);
  CHECK(r.trapezoid < 0.53);
}

TEST_CASE("block bootstrap") {
  SUBCASE("derived block length and count: 512 -> l=8, m=64") {
    Rng rng(3);
    std::vector<double> pos, neg;
    for (int i = 0; i < 512; ++i) {
      pos.push_back(rng.normal() + 1.0);
      neg.push_back(rng.normal());
    }
    const BootstrapResult boot = block_bootstrap(pos, neg, 50, 9);
    CHECK(boot.block_len == 8);
    CHECK(boot.n_blocks == 64);
    CHECK(boot.resamples == 50);
    CHECK(boot.theta_b.size() == 50);
  }
  SUBCASE("constant scores: every resampled theta is one half") {
    const std::vector<double> pos(32, 1.0), neg(32, 1.0);
    const BootstrapResult boot = block_bootstrap(pos, neg, 25, 1);
    for (double t : boot.theta_b) CHECK(t == doctest::Approx(0.5));
    CHECK(boot.sigma == 0.0);
  }
  SUBCASE("bootstrap mean tracks the observed statistic") {
    Rng rng(8);
    std::vector<double> pos, neg;
    for (int i = 0; i < 200; ++i) {
      pos.push_back(rng.normal() + 1.2);
      neg.push_back(rng.normal());
    }
    const BootstrapResult boot = block_bootstrap(pos, neg, 400, 77);
    CHECK(std::abs(boot.mean() - boot.theta_hat) <
          2.0 * boot.sigma + 1e-6);
  }
  SUBCASE("determinism under seed, independent of thread count") {
    Rng rng(12);
    std::vector<double> pos, neg;
    for (int i = 0; i < 100; ++i) {
      pos.push_back(rng.normal() + 0.3);
      neg.push_back(rng.normal());
    }
    const BootstrapResult a = block_bootstrap(pos, neg, 64, 5, 0, 1);
    const BootstrapResult b = block_bootstrap(pos, neg, 64, 5, 0, 2);
    CHECK(a.theta_b == b.theta_b);
  }
  SUBCASE("explicit block length larger than the class errors") {
    const std::vector<double> pos(50, 1.0), neg(50, 0.0);
    CHECK_THROWS_AS(block_bootstrap(pos, neg, 10, 1, 100), Error);
  }
}

TEST_CASE("significance_test") {
  BootstrapResult boot;
  boot.resamples = 2;
  boot.theta_b = {0.93, 0.97};  // mean 0.95
  boot.sigma = 0.02;
  boot.theta_hat = 0.95;

  SUBCASE("strong evidence against the null") {
    const SignificanceResult r = significance_test(boot, {0.85, 0.05});
    CHECK(r.p_value == doctest::Approx(2.8665157187919391e-7).epsilon(1e-6));
    CHECK(r.reject);
    CHECK(r.p_empirical == 0.0);
  }
  SUBCASE("cutoff at the mean: p = 1/2, no rejection") {
    const SignificanceResult r = significance_test(boot, {0.95, 0.05});
    CHECK(r.p_value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_FALSE(r.reject);
  }
  SUBCASE("zero sigma resolves by sign") {
    BootstrapResult flat = boot;
    flat.sigma = 0.0;
    CHECK(significance_test(flat, {0.9, 0.05}).p_value == 0.0);
    flat.theta_b = {0.5, 0.5};
    CHECK(significance_test(flat, {0.9, 0.05}).p_value == 1.0);
  }
  SUBCASE("too few resamples") {
    BootstrapResult tiny;
    tiny.resamples = 1;
    tiny.theta_b = {0.9};
    CHECK_THROWS_AS(significance_test(tiny, {0.85, 0.05}), Error);
  }
  SUBCASE("config validation") {
    CHECK_THROWS_AS(significance_test(boot, {0.4, 0.05}), Error);
    CHECK_THROWS_AS(significance_test(boot, {0.85, 0.0}), Error);
  }
}

TEST_CASE("skewness and kurtosis") {
  SUBCASE("symmetric two-point distribution") {
    std::vector<double> s;
    for (int i = 0; i < 100; ++i) {
      s.push_back(1.0);
      s.push_back(-1.0);
    }
    const MomentSummary m = skewness_kurtosis(s);
    CHECK(m.mean == doctest::Approx(0.0));
    CHECK(m.skewness == doctest::Approx(0.0));
    CHECK(m.kurtosis == doctest::Approx(1.0));
    CHECK_FALSE(m.non_normal);  // cutoffs flag high kurtosis only
  }
  SUBCASE("standard normal samples") {
    Rng rng(41);
    std::vector<double> s(1000000);
    for (double& v : s) v = rng.normal();
    const MomentSummary m = skewness_kurtosis(s);
    CHECK(std::abs(m.skewness) < 0.02);
    CHECK(m.kurtosis > 2.95);
    CHECK(m.kurtosis < 3.05);
    CHECK_FALSE(m.non_normal);
  }
  SUBCASE("exponential samples") {
    Rng rng(43);
    std::vector<double> s(1000000);
    for (double& v : s) v = -std::log(1.0 - rng.uniform());
    const MomentSummary m = skewness_kurtosis(s);
    CHECK(m.skewness == doctest::Approx(2.0).epsilon(0.03));
    CHECK(m.kurtosis == doctest::Approx(9.0).epsilon(0.1));
    CHECK(m.non_normal);
  }
  SUBCASE("constant input errors") {
    CHECK_THROWS_AS(skewness_kurtosis(std::vector<double>(10, 3.0)), Error);
  }
}

TEST_CASE("two-point summary flags") {
  // kurtosis = 1 < 7 and |skew| = 0 < 2: screen passes
  std::vector<double> s;
  for (int i = 0; i < 100; ++i) {
    s.push_back(1.0);
    s.push_back(-1.0);
  }
  const MomentSummary m = skewness_kurtosis(s);
  CHECK_FALSE(std::abs(m.skewness) > kSkewnessCutoff);
  CHECK_FALSE(m.kurtosis > kKurtosisCutoff);
}

TEST_CASE("l1 gaussian fit") {
  const double mu = 1.7, sigma = 0.8;
  Histogram hist;
  const int bins = 60;
  hist.edges.resize(bins + 1);
  hist.counts.resize(bins);
  const double lo = mu - 5.0 * sigma, hi = mu + 5.0 * sigma;
  for (int i = 0; i <= bins; ++i) {
    hist.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
  }
  for (int i = 0; i < bins; ++i) {
    const double c = 0.5 * (hist.edges[static_cast<std::size_t>(i)] +
                            hist.edges[static_cast<std::size_t>(i) + 1]);
    const double z = (c - mu) / sigma;
    hist.counts[static_cast<std::size_t>(i)] =
        1e6 * std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
  }

  SUBCASE("recovers the parameters of an exact Gaussian histogram") {
    const GaussianFit fit = l1_gaussian_fit(hist);
    CHECK(fit.mu == doctest::Approx(mu).epsilon(1e-3));
    CHECK(fit.sigma == doctest::Approx(sigma).epsilon(1e-3));
  }
  SUBCASE("grid-search oracle agrees within one lattice cell") {
    const GaussianFit fit = l1_gaussian_fit(hist);
    double best = 1e300, best_mu = 0.0, best_sigma = 0.0;
    const double dmu = 4.0 * sigma / 49.0, dsg = 1.5 * sigma / 49.0;
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        const double m = mu - 2.0 * sigma + dmu * i;
        const double s = 0.25 * sigma + dsg * j;
        const double obj = l1_fit_objective(hist, m, s);
        if (obj < best) {
          best = obj;
          best_mu = m;
          best_sigma = s;
        }
      }
    }
    CHECK(std::abs(fit.mu - best_mu) <= dmu);
    CHECK(std::abs(fit.sigma - best_sigma) <= dsg);
    CHECK(fit.objective <= best + 1e-9);
  }
  SUBCASE("symmetric histogram centers the mean") {
    const GaussianFit fit = l1_gaussian_fit(hist);
    CHECK(std::abs(fit.mu - mu) < 1e-3);
  }
  SUBCASE("fewer than three nonempty bins is a fit error") {
    Histogram tiny;
    tiny.edges = {0.0, 1.0, 2.0, 3.0};
    tiny.counts = {5.0, 7.0, 0.0};
    CHECK_THROWS_AS(l1_gaussian_fit(tiny), Error);
  }
}

TEST_CASE("histogram build") {
  Rng rng(3);
  std::vector<double> s(10000);
  for (double& v : s) v = rng.normal();
  const Histogram h = Histogram::build(s, 31);
  CHECK(h.n_bins() == 31);
  CHECK(h.total() == doctest::Approx(10000.0));
  const Histogram degenerate = Histogram::build(std::vector<double>(5, 2.0), 7);
  CHECK(degenerate.total() == doctest::Approx(5.0));
}

TEST_CASE("welch psd locates a pure tone") {
  const double fs = 250.0, f0 = 10.0;
  std::vector<double> x(1 << 14);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * M_PI * f0 * static_cast<double>(i) / fs);
  }
  const Spectrum psd = welch_psd(x, fs);
  const double in_band = psd.band_power(f0 - 2.0, f0 + 2.0);
  const double total = psd.band_power(0.0, fs / 2.0 + 1.0);
  CHECK(in_band / total > 0.98);
  // total power of a unit sine is 1/2
  CHECK(total == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("connectivity change matrix") {
  auto make_boot = [](double mean, double sigma) {
    BootstrapResult boot;
    boot.resamples = 2;
    boot.theta_hat = mean;
    boot.theta_b = {mean - sigma, mean + sigma};
    boot.sigma = sigma;
    return boot;
  };
  std::vector<PairBootstrap> pairs;
  pairs.push_back({1, 2, MeasureKind::Cbi, make_boot(0.98, 0.01)});
  pairs.push_back({2, 1, MeasureKind::Cbi, make_boot(0.98, 0.01)});
  pairs.push_back({1, 3, MeasureKind::Cbi, make_boot(0.5, 0.05)});
  pairs.push_back({3, 1, MeasureKind::Cbi, make_boot(0.52, 0.05)});
  pairs.push_back({2, 3, MeasureKind::MasseyDi, make_boot(0.9, 0.01)});

  const ConnectivityMatrix m =
      connectivity_change_matrix(pairs, {0.85, 0.05});
  REQUIRE(m.rois == std::vector<int>{1, 2, 3});
  CHECK(m.significant.at(MeasureKind::Cbi)[0][1]);
  CHECK(m.significant.at(MeasureKind::Cbi)[1][0]);
  CHECK_FALSE(m.significant.at(MeasureKind::Cbi)[0][2]);
  CHECK_FALSE(m.significant.at(MeasureKind::Cbi)[2][0]);
  CHECK(m.significant.at(MeasureKind::MasseyDi)[1][2]);
  // diagonal stays false
  for (int i = 0; i < 3; ++i) {
    CHECK_FALSE(m.significant.at(MeasureKind::Cbi)[static_cast<std::size_t>(i)]
                             [static_cast<std::size_t>(i)]);
  }

  SUBCASE("all-chance thetas flag nothing") {
    std::vector<PairBootstrap> flat;
    flat.push_back({1, 2, MeasureKind::Cbi, make_boot(0.5, 0.02)});
    flat.push_back({2, 1, MeasureKind::Cbi, make_boot(0.5, 0.02)});
    const ConnectivityMatrix empty = connectivity_change_matrix(flat, {0.85, 0.05});
    for (const auto& row : empty.significant.at(MeasureKind::Cbi)) {
      for (bool cell : row) CHECK_FALSE(cell);
    }
  }
}
