#include "causalflow/wavelet.hpp"

#include <cmath>

#include "causalflow/errors.hpp"

namespace causalflow {

namespace {

WaveletFilter make_db2() {
  const double s3 = std::sqrt(3.0);
  const double s2 = std::sqrt(2.0);
  return {"db2",
          {(1.0 + s3) / (4.0 * s2), (3.0 + s3) / (4.0 * s2),
           (3.0 - s3) / (4.0 * s2), (1.0 - s3) / (4.0 * s2)}};
}

WaveletFilter make_db4() {
  // Daubechies 8-tap scaling coefficients, orthonormal (sum = sqrt(2)).
  return {"db4",
          {0.23037781330885523, 0.71484657055254153, 0.63088076792959036,
           -0.02798376941698385, -0.18703481171888114, 0.03084138183598697,
           0.03288301166698295, -0.01059740178499728}};
}

}  // namespace

std::vector<double> WaveletFilter::highpass() const {
  const std::size_t l = lowpass.size();
  std::vector<double> g(l);
  for (std::size_t j = 0; j < l; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    g[j] = sign * lowpass[l - 1 - j];
  }
  return g;
}

const WaveletFilter& WaveletFilter::db2() {
  static const WaveletFilter f = make_db2();
  return f;
}

const WaveletFilter& WaveletFilter::db4() {
  static const WaveletFilter f = make_db4();
  return f;
}

const WaveletFilter& WaveletFilter::by_name(const std::string& name) {
  if (name == "db2") return db2();
  if (name == "db4") return db4();
  throw Error(ErrorKind::Config, "synth-eeg", "WaveletFilter", "wavelet",
              "unknown wavelet '" + name + "' (expected db2 or db4)");
}

void dwt_step(const WaveletFilter& filter, const std::vector<double>& x,
              std::vector<double>& approx, std::vector<double>& detail) {
  const std::size_t n = x.size();
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorKind::Parameter, "synth-eeg", "dwt_step", "n_samples",
                "need an even signal length, got " + std::to_string(n));
  }
  const std::vector<double>& h = filter.lowpass;
  const std::vector<double> g = filter.highpass();
  const std::size_t half = n / 2;
  approx.assign(half, 0.0);
  detail.assign(half, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
      const double v = x[(2 * i + j) % n];
      a += v * h[j];
      d += v * g[j];
    }
    approx[i] = a;
    detail[i] = d;
  }
}

std::vector<double> idwt_step(const WaveletFilter& filter,
                              const std::vector<double>& approx,
                              const std::vector<double>& detail) {
  if (approx.size() != detail.size()) {
    throw Error(ErrorKind::Parameter, "synth-eeg", "idwt_step", "coefficients",
                "approximation/detail length mismatch");
  }
  const std::size_t half = approx.size();
  const std::size_t n = 2 * half;
  const std::vector<double>& h = filter.lowpass;
  const std::vector<double> g = filter.highpass();
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    for (std::size_t j = 0; j < h.size(); ++j) {
      x[(2 * i + j) % n] += approx[i] * h[j] + detail[i] * g[j];
    }
  }
  return x;
}

double DyadicBands::energy() const {
  double e = 0.0;
  for (double v : approx) e += v * v;
  for (const std::vector<double>& level : details) {
    for (double v : level) e += v * v;
  }
  return e;
}

long padded_length(long n, int levels) {
  const long block = 1L << levels;
  return (n + block - 1) / block * block;
}

DyadicBands dwt(const WaveletFilter& filter, std::vector<double> signal,
                int levels) {
  if (levels < 1) {
    throw Error(ErrorKind::Parameter, "synth-eeg", "dwt", "levels",
                "levels must be >= 1");
  }
  if (padded_length(static_cast<long>(signal.size()), levels) !=
      static_cast<long>(signal.size())) {
    throw Error(ErrorKind::Parameter, "synth-eeg", "dwt", "n_samples",
                "signal length must be divisible by 2^levels");
  }
  DyadicBands bands;
  bands.details.resize(static_cast<std::size_t>(levels));
  std::vector<double> current = std::move(signal);
  for (int level = 1; level <= levels; ++level) {
    std::vector<double> approx, detail;
    dwt_step(filter, current, approx, detail);
    bands.details[static_cast<std::size_t>(level - 1)] = std::move(detail);
    current = std::move(approx);
  }
  bands.approx = std::move(current);
  return bands;
}

std::vector<double> idwt(const WaveletFilter& filter,
                         const DyadicBands& bands) {
  std::vector<double> current = bands.approx;
  for (int level = bands.levels(); level >= 1; --level) {
    current = idwt_step(filter, current,
                        bands.details[static_cast<std::size_t>(level - 1)]);
  }
  return current;
}

}  // namespace causalflow
