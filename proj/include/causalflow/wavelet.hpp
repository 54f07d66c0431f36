#pragma once

#include <string>
#include <vector>

namespace causalflow {

// Orthogonal compactly supported wavelet, periodized transform convention:
//   approx[i] = sum_j h[j] x[(2i+j) mod n],  detail[i] = sum_j g[j] x[...]
// with the quadrature mirror g[j] = (-1)^j h[L-1-j].
struct WaveletFilter {
  std::string name;
  std::vector<double> lowpass;  // sums to sqrt(2)

  std::vector<double> highpass() const;

  static const WaveletFilter& db2();  // 4 taps
  static const WaveletFilter& db4();  // 8 taps
  static const WaveletFilter& by_name(const std::string& name);
};

// Single periodized analysis/synthesis step; x.size() must be even.
void dwt_step(const WaveletFilter& filter, const std::vector<double>& x,
              std::vector<double>& approx, std::vector<double>& detail);
std::vector<double> idwt_step(const WaveletFilter& filter,
                              const std::vector<double>& approx,
                              const std::vector<double>& detail);

// Multi-level dyadic decomposition. details[0] is the finest level (level 1),
// details[levels-1] the coarsest.
struct DyadicBands {
  std::vector<double> approx;
  std::vector<std::vector<double>> details;

  int levels() const { return static_cast<int>(details.size()); }
  double energy() const;
};

long padded_length(long n, int levels);

// Signal length must be divisible by 2^levels.
DyadicBands dwt(const WaveletFilter& filter, std::vector<double> signal,
                int levels);
std::vector<double> idwt(const WaveletFilter& filter, const DyadicBands& bands);

}  // namespace causalflow
