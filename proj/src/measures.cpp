#include "causalflow/measures.hpp"

#include <cmath>

#include "causalflow/errors.hpp"

namespace causalflow {

namespace {

constexpr double kLog2PiE = 2.837877066409345483560659;  // log(2*pi*e)

// Selector lookup with the source/destination slots swapped for the reverse
// direction; c always counts the Z prefix.
struct DirectedLogDet {
  PrefixLogDet* ld;
  bool swapped;
  double operator()(int n_src, int n_dst, int n_z) const {
    return swapped ? (*ld)(n_dst, n_src, n_z) : (*ld)(n_src, n_dst, n_z);
  }
};

DirectedLogDet directed(PrefixLogDet& ld, Direction dir) {
  return {&ld, dir == Direction::YtoX};
}

}  // namespace

const char* to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Cbi: return "cbi";
    case MeasureKind::MasseyDi: return "massey_di";
    case MeasureKind::KamitakeDi: return "kamitake_di";
    case MeasureKind::SumTransferEntropy: return "sum_te";
    case MeasureKind::CausalMi: return "causal_mi";
    case MeasureKind::ConditionalMi: return "conditional_mi";
  }
  return "unknown";
}

MeasureKind measure_from_string(const std::string& name) {
  for (MeasureKind kind : all_measures()) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::Config, "gaussian-measures", "measure_from_string",
              "measure", "unknown measure '" + name + "'");
}

bool is_symmetric(MeasureKind kind) {
  return kind == MeasureKind::Cbi || kind == MeasureKind::CausalMi ||
         kind == MeasureKind::ConditionalMi;
}

const std::vector<MeasureKind>& all_measures() {
  static const std::vector<MeasureKind> kinds = {
      MeasureKind::Cbi,      MeasureKind::MasseyDi,
      MeasureKind::KamitakeDi, MeasureKind::SumTransferEntropy,
      MeasureKind::CausalMi, MeasureKind::ConditionalMi};
  return kinds;
}

double gaussian_entropy(const Eigen::MatrixXd& c) {
  const double n = static_cast<double>(c.rows());
  return 0.5 * (n * kLog2PiE + log_det_psd(c));
}

double cbi_rate(PrefixLogDet& ld) {
  const int n_w = ld.window_length();
  double sum = 0.0;
  for (int n = 1; n <= n_w; ++n) {
    sum += ld(n - 1, n - 1, n - 1) + ld(n, 0, n - 1) + ld(0, n, n - 1) -
           ld(n, n, n - 1) - ld(n - 1, 0, n - 1) - ld(0, n - 1, n - 1);
  }
  return 0.5 * sum;
}

double massey_rate(PrefixLogDet& ld, Direction dir) {
  const DirectedLogDet d = directed(ld, dir);
  const int n_w = ld.window_length();
  double sum = 0.0;
  for (int n = 1; n <= n_w; ++n) {
    sum += d(0, n, n - 1) + d(n, n - 1, n - 1) - d(0, n - 1, n - 1) -
           d(n, n, n - 1);
  }
  return 0.5 * sum;
}

double kamitake_rate(PrefixLogDet& ld, Direction dir) {
  const DirectedLogDet d = directed(ld, dir);
  const int n_w = ld.window_length();
  double sum = 0.0;
  for (int n = 1; n <= n_w; ++n) {
    sum += d(n - 1, n_w, n - 1) + d(n, n, n - 1) - d(n - 1, n, n - 1) -
           d(n, n_w, n - 1);
  }
  return 0.5 * sum;
}

double sum_te_rate(PrefixLogDet& ld, Direction dir) {
  const DirectedLogDet d = directed(ld, dir);
  const int n_w = ld.window_length();
  double sum = 0.0;
  for (int n = 1; n <= n_w; ++n) {
    sum += d(0, n, n - 1) + d(n - 1, n - 1, n - 1) - d(0, n - 1, n - 1) -
           d(n - 1, n, n - 1);
  }
  return 0.5 * sum;
}

double causal_mi_rate(PrefixLogDet& ld) {
  return massey_rate(ld, Direction::XtoY) + kamitake_rate(ld, Direction::YtoX);
}

double conditional_mi_rate(PrefixLogDet& ld) {
  const int n_w = ld.window_length();
  return 0.5 * (ld(n_w, 0, n_w - 1) + ld(0, n_w, n_w - 1) -
                ld(0, 0, n_w - 1) - ld(n_w, n_w, n_w - 1));
}

double instantaneous_mi_rate(PrefixLogDet& ld) {
  const int n_w = ld.window_length();
  double sum = 0.0;
  for (int n = 1; n <= n_w; ++n) {
    sum += ld(n, n - 1, n - 1) + ld(n - 1, n, n - 1) -
           ld(n - 1, n - 1, n - 1) - ld(n, n, n - 1);
  }
  return 0.5 * sum;
}

double causal_mi_rate_chain(PrefixLogDet& ld, Direction dir) {
  const DirectedLogDet d = directed(ld, dir);
  const int n_w = ld.window_length();
  double sum = 0.0;
  for (int n = 1; n <= n_w; ++n) {
    sum += d(n_w, n - 1, n - 1) + d(0, n, n - 1) - d(0, n - 1, n - 1) -
           d(n_w, n, n - 1);
  }
  return 0.5 * sum;
}

double measure_rate(PrefixLogDet& ld, MeasureKind kind, Direction dir) {
  switch (kind) {
    case MeasureKind::Cbi: return cbi_rate(ld);
    case MeasureKind::MasseyDi: return massey_rate(ld, dir);
    case MeasureKind::KamitakeDi: return kamitake_rate(ld, dir);
    case MeasureKind::SumTransferEntropy: return sum_te_rate(ld, dir);
    case MeasureKind::CausalMi: return causal_mi_rate(ld);
    case MeasureKind::ConditionalMi: return conditional_mi_rate(ld);
  }
  throw Error(ErrorKind::Parameter, "gaussian-measures", "measure_rate", "kind",
              "unknown measure kind");
}

double cbi_rate(const PrefixCovariance& pc) {
  PrefixLogDet ld(pc);
  return cbi_rate(ld);
}
double massey_rate(const PrefixCovariance& pc, Direction dir) {
  PrefixLogDet ld(pc);
  return massey_rate(ld, dir);
}
double kamitake_rate(const PrefixCovariance& pc, Direction dir) {
  PrefixLogDet ld(pc);
  return kamitake_rate(ld, dir);
}
double sum_te_rate(const PrefixCovariance& pc, Direction dir) {
  PrefixLogDet ld(pc);
  return sum_te_rate(ld, dir);
}
double causal_mi_rate(const PrefixCovariance& pc) {
  PrefixLogDet ld(pc);
  return causal_mi_rate(ld);
}
double conditional_mi_rate(const PrefixCovariance& pc) {
  PrefixLogDet ld(pc);
  return conditional_mi_rate(ld);
}
double measure_rate(const PrefixCovariance& pc, MeasureKind kind,
                    Direction dir) {
  PrefixLogDet ld(pc);
  return measure_rate(ld, kind, dir);
}

double clamp_rate(double value, ClampStats* stats) {
  if (stats) stats->total.fetch_add(1);
  if (value >= 0.0) return value;
  if (stats) {
    stats->clamped.fetch_add(1);
    if (value < -kClampTolerance) stats->severe.fetch_add(1);
  }
  return 0.0;
}

std::vector<RateVector> rate_vectors_over_windows(
    const std::vector<PrefixCovariance>& windows, int x_roi, int y_roi,
    std::uint8_t tag, const std::vector<MeasureKind>& kinds,
    bool per_sample_normalize, ClampStats* stats) {
  std::vector<RateVector> out;
  out.reserve(kinds.size());
  for (MeasureKind kind : kinds) {
    RateVector v;
    v.measure = kind;
    v.x_roi = x_roi;
    v.y_roi = y_roi;
    v.tag = tag;
    v.values.reserve(windows.size());
    out.push_back(std::move(v));
  }
  for (const PrefixCovariance& pc : windows) {
    PrefixLogDet ld(pc);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      double rate = measure_rate(ld, kinds[k], Direction::XtoY);
      rate = clamp_rate(rate, stats);
      if (per_sample_normalize) rate /= pc.window_length();
      out[k].values.push_back(rate);
    }
  }
  return out;
}

}  // namespace causalflow
