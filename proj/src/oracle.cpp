#include "causalflow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include <json.hpp>

#include "causalflow/errors.hpp"
#include "causalflow/rng.hpp"

namespace causalflow {

long JointPmf::table_size() const {
  long size = 1;
  for (int a = 0; a < n_axes(); ++a) size *= axis_card(a);
  return size;
}

void JointPmf::validate(double tol) const {
  if (ax < 1 || ay < 1 || az < 1 || horizon < 1) {
    throw Error(ErrorKind::Parameter, "discrete-oracle", "JointPmf",
                "alphabet", "alphabets and horizon must be >= 1");
  }
  if (static_cast<long>(p.size()) != table_size()) {
    throw Error(ErrorKind::Data, "discrete-oracle", "JointPmf", "p",
                "table has " + std::to_string(p.size()) + " entries, expected " +
                    std::to_string(table_size()));
  }
  double sum = 0.0;
  for (double v : p) {
    if (v < -tol || !std::isfinite(v)) {
      throw Error(ErrorKind::Data, "discrete-oracle", "JointPmf", "p",
                  "probabilities must be finite and non-negative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw Error(ErrorKind::Data, "discrete-oracle", "JointPmf", "p",
                "probabilities sum to " + std::to_string(sum));
  }
}

namespace {

// ---------------------------------------------------------------------------
// marginal tables over prefix-shaped axis subsets

struct Marginal {
  std::vector<int> axes;     // ascending
  std::vector<int> card;     // per axis
  std::vector<long> stride;  // row-major strides
  std::vector<double> p;

  long size() const { return static_cast<long>(p.size()); }
};

// {X_1..X_a} u {Y_1..Y_b} u {Z_1..Z_c} as ascending axis ids.
std::vector<int> prefix_axes(int a, int b, int c) {
  std::vector<int> axes;
  const int t_max = std::max(a, std::max(b, c));
  for (int t = 0; t < t_max; ++t) {
    if (t < a) axes.push_back(3 * t + 0);
    if (t < b) axes.push_back(3 * t + 1);
    if (t < c) axes.push_back(3 * t + 2);
  }
  return axes;
}

Marginal marginalize(const JointPmf& pmf, const std::vector<int>& axes) {
  Marginal m;
  m.axes = axes;
  m.card.reserve(axes.size());
  long size = 1;
  for (int a : axes) {
    m.card.push_back(pmf.axis_card(a));
    size *= pmf.axis_card(a);
  }
  m.stride.assign(axes.size(), 1);
  for (int i = static_cast<int>(axes.size()) - 2; i >= 0; --i) {
    m.stride[static_cast<std::size_t>(i)] =
        m.stride[static_cast<std::size_t>(i + 1)] *
        m.card[static_cast<std::size_t>(i + 1)];
  }
  m.p.assign(static_cast<std::size_t>(size), 0.0);

  const int n_axes = pmf.n_axes();
  std::vector<int> digits(static_cast<std::size_t>(n_axes), 0);
  const long full = pmf.table_size();
  for (long idx = 0; idx < full; ++idx) {
    const double v = pmf.p[static_cast<std::size_t>(idx)];
    if (v != 0.0) {
      long sub = 0;
      for (std::size_t i = 0; i < axes.size(); ++i) {
        sub += m.stride[i] * digits[static_cast<std::size_t>(axes[i])];
      }
      m.p[static_cast<std::size_t>(sub)] += v;
    }
    for (int a = n_axes - 1; a >= 0; --a) {
      if (++digits[static_cast<std::size_t>(a)] < pmf.axis_card(a)) break;
      digits[static_cast<std::size_t>(a)] = 0;
    }
  }
  return m;
}

double table_entropy(const Marginal& m) {
  double h = 0.0;
  for (double v : m.p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

// Memoized prefix-subset entropies and marginals of one pmf.
class PmfEval {
 public:
  explicit PmfEval(const JointPmf& pmf) : pmf_(&pmf) {}

  int horizon() const { return pmf_->horizon; }

  double entropy(int a, int b, int c) {
    const long key = this->key(a, b, c);
    auto it = entropies_.find(key);
    if (it != entropies_.end()) return it->second;
    const double h = table_entropy(marginal(a, b, c));
    entropies_.emplace(key, h);
    return h;
  }

  const Marginal& marginal(int a, int b, int c) {
    const long key = this->key(a, b, c);
    auto it = marginals_.find(key);
    if (it != marginals_.end()) return it->second;
    return marginals_.emplace(key, marginalize(*pmf_, prefix_axes(a, b, c)))
        .first->second;
  }

 private:
  long key(int a, int b, int c) const {
    const long n = pmf_->horizon + 1;
    return (static_cast<long>(a) * n + b) * n + c;
  }

  const JointPmf* pmf_;
  std::map<long, double> entropies_;
  std::map<long, Marginal> marginals_;
};

// Direction-aware prefix triples: first count follows the source process.
struct DirectedCounts {
  bool swapped;
  int a(int n_src, int n_dst) const { return swapped ? n_dst : n_src; }
  int b(int n_src, int n_dst) const { return swapped ? n_src : n_dst; }
};

struct Term {
  // conditional ratio p(S_num | S_num_hist) in the numerator and a product of
  // conditional ratios in the denominator; all subsets of the top one.
  int num[3];
  int num_hist[3];
  std::vector<std::array<int, 6>> den;  // {a,b,c, ah,bh,ch}
};

// Per-step entropy-sum evaluation: I(A;B|C) pieces assembled from prefix
// entropies, mirroring Eqs. of the measure definitions.
double entropy_form(PmfEval& ev, MeasureKind kind, Direction dir,
                    bool conditioned) {
  const DirectedCounts d{dir == Direction::YtoX};
  const int n_w = ev.horizon();
  auto h = [&](int n_src, int n_dst, int n_z) {
    return ev.entropy(d.a(n_src, n_dst), d.b(n_src, n_dst),
                      conditioned ? n_z : 0);
  };
  double sum = 0.0;
  switch (kind) {
    case MeasureKind::MasseyDi:
      for (int n = 1; n <= n_w; ++n) {
        sum += h(n, n - 1, n - 1) + h(0, n, n - 1) - h(0, n - 1, n - 1) -
               h(n, n, n - 1);
      }
      return sum;
    case MeasureKind::SumTransferEntropy:
      for (int n = 1; n <= n_w; ++n) {
        sum += h(n - 1, n - 1, n - 1) + h(0, n, n - 1) - h(0, n - 1, n - 1) -
               h(n - 1, n, n - 1);
      }
      return sum;
    case MeasureKind::KamitakeDi:
      for (int n = 1; n <= n_w; ++n) {
        sum += h(n, n, n - 1) + h(n - 1, n_w, n - 1) - h(n - 1, n, n - 1) -
               h(n, n_w, n - 1);
      }
      return sum;
    case MeasureKind::CausalMi:
      for (int n = 1; n <= n_w; ++n) {
        sum += h(n_w, n - 1, n - 1) + h(0, n, n - 1) - h(0, n - 1, n - 1) -
               h(n_w, n, n - 1);
      }
      return sum;
    case MeasureKind::Cbi:
      // H(X^N||Z^{N-1}) + H(Y^N||Z^{N-1}) - H(X^N Y^N||Z^{N-1})
      for (int n = 1; n <= n_w; ++n) {
        sum += (h(n, 0, n - 1) - h(n - 1, 0, n - 1)) +
               (h(0, n, n - 1) - h(0, n - 1, n - 1)) -
               (h(n, n, n - 1) - h(n - 1, n - 1, n - 1));
      }
      return sum;
    case MeasureKind::ConditionalMi:
      return h(n_w, 0, n_w - 1) + h(0, n_w, n_w - 1) - h(0, 0, n_w - 1) -
             h(n_w, n_w, n_w - 1);
  }
  throw Error(ErrorKind::Parameter, "discrete-oracle", "oracle_measure",
              "kind", "unknown measure kind");
}

double kl_term(PmfEval& ev, const Term& term) {
  const Marginal& top = ev.marginal(term.num[0], term.num[1], term.num[2]);

  // position of each sub-subset's axes inside the top subset
  auto positions = [&](const std::vector<int>& axes) {
    std::vector<int> pos(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const auto it =
          std::lower_bound(top.axes.begin(), top.axes.end(), axes[i]);
      pos[i] = static_cast<int>(it - top.axes.begin());
    }
    return pos;
  };

  struct Sub {
    const Marginal* m;
    std::vector<int> pos;
    double sign;
  };
  std::vector<Sub> subs;
  auto add = [&](int a, int b, int c, double sign) {
    const Marginal& m = ev.marginal(a, b, c);
    subs.push_back({&m, positions(m.axes), sign});
  };
  add(term.num_hist[0], term.num_hist[1], term.num_hist[2], -1.0);
  for (const auto& den : term.den) {
    add(den[0], den[1], den[2], -1.0);
    add(den[3], den[4], den[5], +1.0);
  }

  std::vector<int> digits(top.axes.size(), 0);
  double sum = 0.0;
  for (long idx = 0; idx < top.size(); ++idx) {
    const double pt = top.p[static_cast<std::size_t>(idx)];
    if (pt > 0.0) {
      double log_ratio = std::log(pt);
      for (const Sub& sub : subs) {
        long flat = 0;
        for (std::size_t i = 0; i < sub.pos.size(); ++i) {
          flat += sub.m->stride[i] *
                  digits[static_cast<std::size_t>(sub.pos[i])];
        }
        log_ratio += sub.sign * std::log(sub.m->p[static_cast<std::size_t>(flat)]);
      }
      sum += pt * log_ratio;
    }
    for (int a = static_cast<int>(top.axes.size()) - 1; a >= 0; --a) {
      if (++digits[static_cast<std::size_t>(a)] <
          top.card[static_cast<std::size_t>(a)]) {
        break;
      }
      digits[static_cast<std::size_t>(a)] = 0;
    }
  }
  return sum;
}

double kl_form(PmfEval& ev, MeasureKind kind, Direction dir, bool conditioned) {
  const DirectedCounts d{dir == Direction::YtoX};
  const int n_w = ev.horizon();
  auto t3 = [&](int n_src, int n_dst, int n_z) {
    return std::array<int, 3>{d.a(n_src, n_dst), d.b(n_src, n_dst),
                              conditioned ? n_z : 0};
  };
  auto make = [&](std::array<int, 3> num, std::array<int, 3> num_hist,
                  std::vector<std::array<std::array<int, 3>, 2>> dens) {
    Term term;
    std::copy(num.begin(), num.end(), term.num);
    std::copy(num_hist.begin(), num_hist.end(), term.num_hist);
    for (const auto& den : dens) {
      term.den.push_back({den[0][0], den[0][1], den[0][2], den[1][0],
                          den[1][1], den[1][2]});
    }
    return term;
  };

  double sum = 0.0;
  switch (kind) {
    case MeasureKind::MasseyDi:
      // E[log p(y_n | x^n y^{n-1} z^{n-1}) / p(y_n | y^{n-1} z^{n-1})]
      for (int n = 1; n <= n_w; ++n) {
        sum += kl_term(ev, make(t3(n, n, n - 1), t3(n, n - 1, n - 1),
                                {{t3(0, n, n - 1), t3(0, n - 1, n - 1)}}));
      }
      return sum;
    case MeasureKind::SumTransferEntropy:
      for (int n = 1; n <= n_w; ++n) {
        sum += kl_term(ev, make(t3(n - 1, n, n - 1), t3(n - 1, n - 1, n - 1),
                                {{t3(0, n, n - 1), t3(0, n - 1, n - 1)}}));
      }
      return sum;
    case MeasureKind::KamitakeDi:
      // E[log p(y^N_{n+1} | x^n y^n z^{n-1}) / p(y^N_{n+1} | x^{n-1} y^n z^{n-1})]
      for (int n = 1; n <= n_w; ++n) {
        sum += kl_term(ev, make(t3(n, n_w, n - 1), t3(n, n, n - 1),
                                {{t3(n - 1, n_w, n - 1), t3(n - 1, n, n - 1)}}));
      }
      return sum;
    case MeasureKind::CausalMi:
      for (int n = 1; n <= n_w; ++n) {
        sum += kl_term(ev, make(t3(n_w, n, n - 1), t3(n_w, n - 1, n - 1),
                                {{t3(0, n, n - 1), t3(0, n - 1, n - 1)}}));
      }
      return sum;
    case MeasureKind::Cbi:
      // E[log p(x_n y_n | hist) / (p(x_n | x^{n-1} z^{n-1}) p(y_n | y^{n-1} z^{n-1}))]
      for (int n = 1; n <= n_w; ++n) {
        sum += kl_term(ev, make(t3(n, n, n - 1), t3(n - 1, n - 1, n - 1),
                                {{t3(n, 0, n - 1), t3(n - 1, 0, n - 1)},
                                 {t3(0, n, n - 1), t3(0, n - 1, n - 1)}}));
      }
      return sum;
    case MeasureKind::ConditionalMi:
      return kl_term(ev, make(t3(n_w, n_w, n_w - 1), t3(0, 0, n_w - 1),
                              {{t3(n_w, 0, n_w - 1), t3(0, 0, n_w - 1)},
                               {t3(0, n_w, n_w - 1), t3(0, 0, n_w - 1)}}));
  }
  throw Error(ErrorKind::Parameter, "discrete-oracle", "oracle_measure_kl",
              "kind", "unknown measure kind");
}

}  // namespace

double oracle_measure(const JointPmf& pmf, MeasureKind kind, Direction dir,
                      bool conditioned) {
  pmf.validate();
  PmfEval ev(pmf);
  return entropy_form(ev, kind, dir, conditioned);
}

double oracle_measure_kl(const JointPmf& pmf, MeasureKind kind, Direction dir,
                         bool conditioned) {
  pmf.validate();
  PmfEval ev(pmf);
  return kl_form(ev, kind, dir, conditioned);
}

double oracle_instantaneous_mi(const JointPmf& pmf, bool conditioned) {
  pmf.validate();
  PmfEval ev(pmf);
  auto h = [&](int a, int b, int c) {
    return ev.entropy(a, b, conditioned ? c : 0);
  };
  double sum = 0.0;
  for (int n = 1; n <= pmf.horizon; ++n) {
    sum += h(n, n - 1, n - 1) + h(n - 1, n, n - 1) - h(n - 1, n - 1, n - 1) -
           h(n, n, n - 1);
  }
  return sum;
}

double IdentityReport::max_residual() const {
  double max = 0.0;
  for (const Item& item : items) max = std::max(max, item.residual);
  return max;
}

IdentityReport verify_identities(const JointPmf& pmf) {
  pmf.validate();
  PmfEval ev(pmf);

  auto ent = [&](MeasureKind kind, Direction dir) {
    return entropy_form(ev, kind, dir, true);
  };
  auto kl = [&](MeasureKind kind, Direction dir) {
    return kl_form(ev, kind, dir, true);
  };

  const double di1_xy = ent(MeasureKind::MasseyDi, Direction::XtoY);
  const double di1_yx = ent(MeasureKind::MasseyDi, Direction::YtoX);
  const double di2_xy = ent(MeasureKind::KamitakeDi, Direction::XtoY);
  const double di2_yx = ent(MeasureKind::KamitakeDi, Direction::YtoX);
  const double te_xy = ent(MeasureKind::SumTransferEntropy, Direction::XtoY);
  const double te_yx = ent(MeasureKind::SumTransferEntropy, Direction::YtoX);
  const double cmi_xy = ent(MeasureKind::CausalMi, Direction::XtoY);
  const double cmi_yx = ent(MeasureKind::CausalMi, Direction::YtoX);
  const double cbi = ent(MeasureKind::Cbi, Direction::XtoY);
  const double inst = oracle_instantaneous_mi(pmf);

  IdentityReport report;
  auto add = [&](const std::string& name, double lhs, double rhs) {
    report.items.push_back({name, std::abs(lhs - rhs)});
  };

  add("prop2_massey_kamitake", di2_yx + di1_xy, di2_xy + di1_yx);
  add("prop3_massey_te_decomposition", di1_xy, te_xy + inst);
  add("prop4_cbi_decomposition", cbi, di1_xy + te_yx);
  add("corollary1_causal_mi", cmi_xy, di1_xy + di2_yx);
  add("corollary1_dual_expansion", cmi_xy, cmi_yx);
  add("corollary2_cbi_symmetry", di1_xy + te_yx, di1_yx + te_xy);
  add("eq38_modified_di_equals_sum_te",
      kl(MeasureKind::SumTransferEntropy, Direction::XtoY), te_xy);

  for (MeasureKind kind : all_measures()) {
    add(std::string("form_equiv_") + to_string(kind),
        ent(kind, Direction::XtoY), kl(kind, Direction::XtoY));
  }
  return report;
}

// ---------------------------------------------------------------------------
// channel specs

namespace {

int node_slot(const std::string& name) {
  if (name == "X") return 0;
  if (name == "Y") return 1;
  if (name == "Z") return 2;
  throw Error(ErrorKind::Config, "discrete-oracle", "build_pmf", "node",
              "unknown node '" + name + "', expected X, Y or Z");
}

}  // namespace

JointPmf build_pmf(const ChannelSpec& spec) {
  if (spec.horizon < 1) {
    throw Error(ErrorKind::Parameter, "discrete-oracle", "build_pmf",
                "horizon", "horizon must be >= 1");
  }

  // slot order X, Y, Z; missing nodes become constant single-symbol processes
  NodeSpec defaults[3];
  for (int v = 0; v < 3; ++v) {
    defaults[v].name = v == 0 ? "X" : (v == 1 ? "Y" : "Z");
    defaults[v].alphabet = 1;
    defaults[v].kernel = {{1.0}};
  }
  bool seen[3] = {false, false, false};
  for (const NodeSpec& node : spec.nodes) {
    const int v = node_slot(node.name);
    if (seen[v]) {
      throw Error(ErrorKind::Config, "discrete-oracle", "build_pmf", "node",
                  "node '" + node.name + "' specified twice");
    }
    seen[v] = true;
    defaults[v] = node;
  }

  // validate kernels and the within-step dependency graph
  bool same_step_edge[3][3] = {};
  for (int v = 0; v < 3; ++v) {
    const NodeSpec& node = defaults[v];
    if (node.alphabet < 1) {
      throw Error(ErrorKind::Config, "discrete-oracle", "build_pmf",
                  "alphabet", "alphabet of " + node.name + " must be >= 1");
    }
    long rows = 1;
    for (const KernelParent& parent : node.parents) {
      if (parent.delay < 0) {
        throw Error(ErrorKind::Config, "discrete-oracle", "build_pmf", "delay",
                    "negative delay on parent of " + node.name);
      }
      const int pv = node_slot(parent.node);
      if (parent.delay == 0) {
        if (pv == v) {
          throw Error(ErrorKind::Config, "discrete-oracle", "build_pmf",
                      "delay", node.name + " cannot depend on itself at delay 0");
        }
        same_step_edge[pv][v] = true;
      }
      rows *= defaults[pv].alphabet;
    }
    if (static_cast<long>(node.kernel.size()) != rows) {
      throw Error(ErrorKind::Config, "discrete-oracle", "build_pmf", "kernel",
                  node.name + " kernel has " + std::to_string(node.kernel.size()) +
                      " rows, expected " + std::to_string(rows));
    }
    for (const std::vector<double>& row : node.kernel) {
      if (static_cast<int>(row.size()) != node.alphabet) {
        throw Error(ErrorKind::Config, "discrete-oracle", "build_pmf",
                    "kernel", node.name + " kernel row width mismatch");
      }
      double sum = 0.0;
      for (double x : row) {
        if (x < 0.0) {
          throw Error(ErrorKind::Config, "discrete-oracle", "build_pmf",
                      "kernel", node.name + " kernel has negative entries");
        }
        sum += x;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorKind::Config, "discrete-oracle", "build_pmf",
                    "kernel", node.name + " kernel row sums to " +
                                  std::to_string(sum));
      }
    }
  }
  // acyclicity within a time step (3 nodes: check for any 2-cycle / 3-cycle)
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a != b && same_step_edge[a][b] && same_step_edge[b][a]) {
        throw Error(ErrorKind::Config, "discrete-oracle", "build_pmf",
                    "parents", "same-step dependency cycle");
      }
    }
  }
  if (same_step_edge[0][1] && same_step_edge[1][2] && same_step_edge[2][0]) {
    throw Error(ErrorKind::Config, "discrete-oracle", "build_pmf", "parents",
                "same-step dependency cycle");
  }
  if (same_step_edge[1][0] && same_step_edge[0][2] && same_step_edge[2][1]) {
    throw Error(ErrorKind::Config, "discrete-oracle", "build_pmf", "parents",
                "same-step dependency cycle");
  }

  JointPmf pmf;
  pmf.ax = defaults[0].alphabet;
  pmf.ay = defaults[1].alphabet;
  pmf.az = defaults[2].alphabet;
  pmf.horizon = spec.horizon;
  const long size = pmf.table_size();
  if (size > spec.max_table) {
    throw Error(ErrorKind::Capacity, "discrete-oracle", "build_pmf",
                "max_table", "table size " + std::to_string(size) +
                                 " exceeds bound " +
                                 std::to_string(spec.max_table));
  }
  pmf.p.assign(static_cast<std::size_t>(size), 0.0);

  const int n_axes = pmf.n_axes();
  std::vector<int> digits(static_cast<std::size_t>(n_axes), 0);
  for (long idx = 0; idx < size; ++idx) {
    double prob = 1.0;
    for (int t = 0; t < pmf.horizon && prob > 0.0; ++t) {
      for (int v = 0; v < 3 && prob > 0.0; ++v) {
        const NodeSpec& node = defaults[v];
        long row = 0;
        for (const KernelParent& parent : node.parents) {
          const int pv = node_slot(parent.node);
          const int pt = t - parent.delay;
          const int symbol =
              pt < 0 ? 0 : digits[static_cast<std::size_t>(3 * pt + pv)];
          row = row * defaults[pv].alphabet + symbol;
        }
        prob *= node.kernel[static_cast<std::size_t>(row)]
                           [static_cast<std::size_t>(
                               digits[static_cast<std::size_t>(3 * t + v)])];
      }
    }
    pmf.p[static_cast<std::size_t>(idx)] = prob;
    for (int a = n_axes - 1; a >= 0; --a) {
      if (++digits[static_cast<std::size_t>(a)] < pmf.axis_card(a)) break;
      digits[static_cast<std::size_t>(a)] = 0;
    }
  }
  pmf.validate(1e-9);
  return pmf;
}

ChannelSpec channel_spec_from_json_text(const std::string& text) {
  ChannelSpec spec;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    spec.horizon = j.at("horizon");
    spec.max_table = j.value("max_table", JointPmf::kDefaultMaxTable);
    for (const nlohmann::json& jn : j.at("nodes")) {
      NodeSpec node;
      node.name = jn.at("name");
      node.alphabet = jn.at("alphabet");
      if (jn.contains("parents")) {
        for (const nlohmann::json& jp : jn["parents"]) {
          node.parents.push_back(
              {jp.at("node").get<std::string>(), jp.at("delay").get<int>()});
        }
      }
      node.kernel = jn.at("kernel").get<std::vector<std::vector<double>>>();
      spec.nodes.push_back(std::move(node));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, "discrete-oracle", "channel_spec", "json",
                e.what());
  }
  return spec;
}

std::string channel_spec_to_json_text(const ChannelSpec& spec) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const NodeSpec& node : spec.nodes) {
    nlohmann::json parents = nlohmann::json::array();
    for (const KernelParent& parent : node.parents) {
      parents.push_back({{"node", parent.node}, {"delay", parent.delay}});
    }
    nodes.push_back({{"name", node.name},
                     {"alphabet", node.alphabet},
                     {"parents", parents},
                     {"kernel", node.kernel}});
  }
  return nlohmann::json{{"horizon", spec.horizon},
                        {"max_table", spec.max_table},
                        {"nodes", nodes}}
      .dump(2);
}

Eigen::MatrixXi sample_from_pmf(const JointPmf& pmf, long n_samples,
                                std::uint64_t seed) {
  pmf.validate();
  if (n_samples <= 0) {
    throw Error(ErrorKind::Parameter, "discrete-oracle", "sample_from_pmf",
                "n_samples", "need at least one sample");
  }
  std::vector<double> cdf(pmf.p.size());
  std::partial_sum(pmf.p.begin(), pmf.p.end(), cdf.begin());
  cdf.back() = 1.0;

  Rng rng(seed);
  const int n_axes = pmf.n_axes();
  Eigen::MatrixXi samples(n_samples, n_axes);
  for (long s = 0; s < n_samples; ++s) {
    const double u = rng.uniform();
    long idx = static_cast<long>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (idx >= static_cast<long>(cdf.size())) idx = static_cast<long>(cdf.size()) - 1;
    for (int a = n_axes - 1; a >= 0; --a) {
      const int card = pmf.axis_card(a);
      samples(s, a) = static_cast<int>(idx % card);
      idx /= card;
    }
  }
  return samples;
}

JointPmf estimate_pmf(const Eigen::MatrixXi& samples, int ax, int ay, int az,
                      int horizon) {
  JointPmf pmf;
  pmf.ax = ax;
  pmf.ay = ay;
  pmf.az = az;
  pmf.horizon = horizon;
  if (samples.rows() == 0) {
    throw Error(ErrorKind::Data, "discrete-oracle", "estimate_pmf", "samples",
                "empty sample set");
  }
  if (samples.cols() != pmf.n_axes()) {
    throw Error(ErrorKind::Data, "discrete-oracle", "estimate_pmf", "samples",
                "sample width does not match 3 * horizon");
  }
  std::vector<long> counts(static_cast<std::size_t>(pmf.table_size()), 0);
  for (Eigen::Index s = 0; s < samples.rows(); ++s) {
    long idx = 0;
    for (int a = 0; a < pmf.n_axes(); ++a) {
      const int card = pmf.axis_card(a);
      const int digit = samples(s, a);
      if (digit < 0 || digit >= card) {
        throw Error(ErrorKind::Data, "discrete-oracle", "estimate_pmf",
                    "samples", "symbol out of range");
      }
      idx = idx * card + digit;
    }
    ++counts[static_cast<std::size_t>(idx)];
  }
  pmf.p.resize(counts.size());
  const double n = static_cast<double>(samples.rows());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    pmf.p[i] = static_cast<double>(counts[i]) / n;
  }
  return pmf;
}

}  // namespace causalflow
