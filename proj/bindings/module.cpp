#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "causalflow/ensemble.hpp"
#include "causalflow/errors.hpp"
#include "causalflow/measures.hpp"
#include "causalflow/oracle.hpp"
#include "causalflow/pipeline.hpp"
#include "causalflow/prefix_covariance.hpp"
#include "causalflow/stats.hpp"
#include "causalflow/synth.hpp"
#include "causalflow/wavelet.hpp"

namespace py = pybind11;
using namespace causalflow;

namespace {

VarLayout make_layout(int n_z) {
  VarLayout layout{{Role::X, 1}, {Role::Y, 2}};
  for (int z = 0; z < n_z; ++z) layout.push_back({Role::Z, 3 + z});
  return layout;
}

Direction direction_from_string(const std::string& name) {
  if (name == "xy" || name == "forward") return Direction::XtoY;
  if (name == "yx" || name == "reverse") return Direction::YtoX;
  throw Error(ErrorKind::Parameter, "bindings", "direction", "direction",
              "expected 'xy' or 'yx', got '" + name + "'");
}

PrefixCovariance pc_from_matrix(const Eigen::MatrixXd& c, int window_length,
                                int n_z, double ridge) {
  return PrefixCovariance(c, make_layout(n_z), window_length, ridge);
}

PrefixCovariance pc_from_sections(const Eigen::MatrixXd& sections,
                                  int window_length, int n_z, double ridge) {
  return estimate_joint_covariance(
      WindowEnsemble(sections, make_layout(n_z), window_length), ridge);
}

JointPmf pmf_from_table(int ax, int ay, int az, int horizon,
                        const std::vector<double>& p) {
  JointPmf pmf;
  pmf.ax = ax;
  pmf.ay = ay;
  pmf.az = az;
  pmf.horizon = horizon;
  pmf.p = p;
  pmf.validate(1e-9);
  return pmf;
}

}  // namespace

PYBIND11_MODULE(_causalflow, m) {
  m.doc() = "causal and directional information flow between grouped channels";

  py::register_exception<Error>(m, "CausalflowError");

  // --- gaussian engine -------------------------------------------------
  py::class_<PrefixCovariance>(m, "PrefixCovariance")
      .def(py::init(&pc_from_matrix), py::arg("matrix"),
           py::arg("window_length"), py::arg("n_z") = 0,
           py::arg("ridge") = 0.0,
           "Joint covariance over (X, Y, Z-block) prefixes; variable v at "
           "time t occupies row t * n_vars + v with order X, Y, Z_1..Z_k.")
      .def_static("from_sections", &pc_from_sections, py::arg("sections"),
                  py::arg("window_length"), py::arg("n_z") = 0,
                  py::arg("ridge") = 1e-9,
                  "Sample covariance of stacked sections [n_sections, "
                  "n_vars * window_length], mean subtracted, ridged.")
      .def_property_readonly("matrix",
                             [](const PrefixCovariance& pc) { return pc.matrix(); })
      .def_property_readonly("window_length", &PrefixCovariance::window_length)
      .def_property_readonly("n_vars", &PrefixCovariance::n_vars)
      .def("submatrix",
           [](const PrefixCovariance& pc, int n_x, int n_y, int n_z) {
             return pc.submatrix({n_x, n_y, n_z});
           },
           py::arg("n_x"), py::arg("n_y"), py::arg("n_z") = 0);

  m.def("log_det_psd", &log_det_psd, py::arg("matrix"));
  m.def("gaussian_entropy", &gaussian_entropy, py::arg("covariance"));

  auto rate = [](double (*fn)(PrefixLogDet&, Direction)) {
    return [fn](const PrefixCovariance& pc, const std::string& direction) {
      PrefixLogDet ld(pc);
      return fn(ld, direction_from_string(direction));
    };
  };
  m.def("cbi_rate",
        [](const PrefixCovariance& pc) {
          PrefixLogDet ld(pc);
          return cbi_rate(ld);
        },
        py::arg("pc"));
  m.def("massey_rate", rate(&massey_rate), py::arg("pc"),
        py::arg("direction") = "xy");
  m.def("kamitake_rate", rate(&kamitake_rate), py::arg("pc"),
        py::arg("direction") = "xy");
  m.def("sum_te_rate", rate(&sum_te_rate), py::arg("pc"),
        py::arg("direction") = "xy");
  m.def("causal_mi_rate",
        [](const PrefixCovariance& pc) {
          PrefixLogDet ld(pc);
          return causal_mi_rate(ld);
        },
        py::arg("pc"));
  m.def("conditional_mi_rate",
        [](const PrefixCovariance& pc) {
          PrefixLogDet ld(pc);
          return conditional_mi_rate(ld);
        },
        py::arg("pc"));
  m.def("measure_rates",
        [](const PrefixCovariance& pc, const std::vector<std::string>& kinds) {
          PrefixLogDet ld(pc);
          py::dict out;
          for (const std::string& kind : kinds) {
            out[py::str(kind)] =
                measure_rate(ld, measure_from_string(kind), Direction::XtoY);
          }
          return out;
        },
        py::arg("pc"),
        py::arg("kinds") = std::vector<std::string>{
            "cbi", "massey_di", "kamitake_di", "sum_te", "causal_mi",
            "conditional_mi"});

  // --- discrete oracle ---------------------------------------------------
  py::class_<JointPmf>(m, "JointPmf")
      .def(py::init(&pmf_from_table), py::arg("ax"), py::arg("ay"),
           py::arg("az"), py::arg("horizon"), py::arg("p"),
           "Dense joint pmf over (x^N, y^N, z^N); axis 3t+v, axis 0 slowest.")
      .def_readonly("ax", &JointPmf::ax)
      .def_readonly("ay", &JointPmf::ay)
      .def_readonly("az", &JointPmf::az)
      .def_readonly("horizon", &JointPmf::horizon)
      .def_readonly("p", &JointPmf::p);

  m.def("build_pmf",
        [](const std::string& spec_json) {
          return build_pmf(channel_spec_from_json_text(spec_json));
        },
        py::arg("channel_spec_json"));
  m.def("oracle_measure",
        [](const JointPmf& pmf, const std::string& kind,
           const std::string& direction, bool conditioned) {
          return oracle_measure(pmf, measure_from_string(kind),
                                direction_from_string(direction), conditioned);
        },
        py::arg("pmf"), py::arg("kind"), py::arg("direction") = "xy",
        py::arg("conditioned") = true);
  m.def("oracle_measure_kl",
        [](const JointPmf& pmf, const std::string& kind,
           const std::string& direction, bool conditioned) {
          return oracle_measure_kl(pmf, measure_from_string(kind),
                                   direction_from_string(direction),
                                   conditioned);
        },
        py::arg("pmf"), py::arg("kind"), py::arg("direction") = "xy",
        py::arg("conditioned") = true);
  m.def("verify_identities",
        [](const JointPmf& pmf) {
          py::dict out;
          for (const IdentityReport::Item& item : verify_identities(pmf).items) {
            out[py::str(item.name)] = item.residual;
          }
          return out;
        },
        py::arg("pmf"));
  m.def("sample_from_pmf", &sample_from_pmf, py::arg("pmf"),
        py::arg("n_samples"), py::arg("seed"));
  m.def("estimate_pmf", &estimate_pmf, py::arg("samples"), py::arg("ax"),
        py::arg("ay"), py::arg("az"), py::arg("horizon"));

  // --- stats ---------------------------------------------------------------
  py::class_<RocCurve>(m, "RocCurve")
      .def_readonly("thresholds", &RocCurve::thresholds)
      .def_readonly("fp", &RocCurve::fp)
      .def_readonly("tp", &RocCurve::tp)
      .def_readonly("theta_trapezoid", &RocCurve::theta_trapezoid)
      .def_readonly("theta_mann_whitney", &RocCurve::theta_mann_whitney);
  py::class_<BootstrapResult>(m, "BootstrapResult")
      .def_readonly("theta_hat", &BootstrapResult::theta_hat)
      .def_readonly("theta_b", &BootstrapResult::theta_b)
      .def_readonly("sigma", &BootstrapResult::sigma)
      .def_readonly("block_len", &BootstrapResult::block_len)
      .def_readonly("n_blocks", &BootstrapResult::n_blocks)
      .def("mean", &BootstrapResult::mean);
  py::class_<SignificanceResult>(m, "SignificanceResult")
      .def_readonly("p_value", &SignificanceResult::p_value)
      .def_readonly("p_empirical", &SignificanceResult::p_empirical)
      .def_readonly("reject", &SignificanceResult::reject);

  m.def("roc_points", &roc_points, py::arg("pos"), py::arg("neg"));
  m.def("auc",
        [](const std::vector<double>& pos, const std::vector<double>& neg) {
          const AucResult r = auc(pos, neg);
          return py::make_tuple(r.trapezoid, r.mann_whitney);
        },
        py::arg("pos"), py::arg("neg"));
  m.def("block_bootstrap", &block_bootstrap, py::arg("pos"), py::arg("neg"),
        py::arg("resamples") = 2000, py::arg("seed") = 2020,
        py::arg("block_len") = 0, py::arg("threads") = 0);
  m.def("significance_test",
        [](const BootstrapResult& boot, double c, double alpha) {
          return significance_test(boot, {c, alpha});
        },
        py::arg("boot"), py::arg("c") = 0.85, py::arg("alpha") = 0.05);
  m.def("normal_cdf", &normal_cdf, py::arg("x"));
  m.def("skewness_kurtosis",
        [](const std::vector<double>& samples) {
          const MomentSummary s = skewness_kurtosis(samples);
          return py::dict(py::arg("mean") = s.mean,
                          py::arg("skewness") = s.skewness,
                          py::arg("kurtosis") = s.kurtosis,
                          py::arg("non_normal") = s.non_normal);
        },
        py::arg("samples"));
  m.def("l1_gaussian_fit",
        [](const std::vector<double>& edges, const std::vector<double>& counts) {
          Histogram hist;
          hist.edges = edges;
          hist.counts = counts;
          const GaussianFit fit = l1_gaussian_fit(hist);
          return py::make_tuple(fit.mu, fit.sigma, fit.objective);
        },
        py::arg("edges"), py::arg("counts"));
  m.def("band_power",
        [](const std::vector<double>& x, double fs, double f_lo, double f_hi) {
          return band_power(x, fs, f_lo, f_hi);
        },
        py::arg("x"), py::arg("sample_rate"), py::arg("f_lo"), py::arg("f_hi"));

  // --- synthetic data --------------------------------------------------------
  m.def("default_synth_config_json",
        []() { return synth_config_to_json_text(default_synth_config()); });
  m.def("generate_trial",
        [](const std::string& activity, int trial_index, std::uint64_t seed,
           const std::string& config_json) {
          const SynthConfig cfg = config_json.empty()
                                      ? default_synth_config()
                                      : synth_config_from_json_text(config_json);
          const SyntheticTrial trial = generate_trial(
              cfg, activity_from_string(activity), trial_index, seed);
          py::dict out;
          out["channels"] = trial.recording.channels;
          out["channel_names"] = trial.recording.channel_names;
          out["sample_rate"] = trial.recording.sample_rate;
          out["tag"] = static_cast<int>(trial.recording.tags.front());
          out["scales"] = trial.scale_draws;
          return out;
        },
        py::arg("activity"), py::arg("trial_index") = 0, py::arg("seed") = 1,
        py::arg("config_json") = "");

  m.attr("__version__") = "0.1.0";
  m.attr("MEASURES") = std::vector<std::string>{
      "cbi", "massey_di", "kamitake_di", "sum_te", "causal_mi",
      "conditional_mi"};
}
