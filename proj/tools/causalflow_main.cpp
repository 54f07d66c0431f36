#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "causalflow/ensemble.hpp"
#include "causalflow/errors.hpp"
#include "causalflow/io.hpp"
#include "causalflow/measures.hpp"
#include "causalflow/oracle.hpp"
#include "causalflow/pipeline.hpp"
#include "causalflow/rng.hpp"
#include "causalflow/stats.hpp"
#include "causalflow/synth.hpp"

namespace fs = std::filesystem;
using namespace causalflow;

namespace {

constexpr const char* kVersion = "0.1.0";

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Parameter: return 2;
    case ErrorKind::Data:
    case ErrorKind::Io: return 3;
    case ErrorKind::Numeric:
    case ErrorKind::Estimation:
    case ErrorKind::Fit: return 4;
    case ErrorKind::Capacity: return 5;
  }
  return 1;
}

struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> pairs;
  std::string mode;
  std::string measures;
  bool no_conditioning = false;
  bool bits = false;
  bool normalize = false;
  int window = 0;
  int overlap = -1;
  double ridge = -1.0;
  long section_cap = -1;
  int positive_tag = -1;
  int negative_tag = -1;
  double span_ms = -2.0;
  double c = -1.0;
  double alpha = -1.0;
  int resamples = 0;
  std::uint64_t bootstrap_seed = 0;
  bool bootstrap_seed_set = false;
  int threads = -1;
  double csv_sample_rate = 0.0;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_path, "pipeline config JSON");
  cmd->add_option("--mode", flags.mode,
                  "analysis mode: pooled-windows | per-trial");
  cmd->add_option("--measures", flags.measures,
                  "comma-separated measure list (cbi,massey_di,kamitake_di,"
                  "sum_te,causal_mi,conditional_mi)");
  cmd->add_flag("--no-conditioning", flags.no_conditioning,
                "drop the Z role (unconditioned measures)");
  cmd->add_flag("--bits", flags.bits, "report rates in bits");
  cmd->add_flag("--normalize", flags.normalize, "divide rates by N");
  cmd->add_option("--window", flags.window, "window length N in samples");
  cmd->add_option("--overlap", flags.overlap, "edge overlap in samples");
  cmd->add_option("--ridge", flags.ridge, "relative diagonal ridge");
  cmd->add_option("--section-cap", flags.section_cap,
                  "max pooled sections (0 = unlimited)");
  cmd->add_option("--positive-tag", flags.positive_tag,
                  "tag of the positive class");
  cmd->add_option("--negative-tag", flags.negative_tag,
                  "tag of the negative class");
  cmd->add_option("--span", flags.span_ms,
                  "ROC analysis span after tag onset, ms (<= 0: all windows)");
  cmd->add_option("--c", flags.c, "AUC cutoff of the null hypothesis");
  cmd->add_option("--alpha", flags.alpha, "significance threshold");
  cmd->add_option("--resamples", flags.resamples, "bootstrap resamples B");
  cmd->add_option("--bootstrap-seed", flags.bootstrap_seed, "bootstrap seed")
      ->each([&flags](const std::string&) { flags.bootstrap_seed_set = true; });
  cmd->add_option("--threads", flags.threads,
                  "worker threads (0 = hardware, capped by CAUSALFLOW_THREADS)");
  cmd->add_option("--csv-sample-rate", flags.csv_sample_rate,
                  "sample rate for CSV trial input");
}

PipelineConfig resolve_config(const ConfigFlags& flags) {
  PipelineConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = pipeline_config_from_json_text(read_text_file(flags.config_path));
  }
  if (!flags.mode.empty()) {
    if (flags.mode == "pooled-windows") {
      cfg.mode = AnalysisMode::PooledWindows;
    } else if (flags.mode == "per-trial") {
      cfg.mode = AnalysisMode::PerTrial;
    } else {
      throw Error(ErrorKind::Config, "cli-pipeline", "resolve_config", "mode",
                  "unknown mode '" + flags.mode + "'");
    }
  }
  if (!flags.measures.empty()) {
    cfg.measures.clear();
    std::string token;
    for (char ch : flags.measures + ",") {
      if (ch == ',') {
        if (!token.empty()) cfg.measures.push_back(measure_from_string(token));
        token.clear();
      } else {
        token.push_back(ch);
      }
    }
  }
  if (flags.no_conditioning) cfg.condition_on_others = false;
  if (flags.bits) cfg.bits = true;
  if (flags.normalize) cfg.per_sample_normalize = true;
  if (flags.window > 0) cfg.window_length = flags.window;
  if (flags.overlap >= 0) cfg.edge_overlap = flags.overlap;
  if (flags.ridge >= 0.0) cfg.ridge = flags.ridge;
  if (flags.section_cap >= 0) cfg.section_cap = flags.section_cap;
  if (flags.positive_tag >= 0) cfg.positive_tag = static_cast<std::uint8_t>(flags.positive_tag);
  if (flags.negative_tag >= 0) cfg.negative_tag = static_cast<std::uint8_t>(flags.negative_tag);
  if (flags.span_ms > -2.0) cfg.analysis_span_ms = flags.span_ms;
  if (flags.c > 0.0) cfg.significance.c = flags.c;
  if (flags.alpha > 0.0) cfg.significance.alpha = flags.alpha;
  if (flags.resamples > 0) cfg.bootstrap_resamples = flags.resamples;
  if (flags.bootstrap_seed_set) cfg.bootstrap_seed = flags.bootstrap_seed;
  if (flags.threads >= 0) cfg.threads = flags.threads;
  if (flags.csv_sample_rate > 0.0) cfg.csv_sample_rate = flags.csv_sample_rate;
  cfg.validate();
  return cfg;
}

std::vector<std::pair<int, int>> parse_pairs(
    const std::vector<std::string>& pairs) {
  std::vector<std::pair<int, int>> out;
  for (const std::string& text : pairs) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::Config, "cli-pipeline", "parse_pairs", "pair",
                  "expected SRC:DST, got '" + text + "'");
    }
    out.emplace_back(std::stoi(text.substr(0, colon)),
                     std::stoi(text.substr(colon + 1)));
  }
  return out;
}

std::string trial_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "trial_%04d.cfl", index);
  return buf;
}

// --- synth -----------------------------------------------------------------

int cmd_synth(const std::string& out_dir, const std::string& synth_config_path,
              const std::string& model, const std::string& activity_arg,
              int n_trials, long n_samples, std::uint64_t seed, double noise,
              int lag, const std::string& wavelet, int threads) {
  fs::create_directories(out_dir);
  DatasetManifest manifest;
  manifest.seed = seed;

  if (model == "linear-relay") {
    for (int t = 0; t < n_trials; ++t) {
      const TrialRecording trial = generate_relay_trial(
          n_samples > 0 ? n_samples : 4000, 250.0,
          Rng::derive(seed, static_cast<std::uint64_t>(t)).next(), 1);
      const std::string name = trial_file_name(t);
      write_trial_binary((fs::path(out_dir) / name).string(), trial);
      manifest.files.push_back(name);
      if (t == 0) {
        manifest.channels = trial.channel_names;
        manifest.sample_rate = trial.sample_rate;
      }
    }
    manifest.generator = "linear-relay";
    manifest.config_hash = config_hash("linear-relay:" + std::to_string(seed) +
                                       ":" + std::to_string(n_samples));
  } else if (model == "eeg") {
    SynthConfig cfg = synth_config_path.empty()
                          ? default_synth_config()
                          : synth_config_from_json_text(
                                read_text_file(synth_config_path));
    if (n_samples > 0) cfg.n_samples = n_samples;
    if (noise >= 0.0) cfg.sensor_noise = noise;
    if (lag >= 0) cfg.source_sink_lag = lag;
    if (!wavelet.empty()) cfg.wavelet = wavelet;
    cfg.validate();

    std::vector<Activity> activities;
    if (activity_arg == "both") {
      activities = {Activity::High, Activity::Low};
    } else {
      activities = {activity_from_string(activity_arg)};
    }
    int file_index = 0;
    for (Activity activity : activities) {
      const std::vector<SyntheticTrial> trials =
          generate_dataset(cfg, activity, n_trials, seed, threads);
      for (const SyntheticTrial& trial : trials) {
        const std::string name = trial_file_name(file_index++);
        write_trial_binary((fs::path(out_dir) / name).string(),
                           trial.recording);
        manifest.files.push_back(name);
      }
    }
    for (const Electrode& e : cfg.layout.electrodes) {
      manifest.channels.push_back(e.name);
    }
    manifest.sample_rate = cfg.sample_rate;
    manifest.generator = "synth-eeg";
    manifest.synth_config_json = synth_config_to_json_text(cfg);
    manifest.config_hash = config_hash(manifest.synth_config_json + ":" +
                                       std::to_string(seed) + ":" +
                                       std::to_string(n_trials) + ":" +
                                       activity_arg);
  } else {
    throw Error(ErrorKind::Config, "cli-pipeline", "cmd_synth", "model",
                "unknown model '" + model + "' (expected eeg or linear-relay)");
  }

  const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
  write_text_file(manifest_path, manifest_to_json_text(manifest));
  std::cout << "wrote " << manifest.files.size() << " trials and "
            << manifest_path << "\n";
  return 0;
}

// --- analyze ----------------------------------------------------------------

int cmd_analyze(const ConfigFlags& flags, const std::string& data_path,
                const std::string& out_dir) {
  const PipelineConfig cfg = resolve_config(flags);
  const std::vector<TrialRecording> trials = load_dataset(data_path, cfg);
  const RateTable table =
      analyze_dataset(cfg, trials, parse_pairs(flags.pairs));

  if (table.rows.empty()) {
    std::cerr << "warning: no windows matched the configuration (window "
                 "longer than every tagged segment?)\n";
  }
  if (table.clamp_total > 0 && table.clamped_fraction() > 0.01) {
    std::cerr << "warning: " << table.clamp_clamped << "/" << table.clamp_total
              << " rates clamped at zero (" << table.clamp_severe
              << " beyond round-off tolerance); consider a larger ridge\n";
  }

  fs::create_directories(out_dir);
  const std::string rates_path = (fs::path(out_dir) / "rates.csv").string();
  write_rate_csv(rates_path, table.rows, cfg.bits);
  write_text_file((fs::path(out_dir) / "analyze_config.json").string(),
                  pipeline_config_to_json_text(cfg));
  std::cout << "wrote " << table.rows.size() << " rate rows to " << rates_path
            << "\n";
  return 0;
}

// --- roc / matrix -----------------------------------------------------------

int cmd_roc(const ConfigFlags& flags, const std::vector<std::string>& rate_paths,
            const std::string& out_dir) {
  const PipelineConfig cfg = resolve_config(flags);
  RateTable table;
  for (const std::string& path : rate_paths) {
    const std::vector<RateRow> rows = read_rate_csv(path);
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  }
  const RocOutputs outputs = roc_analysis(cfg, table);

  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "roc.json").string(),
                  roc_outputs_to_json_text(outputs, cfg));
  write_text_file((fs::path(out_dir) / "matrix.json").string(),
                  matrix_to_json_text(outputs, cfg));
  write_text_file((fs::path(out_dir) / "matrix.csv").string(),
                  matrix_to_csv_text(outputs.matrix));

  for (const PairRocOutput& out : outputs.pairs) {
    std::printf("%d->%d %-14s theta=%.4f p=%.3g%s\n", out.source, out.dest,
                to_string(out.measure), out.boot.theta_hat, out.sig.p_value,
                out.sig.reject ? "  [significant]" : "");
  }
  return 0;
}

int cmd_matrix(const std::string& results_path, double c, double alpha,
               const std::string& out_dir) {
  const RocOutputs outputs =
      roc_outputs_from_json_text(read_text_file(results_path));
  PipelineConfig cfg;
  if (c > 0.0) cfg.significance.c = c;
  if (alpha > 0.0) cfg.significance.alpha = alpha;
  const RocOutputs rethresholded = rethreshold(outputs, cfg.significance);
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "matrix.json").string(),
                  matrix_to_json_text(rethresholded, cfg));
  write_text_file((fs::path(out_dir) / "matrix.csv").string(),
                  matrix_to_csv_text(rethresholded.matrix));
  int flagged = 0;
  for (const PairRocOutput& out : rethresholded.pairs) {
    if (out.sig.reject) ++flagged;
  }
  std::cout << flagged << " of " << rethresholded.pairs.size()
            << " pair/measure cells significant at c=" << cfg.significance.c
            << ", alpha=" << cfg.significance.alpha << "\n";
  return 0;
}

// --- diagnose ----------------------------------------------------------------

int cmd_diagnose(const ConfigFlags& flags, const std::string& data_path,
                 int bins, const std::string& out_dir) {
  const PipelineConfig cfg = resolve_config(flags);
  const std::vector<TrialRecording> trials = load_dataset(data_path, cfg);
  const DiagnoseReport report = diagnose_dataset(cfg, trials, bins);
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "diagnose.json").string(),
                  diagnose_to_json_text(report));
  std::printf("%-4s %-4s %12s %10s %10s %8s %10s %10s\n", "roi", "tag", "mean",
              "skewness", "kurtosis", "normal", "fit_mu", "fit_sigma");
  for (const DiagnoseEntry& entry : report.entries) {
    if (entry.fit_ok) {
      std::printf("%-4d %-4d %12.4g %10.4f %10.4f %8s %10.4g %10.4g\n",
                  entry.roi, entry.tag, entry.moments.mean,
                  entry.moments.skewness, entry.moments.kurtosis,
                  entry.moments.non_normal ? "no" : "yes", entry.fit.mu,
                  entry.fit.sigma);
    } else {
      std::printf("%-4d %-4d  fit error: %s\n", entry.roi, entry.tag,
                  entry.fit_error.c_str());
    }
  }
  return 0;
}

// --- verify ------------------------------------------------------------------

int cmd_verify(int n_pmfs, std::uint64_t seed, const std::string& spec_path,
               const std::string& out_path) {
  std::map<std::string, double> max_residual;
  Rng rng(seed);
  for (int i = 0; i < n_pmfs; ++i) {
    JointPmf pmf;
    pmf.ax = 2 + static_cast<int>(rng.below(2));
    pmf.ay = 2 + static_cast<int>(rng.below(2));
    // half the population carries an interacting side process
    pmf.az = (i % 2 == 0) ? 1 : 2;
    pmf.horizon = 1 + static_cast<int>(rng.below(3));
    pmf.p.resize(static_cast<std::size_t>(pmf.table_size()));
    double total = 0.0;
    for (double& v : pmf.p) {
      v = -std::log(1.0 - rng.uniform());
      total += v;
    }
    for (double& v : pmf.p) v /= total;

    const IdentityReport report = verify_identities(pmf);
    for (const IdentityReport::Item& item : report.items) {
      const bool exchange = item.name == "prop2_massey_kamitake" ||
                            item.name == "corollary1_dual_expansion";
      const std::string key =
          exchange ? item.name + (pmf.az == 1 ? " (no side process)"
                                              : " (interacting side process)")
                   : item.name;
      max_residual[key] = std::max(max_residual[key], item.residual);
    }
  }

  bool ok = true;
  std::printf("identity suite over %d random pmfs (seed %llu)\n", n_pmfs,
              static_cast<unsigned long long>(seed));
  for (const auto& [name, residual] : max_residual) {
    const bool informational =
        name.find("(interacting side process)") != std::string::npos;
    bool pass = true;
    if (name.rfind("form_equiv_", 0) == 0) {
      pass = residual < 1e-12;
    } else if (!informational) {
      pass = residual < 1e-11;
    }
    if (!informational && !pass) ok = false;
    std::printf("  %-55s max residual %.3e  %s\n", name.c_str(), residual,
                informational ? "[reported only: exact for uncoupled side "
                                "information]"
                              : (pass ? "PASS" : "FAIL"));
  }

  if (!spec_path.empty()) {
    const ChannelSpec spec =
        channel_spec_from_json_text(read_text_file(spec_path));
    const IdentityReport report = verify_identities(build_pmf(spec));
    std::printf("channel spec %s: max residual %.3e\n", spec_path.c_str(),
                report.max_residual());
  }
  if (!out_path.empty()) {
    std::string json = "{\n  \"version\": 1,\n  \"identities\": {\n";
    bool first = true;
    for (const auto& [name, residual] : max_residual) {
      if (!first) json += ",\n";
      first = false;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", residual);
      json += "    \"" + name + "\": " + buf;
    }
    json += "\n  }\n}\n";
    write_text_file(out_path, json);
  }
  std::printf("verify: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "causalflow: causal and directional information flow between grouped "
      "channels of multivariate time series"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic dataset (trial files + manifest)");
  std::string synth_out = "dataset";
  std::string synth_config, synth_model = "eeg", synth_activity = "both";
  int synth_trials = 10, synth_lag = -1, synth_threads = 0;
  long synth_samples = 0;
  std::uint64_t synth_seed = 1;
  double synth_noise = -1.0;
  std::string synth_wavelet;
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--synth-config", synth_config, "generator config JSON");
  synth->add_option("--model", synth_model, "eeg | linear-relay");
  synth->add_option("--activity", synth_activity, "high | low | both");
  synth->add_option("--trials", synth_trials, "trials per activity");
  synth->add_option("--samples", synth_samples, "samples per trial");
  synth->add_option("--seed", synth_seed, "dataset seed");
  synth->add_option("--noise", synth_noise, "sensor noise std-dev");
  synth->add_option("--lag", synth_lag, "source->sink lag in samples");
  synth->add_option("--wavelet", synth_wavelet, "db2 | db4");
  synth->add_option("--threads", synth_threads, "worker threads");

  // analyze
  auto* analyze = app.add_subcommand(
      "analyze", "compute information-rate vectors for ROI pairs");
  ConfigFlags analyze_flags;
  std::string analyze_data, analyze_out = "analysis";
  analyze->add_option("--data", analyze_data, "dataset manifest or trial file")
      ->required();
  analyze->add_option("--out", analyze_out, "output directory");
  analyze->add_option("--pair", analyze_flags.pairs,
                      "restrict to SRC:DST roi pair (repeatable)");
  add_config_flags(analyze, analyze_flags);

  // roc
  auto* roc = app.add_subcommand(
      "roc", "ROC curves, block-bootstrap significance, connectivity matrix");
  ConfigFlags roc_flags;
  std::vector<std::string> roc_rates;
  std::string roc_out = "roc";
  roc->add_option("--rates", roc_rates, "rate CSV file(s) from analyze")
      ->required();
  roc->add_option("--out", roc_out, "output directory");
  add_config_flags(roc, roc_flags);

  // matrix
  auto* matrix = app.add_subcommand(
      "matrix", "re-threshold saved ROC results into a connectivity matrix");
  std::string matrix_results, matrix_out = "matrix";
  double matrix_c = -1.0, matrix_alpha = -1.0;
  matrix->add_option("--results", matrix_results, "roc.json from the roc step")
      ->required();
  matrix->add_option("--c", matrix_c, "AUC cutoff");
  matrix->add_option("--alpha", matrix_alpha, "significance threshold");
  matrix->add_option("--out", matrix_out, "output directory");

  // diagnose
  auto* diagnose = app.add_subcommand(
      "diagnose", "per-ROI Gaussianity diagnostics and histogram export");
  ConfigFlags diagnose_flags;
  std::string diagnose_data, diagnose_out = "diagnose";
  int diagnose_bins = 101;
  diagnose->add_option("--data", diagnose_data, "dataset manifest or trial")
      ->required();
  diagnose->add_option("--bins", diagnose_bins, "histogram bins");
  diagnose->add_option("--out", diagnose_out, "output directory");
  add_config_flags(diagnose, diagnose_flags);

  // verify
  auto* verify = app.add_subcommand(
      "verify", "run the exact discrete identity suite");
  int verify_pmfs = 200;
  std::uint64_t verify_seed = 7;
  std::string verify_spec, verify_out;
  verify->add_option("--pmfs", verify_pmfs, "number of random pmfs");
  verify->add_option("--seed", verify_seed, "pmf generator seed");
  verify->add_option("--spec", verify_spec, "channel spec JSON to check");
  verify->add_option("--out", verify_out, "write residual report JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      return cmd_synth(synth_out, synth_config, synth_model, synth_activity,
                       synth_trials, synth_samples, synth_seed, synth_noise,
                       synth_lag, synth_wavelet, synth_threads);
    }
    if (analyze->parsed()) {
      return cmd_analyze(analyze_flags, analyze_data, analyze_out);
    }
    if (roc->parsed()) return cmd_roc(roc_flags, roc_rates, roc_out);
    if (matrix->parsed()) {
      return cmd_matrix(matrix_results, matrix_c, matrix_alpha, matrix_out);
    }
    if (diagnose->parsed()) {
      return cmd_diagnose(diagnose_flags, diagnose_data, diagnose_bins,
                          diagnose_out);
    }
    if (verify->parsed()) {
      return cmd_verify(verify_pmfs, verify_seed, verify_spec, verify_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.diagnostic() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
