#include "causalflow/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include <json.hpp>

#include "causalflow/ensemble.hpp"
#include "causalflow/errors.hpp"
#include "causalflow/parallel.hpp"
#include "causalflow/rng.hpp"

namespace causalflow {

using nlohmann::json;

void PipelineConfig::validate() const {
  if (window_length <= 2 * edge_overlap || edge_overlap < 0) {
    throw Error(ErrorKind::Config, "cli-pipeline", "PipelineConfig", "window",
                "require window_length > 2*edge_overlap");
  }
  if (ridge < 0.0) {
    throw Error(ErrorKind::Config, "cli-pipeline", "PipelineConfig", "ridge",
                "ridge must be non-negative");
  }
  if (measures.empty()) {
    throw Error(ErrorKind::Config, "cli-pipeline", "PipelineConfig",
                "measures", "at least one measure required");
  }
  if (bootstrap_resamples < 1) {
    throw Error(ErrorKind::Config, "cli-pipeline", "PipelineConfig",
                "bootstrap", "resamples must be >= 1");
  }
  if (positive_tag == negative_tag) {
    throw Error(ErrorKind::Config, "cli-pipeline", "PipelineConfig", "tags",
                "positive and negative tags must differ");
  }
  if (section_cap < 0) {
    throw Error(ErrorKind::Config, "cli-pipeline", "PipelineConfig",
                "section_cap", "section cap must be >= 0");
  }
  significance.validate();
}

std::string pipeline_config_to_json_text(const PipelineConfig& cfg) {
  json measures = json::array();
  for (MeasureKind kind : cfg.measures) measures.push_back(to_string(kind));
  const json j{
      {"version", kFormatVersion},
      {"grouping", cfg.roi_of_channel},
      {"window", {{"length", cfg.window_length}, {"edge_overlap", cfg.edge_overlap}}},
      {"ridge", cfg.ridge},
      {"measures", measures},
      {"mode", cfg.mode == AnalysisMode::PooledWindows ? "pooled-windows"
                                                       : "per-trial"},
      {"condition_on_others", cfg.condition_on_others},
      {"per_sample_normalize", cfg.per_sample_normalize},
      {"units", cfg.bits ? "bits" : "nats"},
      {"section_cap", cfg.section_cap},
      {"pool_seed", cfg.pool_seed},
      {"bootstrap",
       {{"resamples", cfg.bootstrap_resamples}, {"seed", cfg.bootstrap_seed}}},
      {"significance",
       {{"c", cfg.significance.c}, {"alpha", cfg.significance.alpha}}},
      {"analysis_span_ms", cfg.analysis_span_ms},
      {"positive_tag", cfg.positive_tag},
      {"negative_tag", cfg.negative_tag},
      {"threads", cfg.threads},
      {"csv_sample_rate", cfg.csv_sample_rate},
  };
  return j.dump(2);
}

PipelineConfig pipeline_config_from_json_text(const std::string& text) {
  PipelineConfig cfg;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "cli-pipeline", "pipeline_config", "json",
                e.what());
  }
  try {
    if (j.contains("grouping")) {
      cfg.roi_of_channel =
          j["grouping"].get<std::map<std::string, int>>();
    }
    if (j.contains("window")) {
      const json& w = j["window"];
      if (w.contains("length")) cfg.window_length = w["length"];
      if (w.contains("edge_overlap")) cfg.edge_overlap = w["edge_overlap"];
    }
    if (j.contains("ridge")) cfg.ridge = j["ridge"];
    if (j.contains("measures")) {
      cfg.measures.clear();
      for (const json& m : j["measures"]) {
        cfg.measures.push_back(measure_from_string(m.get<std::string>()));
      }
    }
    if (j.contains("mode")) {
      const std::string mode = j["mode"];
      if (mode == "pooled-windows") {
        cfg.mode = AnalysisMode::PooledWindows;
      } else if (mode == "per-trial") {
        cfg.mode = AnalysisMode::PerTrial;
      } else {
        throw Error(ErrorKind::Config, "cli-pipeline", "pipeline_config",
                    "mode", "unknown mode '" + mode + "'");
      }
    }
    if (j.contains("condition_on_others")) {
      cfg.condition_on_others = j["condition_on_others"];
    }
    if (j.contains("per_sample_normalize")) {
      cfg.per_sample_normalize = j["per_sample_normalize"];
    }
    if (j.contains("units")) {
      const std::string units = j["units"];
      if (units != "nats" && units != "bits") {
        throw Error(ErrorKind::Config, "cli-pipeline", "pipeline_config",
                    "units", "units must be nats or bits");
      }
      cfg.bits = units == "bits";
    }
    if (j.contains("section_cap")) cfg.section_cap = j["section_cap"];
    if (j.contains("pool_seed")) cfg.pool_seed = j["pool_seed"];
    if (j.contains("bootstrap")) {
      const json& b = j["bootstrap"];
      if (b.contains("resamples")) cfg.bootstrap_resamples = b["resamples"];
      if (b.contains("seed")) cfg.bootstrap_seed = b["seed"];
    }
    if (j.contains("significance")) {
      const json& s = j["significance"];
      if (s.contains("c")) cfg.significance.c = s["c"];
      if (s.contains("alpha")) cfg.significance.alpha = s["alpha"];
    }
    if (j.contains("analysis_span_ms")) cfg.analysis_span_ms = j["analysis_span_ms"];
    if (j.contains("positive_tag")) cfg.positive_tag = j["positive_tag"].get<int>();
    if (j.contains("negative_tag")) cfg.negative_tag = j["negative_tag"].get<int>();
    if (j.contains("threads")) cfg.threads = j["threads"];
    if (j.contains("csv_sample_rate")) cfg.csv_sample_rate = j["csv_sample_rate"];
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "cli-pipeline", "pipeline_config", "json",
                e.what());
  }
  cfg.validate();
  return cfg;
}

std::string config_hash(const std::string& canonical_json) {
  std::uint64_t hash = 1469598103934665603ull;  // FNV-1a 64
  for (char c : canonical_json) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::string manifest_to_json_text(const DatasetManifest& manifest) {
  json j{{"version", manifest.version},
         {"files", manifest.files},
         {"channels", manifest.channels},
         {"sample_rate", manifest.sample_rate},
         {"seed", manifest.seed},
         {"generator", manifest.generator},
         {"config_hash", manifest.config_hash}};
  if (!manifest.synth_config_json.empty()) {
    j["synth_config"] = json::parse(manifest.synth_config_json);
  }
  return j.dump(2);
}

DatasetManifest manifest_from_json_text(const std::string& text) {
  DatasetManifest manifest;
  try {
    const json j = json::parse(text);
    manifest.version = j.value("version", kFormatVersion);
    manifest.files = j.at("files").get<std::vector<std::string>>();
    manifest.channels = j.value("channels", std::vector<std::string>{});
    manifest.sample_rate = j.value("sample_rate", 0.0);
    manifest.seed = j.value("seed", std::uint64_t{0});
    manifest.generator = j.value("generator", std::string{});
    manifest.config_hash = j.value("config_hash", std::string{});
    if (j.contains("synth_config")) {
      manifest.synth_config_json = j["synth_config"].dump(2);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "cli-pipeline", "manifest", "json",
                e.what());
  }
  return manifest;
}

std::vector<TrialRecording> load_dataset(const std::string& path,
                                         const PipelineConfig& cfg) {
  namespace fs = std::filesystem;
  std::vector<TrialRecording> trials;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    const DatasetManifest manifest = manifest_from_json_text(read_text_file(path));
    const fs::path dir = fs::path(path).parent_path();
    for (const std::string& file : manifest.files) {
      TrialRecording trial = read_trial((dir / file).string(),
                                        cfg.csv_sample_rate > 0.0
                                            ? cfg.csv_sample_rate
                                            : manifest.sample_rate);
      if (!manifest.channels.empty()) {
        if (manifest.channels.size() !=
            static_cast<std::size_t>(trial.n_channels())) {
          throw Error(ErrorKind::Data, "cli-pipeline", "load_dataset",
                      "channels",
                      "manifest channel list does not match trial " + file);
        }
        trial.channel_names = manifest.channels;
      }
      trials.push_back(std::move(trial));
    }
  } else {
    trials.push_back(read_trial(path, cfg.csv_sample_rate));
  }
  if (trials.empty()) {
    throw Error(ErrorKind::Data, "cli-pipeline", "load_dataset", "path",
                "dataset is empty");
  }
  return trials;
}

namespace {

RoiGrouping effective_grouping(const PipelineConfig& cfg,
                               const TrialRecording& first) {
  RoiGrouping grouping;
  if (cfg.roi_of_channel.empty()) {
    for (int ch = 0; ch < first.n_channels(); ++ch) {
      grouping.roi_of_channel[first.channel_names[static_cast<std::size_t>(ch)]] =
          ch + 1;
    }
  } else {
    grouping.roi_of_channel = cfg.roi_of_channel;
  }
  return grouping;
}

int max_window_index(const std::vector<GroupedRecording>& trials,
                     int window_len, int edge_overlap, std::uint8_t tag) {
  int max_k = -1;
  for (const GroupedRecording& trial : trials) {
    for (const WindowSlot& slot :
         slice_windows(trial.tags, window_len, edge_overlap)) {
      if (slot.tag == tag) max_k = std::max(max_k, slot.index_in_segment);
    }
  }
  return max_k;
}

}  // namespace

RateTable analyze_dataset(const PipelineConfig& cfg,
                          const std::vector<TrialRecording>& trials,
                          const std::vector<std::pair<int, int>>& pairs_in) {
  cfg.validate();
  if (trials.empty()) {
    throw Error(ErrorKind::Data, "cli-pipeline", "analyze_dataset", "trials",
                "no trials to analyze");
  }
  const RoiGrouping grouping = effective_grouping(cfg, trials.front());
  const std::vector<int> rois = grouping.roi_ids();
  const int needed = cfg.condition_on_others ? 3 : 2;
  if (static_cast<int>(rois.size()) < needed) {
    throw Error(ErrorKind::Config, "cli-pipeline", "analyze_dataset",
                "grouping",
                "need at least " + std::to_string(needed) + " ROIs");
  }

  std::vector<GroupedRecording> grouped;
  grouped.reserve(trials.size());
  for (const TrialRecording& trial : trials) {
    if (trial.channel_names != trials.front().channel_names ||
        trial.sample_rate != trials.front().sample_rate) {
      throw Error(ErrorKind::Data, "cli-pipeline", "analyze_dataset", "trials",
                  "trials disagree on channels or sample rate");
    }
    grouped.push_back(group_into_rois(trial, grouping,
                                      RoiAggregation::PerElectrodeRealization));
  }

  int min_realizations = 0;
  for (const auto& [roi, mat] : grouped.front().rois) {
    const int count = static_cast<int>(mat.rows());
    if (min_realizations == 0 || count < min_realizations) {
      min_realizations = count;
    }
  }

  std::vector<std::pair<int, int>> pairs = pairs_in;
  if (pairs.empty()) {
    for (int a : rois) {
      for (int b : rois) {
        if (a != b) pairs.emplace_back(a, b);
      }
    }
  }

  PoolOptions options;
  options.seed = cfg.pool_seed;
  options.section_cap = cfg.section_cap;
  options.edge_overlap = cfg.edge_overlap;
  options.min_realizations = min_realizations;
  options.include_z = cfg.condition_on_others;

  const double fs = trials.front().sample_rate;
  const double stride_ms =
      (cfg.window_length - 2.0 * cfg.edge_overlap) / fs * 1000.0;
  const std::uint8_t tags[2] = {cfg.positive_tag, cfg.negative_tag};

  ClampStats clamps;
  std::vector<std::vector<RateRow>> rows_per_pair(pairs.size());

  parallel_for(
      static_cast<int>(pairs.size()),
      [&](int p) {
        const auto [x_roi, y_roi] = pairs[static_cast<std::size_t>(p)];
        std::vector<RateRow>& rows = rows_per_pair[static_cast<std::size_t>(p)];
        auto emit = [&](const PrefixCovariance& pc, std::uint8_t tag,
                        long window_index, double time_ms) {
          PrefixLogDet ld(pc);
          for (MeasureKind kind : cfg.measures) {
            double rate = clamp_rate(measure_rate(ld, kind, Direction::XtoY),
                                     &clamps);
            if (cfg.per_sample_normalize) rate /= cfg.window_length;
            rows.push_back(
                {x_roi, y_roi, kind, tag, window_index, time_ms, rate});
          }
        };

        if (cfg.mode == AnalysisMode::PerTrial) {
          for (std::size_t t = 0; t < grouped.size(); ++t) {
            for (std::uint8_t tag : tags) {
              bool has_tag = false;
              for (std::uint8_t sample_tag : grouped[t].tags) {
                if (sample_tag == tag) {
                  has_tag = true;
                  break;
                }
              }
              if (!has_tag) continue;
              const WindowEnsemble ensemble = pool_trial_sections(
                  grouped[t], cfg.window_length, x_roi, y_roi, tag, options);
              emit(estimate_joint_covariance(ensemble, cfg.ridge), tag,
                   static_cast<long>(t), 0.0);
            }
          }
        } else {
          for (std::uint8_t tag : tags) {
            const int max_k = max_window_index(grouped, cfg.window_length,
                                               cfg.edge_overlap, tag);
            for (int k = 0; k <= max_k; ++k) {
              const WindowEnsemble ensemble =
                  pool_sections(grouped, k, cfg.window_length, x_roi, y_roi,
                                tag, options);
              emit(estimate_joint_covariance(ensemble, cfg.ridge), tag, k,
                   k * stride_ms);
            }
          }
        }
      },
      cfg.threads);

  RateTable table;
  for (std::vector<RateRow>& rows : rows_per_pair) {
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  }
  table.clamp_total = clamps.total.load();
  table.clamp_clamped = clamps.clamped.load();
  table.clamp_severe = clamps.severe.load();
  return table;
}

RocOutputs roc_analysis(const PipelineConfig& cfg, const RateTable& rates) {
  cfg.validate();

  struct Key {
    int src, dst;
    int measure;
    bool operator<(const Key& o) const {
      return std::tie(src, dst, measure) < std::tie(o.src, o.dst, o.measure);
    }
  };
  std::map<Key, std::pair<std::vector<double>, std::vector<double>>> classes;
  for (const RateRow& row : rates.rows) {
    if (cfg.analysis_span_ms > 0.0 && row.window_time_ms >= cfg.analysis_span_ms) {
      continue;
    }
    const Key key{row.x_roi, row.y_roi, static_cast<int>(row.measure)};
    if (row.tag == cfg.positive_tag) {
      classes[key].first.push_back(row.rate_nats);
    } else if (row.tag == cfg.negative_tag) {
      classes[key].second.push_back(row.rate_nats);
    }
  }

  RocOutputs outputs;
  std::vector<PairBootstrap> boots;
  for (const auto& [key, scores] : classes) {
    const auto& [pos, neg] = scores;
    if (pos.empty() || neg.empty()) {
      throw Error(ErrorKind::Data, "cli-pipeline", "roc_analysis", "classes",
                  "pair " + std::to_string(key.src) + ":" +
                      std::to_string(key.dst) +
                      " lacks scores for one class");
    }
    PairRocOutput out;
    out.source = key.src;
    out.dest = key.dst;
    out.measure = static_cast<MeasureKind>(key.measure);
    out.curve = roc_points(pos, neg);

    std::uint64_t state =
        cfg.bootstrap_seed ^
        (0x9E3779B97F4A7C15ull *
         ((static_cast<std::uint64_t>(key.src) << 24) ^
          (static_cast<std::uint64_t>(key.dst) << 8) ^
          static_cast<std::uint64_t>(key.measure)));
    const std::uint64_t pair_seed = splitmix64(state);
    out.boot = block_bootstrap(pos, neg, cfg.bootstrap_resamples, pair_seed, 0,
                               cfg.threads);
    out.sig = significance_test(out.boot, cfg.significance);
    boots.push_back({out.source, out.dest, out.measure, out.boot});
    outputs.pairs.push_back(std::move(out));
  }
  outputs.matrix = connectivity_change_matrix(boots, cfg.significance);
  return outputs;
}

namespace {

json curve_to_json(const RocCurve& curve) {
  // +-inf sentinels are dropped for JSON; rebuilt on load
  std::vector<double> finite(curve.thresholds.begin() + 1,
                             curve.thresholds.end() - 1);
  return json{{"thresholds", finite},
              {"fp", curve.fp},
              {"tp", curve.tp},
              {"theta_trapezoid", curve.theta_trapezoid},
              {"theta_mann_whitney", curve.theta_mann_whitney}};
}

RocCurve curve_from_json(const json& j) {
  RocCurve curve;
  const double inf = std::numeric_limits<double>::infinity();
  curve.thresholds.push_back(inf);
  for (const json& t : j.at("thresholds")) curve.thresholds.push_back(t);
  curve.thresholds.push_back(-inf);
  curve.fp = j.at("fp").get<std::vector<double>>();
  curve.tp = j.at("tp").get<std::vector<double>>();
  curve.theta_trapezoid = j.at("theta_trapezoid");
  curve.theta_mann_whitney = j.at("theta_mann_whitney");
  return curve;
}

json matrix_to_json(const ConnectivityMatrix& matrix) {
  json measures = json::object();
  for (const auto& [kind, grid] : matrix.significant) {
    json rows = json::array();
    for (const std::vector<bool>& row : grid) {
      json cells = json::array();
      for (bool cell : row) cells.push_back(cell ? 1 : 0);
      rows.push_back(cells);
    }
    measures[to_string(kind)] = rows;
  }
  return json{{"rois", matrix.rois}, {"measures", measures}};
}

}  // namespace

std::string roc_outputs_to_json_text(const RocOutputs& outputs,
                                     const PipelineConfig& cfg) {
  json pairs = json::array();
  for (const PairRocOutput& out : outputs.pairs) {
    pairs.push_back({{"source", out.source},
                     {"dest", out.dest},
                     {"measure", to_string(out.measure)},
                     {"theta", out.boot.theta_hat},
                     {"block_len", out.boot.block_len},
                     {"n_blocks", out.boot.n_blocks},
                     {"resamples", out.boot.resamples},
                     {"theta_b", out.boot.theta_b},
                     {"sigma", out.boot.sigma},
                     {"mean_theta_b", out.boot.mean()},
                     {"p_value", out.sig.p_value},
                     {"p_empirical", out.sig.p_empirical},
                     {"significant", out.sig.reject},
                     {"curve", curve_to_json(out.curve)}});
  }
  const json j{{"version", kFormatVersion},
               {"significance",
                {{"c", cfg.significance.c}, {"alpha", cfg.significance.alpha}}},
               {"bootstrap",
                {{"resamples", cfg.bootstrap_resamples},
                 {"seed", cfg.bootstrap_seed}}},
               {"pairs", pairs},
               {"matrix", matrix_to_json(outputs.matrix)}};
  return j.dump(2);
}

RocOutputs roc_outputs_from_json_text(const std::string& text) {
  RocOutputs outputs;
  try {
    const json j = json::parse(text);
    for (const json& jp : j.at("pairs")) {
      PairRocOutput out;
      out.source = jp.at("source");
      out.dest = jp.at("dest");
      out.measure = measure_from_string(jp.at("measure"));
      out.boot.theta_hat = jp.at("theta");
      out.boot.block_len = jp.at("block_len");
      out.boot.n_blocks = jp.at("n_blocks");
      out.boot.resamples = jp.at("resamples");
      out.boot.theta_b = jp.at("theta_b").get<std::vector<double>>();
      out.boot.sigma = jp.at("sigma");
      out.sig.p_value = jp.at("p_value");
      out.sig.p_empirical = jp.at("p_empirical");
      out.sig.reject = jp.at("significant");
      out.curve = curve_from_json(jp.at("curve"));
      outputs.pairs.push_back(std::move(out));
    }
    const json& jm = j.at("matrix");
    outputs.matrix.rois = jm.at("rois").get<std::vector<int>>();
    for (const auto& [name, rows] : jm.at("measures").items()) {
      std::vector<std::vector<bool>> grid;
      for (const json& row : rows) {
        std::vector<bool> cells;
        for (const json& cell : row) cells.push_back(cell.get<int>() != 0);
        grid.push_back(cells);
      }
      outputs.matrix.significant[measure_from_string(name)] = grid;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "cli-pipeline", "roc_outputs", "json",
                e.what());
  }
  return outputs;
}

RocOutputs rethreshold(const RocOutputs& outputs,
                       const SignificanceConfig& cfg) {
  RocOutputs result = outputs;
  std::vector<PairBootstrap> boots;
  for (PairRocOutput& out : result.pairs) {
    out.sig = significance_test(out.boot, cfg);
    boots.push_back({out.source, out.dest, out.measure, out.boot});
  }
  result.matrix = connectivity_change_matrix(boots, cfg);
  return result;
}

std::string matrix_to_json_text(const RocOutputs& outputs,
                                const PipelineConfig& cfg) {
  json cells = json::array();
  for (const PairRocOutput& out : outputs.pairs) {
    cells.push_back({{"source", out.source},
                     {"dest", out.dest},
                     {"measure", to_string(out.measure)},
                     {"theta", out.boot.theta_hat},
                     {"p_value", out.sig.p_value},
                     {"significant", out.sig.reject}});
  }
  const json j{{"version", kFormatVersion},
               {"c", cfg.significance.c},
               {"alpha", cfg.significance.alpha},
               {"matrix", matrix_to_json(outputs.matrix)},
               {"cells", cells}};
  return j.dump(2);
}

std::string matrix_to_csv_text(const ConnectivityMatrix& matrix) {
  std::string out = "measure,source,dest,significant\n";
  for (const auto& [kind, grid] : matrix.significant) {
    for (std::size_t i = 0; i < matrix.rois.size(); ++i) {
      for (std::size_t j = 0; j < matrix.rois.size(); ++j) {
        if (i == j) continue;
        out += to_string(kind);
        out.push_back(',');
        out += std::to_string(matrix.rois[i]);
        out.push_back(',');
        out += std::to_string(matrix.rois[j]);
        out.push_back(',');
        out += grid[i][j] ? '1' : '0';
        out.push_back('\n');
      }
    }
  }
  return out;
}

DiagnoseReport diagnose_dataset(const PipelineConfig& cfg,
                                const std::vector<TrialRecording>& trials,
                                int n_bins, long max_samples_per_entry) {
  if (trials.empty()) {
    throw Error(ErrorKind::Data, "cli-pipeline", "diagnose_dataset", "trials",
                "no trials");
  }
  const RoiGrouping grouping = effective_grouping(cfg, trials.front());

  std::map<std::pair<int, std::uint8_t>, std::vector<double>> pooled;
  for (const TrialRecording& trial : trials) {
    const GroupedRecording grouped = group_into_rois(
        trial, grouping, RoiAggregation::PerElectrodeRealization);
    for (const auto& [roi, mat] : grouped.rois) {
      for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        for (Eigen::Index s = 0; s < mat.cols(); ++s) {
          std::vector<double>& sink =
              pooled[{roi, trial.tags[static_cast<std::size_t>(s)]}];
          if (static_cast<long>(sink.size()) < max_samples_per_entry) {
            sink.push_back(mat(r, s));
          }
        }
      }
    }
  }

  DiagnoseReport report;
  for (const auto& [key, samples] : pooled) {
    DiagnoseEntry entry;
    entry.roi = key.first;
    entry.tag = key.second;
    entry.n_samples = static_cast<long>(samples.size());
    try {
      entry.moments = skewness_kurtosis(samples);
      entry.histogram = Histogram::build(samples, n_bins);
      entry.fit = l1_gaussian_fit(entry.histogram);
      entry.fit_ok = true;
    } catch (const Error& e) {
      entry.fit_ok = false;
      entry.fit_error = e.diagnostic();
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::string diagnose_to_json_text(const DiagnoseReport& report) {
  json entries = json::array();
  for (const DiagnoseEntry& entry : report.entries) {
    json je{{"roi", entry.roi},
            {"tag", entry.tag},
            {"n_samples", entry.n_samples},
            {"fit_ok", entry.fit_ok}};
    if (entry.fit_ok) {
      je["mean"] = entry.moments.mean;
      je["skewness"] = entry.moments.skewness;
      je["kurtosis"] = entry.moments.kurtosis;
      je["non_normal"] = entry.moments.non_normal;
      je["fit"] = {{"mu", entry.fit.mu},
                   {"sigma", entry.fit.sigma},
                   {"objective", entry.fit.objective}};
      je["histogram"] = {{"edges", entry.histogram.edges},
                         {"counts", entry.histogram.counts}};
    } else {
      je["fit_error"] = entry.fit_error;
    }
    entries.push_back(std::move(je));
  }
  return json{{"version", kFormatVersion}, {"entries", entries}}.dump(2);
}

std::string identity_report_to_json_text(const IdentityReport& report) {
  json items = json::array();
  for (const IdentityReport::Item& item : report.items) {
    items.push_back({{"name", item.name}, {"residual", item.residual}});
  }
  return json{{"version", kFormatVersion},
              {"items", items},
              {"max_residual", report.max_residual()}}
      .dump(2);
}

TrialRecording generate_relay_trial(long n_samples, double sample_rate,
                                    std::uint64_t seed, std::uint8_t tag) {
  if (n_samples < 8) {
    throw Error(ErrorKind::Parameter, "cli-pipeline", "generate_relay_trial",
                "n_samples", "need at least 8 samples");
  }
  Rng rng(seed);
  const double a = 0.6;   // X self-coupling
  const double b = 0.9;   // X -> Z strength
  const double c = 0.9;   // Z -> Y strength
  const double sx = std::sqrt(1.0 - a * a);
  const double sz = std::sqrt(1.0 - b * b);
  const double sy = std::sqrt(1.0 - c * c);

  const long burn = 100;
  double x = rng.normal(), z = rng.normal(), y = rng.normal();
  TrialRecording trial;
  trial.channels.resize(3, n_samples);
  for (long t = -burn; t < n_samples; ++t) {
    const double y_next = c * z + sy * rng.normal();
    const double z_next = b * x + sz * rng.normal();
    const double x_next = a * x + sx * rng.normal();
    x = x_next;
    z = z_next;
    y = y_next;
    if (t >= 0) {
      trial.channels(0, t) = x;
      trial.channels(1, t) = z;
      trial.channels(2, t) = y;
    }
  }
  trial.sample_rate = sample_rate;
  trial.tags.assign(static_cast<std::size_t>(n_samples), tag);
  trial.channel_names = {"X", "Z", "Y"};
  return trial;
}

}  // namespace causalflow
