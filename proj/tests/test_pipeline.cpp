#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "causalflow/errors.hpp"
#include "causalflow/io.hpp"
#include "causalflow/pipeline.hpp"
#include "causalflow/rng.hpp"
#include "support/test_support.hpp"

using namespace causalflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("causalflow_test_" + std::to_string(Rng(std::random_device{}()).next()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

TrialRecording small_trial(std::uint64_t seed, long n = 64) {
  Rng rng(seed);
  TrialRecording trial;
  trial.channels.resize(3, n);
  for (int c = 0; c < 3; ++c) {
    for (long s = 0; s < n; ++s) trial.channels(c, s) = rng.normal();
  }
  trial.sample_rate = 256.0;
  trial.tags.assign(static_cast<std::size_t>(n), 1);
  for (long s = n / 2; s < n; ++s) trial.tags[static_cast<std::size_t>(s)] = 2;
  trial.channel_names = {"ch1", "ch2", "ch3"};
  return trial;
}

}  // namespace

TEST_CASE("trial binary round trip is byte-stable") {
  TempDir tmp;
  const TrialRecording trial = small_trial(1);
  const std::string path = tmp.file("trial.cfl");
  write_trial_binary(path, trial);
  const TrialRecording back = read_trial_binary(path);
  CHECK(back.channels == trial.channels);
  CHECK(back.tags == trial.tags);
  CHECK(back.sample_rate == trial.sample_rate);

  write_trial_binary(tmp.file("again.cfl"), back);
  CHECK(read_text_file(path) == read_text_file(tmp.file("again.cfl")));

  SUBCASE("magic dispatch") {
    const TrialRecording auto_read = read_trial(path);
    CHECK(auto_read.channels == trial.channels);
  }
  SUBCASE("truncated file is an io error") {
    const std::string text = read_text_file(path);
    write_text_file(tmp.file("bad.cfl"), text.substr(0, text.size() - 3));
    CHECK_THROWS_AS(read_trial_binary(tmp.file("bad.cfl")), Error);
  }
}

TEST_CASE("trial csv round trip") {
  TempDir tmp;
  const TrialRecording trial = small_trial(2, 32);
  write_trial_csv(tmp.file("trial.csv"), trial);
  const TrialRecording back = read_trial_csv(tmp.file("trial.csv"), 256.0);
  CHECK(back.channel_names == trial.channel_names);
  CHECK(back.tags == trial.tags);
  CHECK((back.channels - trial.channels).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(read_trial(tmp.file("trial.csv")), Error);  // needs fs
}

TEST_CASE("rate csv round trip, nats and bits") {
  TempDir tmp;
  std::vector<RateRow> rows = {
      {1, 2, MeasureKind::Cbi, 2, 0, 0.0, 0.25},
      {1, 2, MeasureKind::MasseyDi, 1, 3, 187.5, 1.0e-3},
  };
  write_rate_csv(tmp.file("rates.csv"), rows, false);
  const auto back = read_rate_csv(tmp.file("rates.csv"));
  REQUIRE(back.size() == 2);
  CHECK(back[0].x_roi == 1);
  CHECK(back[0].y_roi == 2);
  CHECK(back[0].measure == MeasureKind::Cbi);
  CHECK(back[0].rate_nats == 0.25);
  CHECK(back[1].window_time_ms == 187.5);

  write_rate_csv(tmp.file("rates_bits.csv"), rows, true);
  const auto bits = read_rate_csv(tmp.file("rates_bits.csv"));
  CHECK(bits[0].rate_nats == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("pipeline config json round trip") {
  PipelineConfig cfg;
  cfg.roi_of_channel = {{"ch1", 1}, {"ch2", 2}, {"ch3", 3}};
  cfg.window_length = 30;
  cfg.edge_overlap = 0;
  cfg.mode = AnalysisMode::PerTrial;
  cfg.measures = {MeasureKind::Cbi, MeasureKind::SumTransferEntropy};
  cfg.section_cap = 500;
  cfg.bits = true;

  const std::string text = pipeline_config_to_json_text(cfg);
  const PipelineConfig back = pipeline_config_from_json_text(text);
  CHECK(pipeline_config_to_json_text(back) == text);
  CHECK(back.window_length == 30);
  CHECK(back.mode == AnalysisMode::PerTrial);
  CHECK(back.measures == cfg.measures);
  CHECK(back.bits);

  SUBCASE("defaults match the protocol constants") {
    PipelineConfig def;
    CHECK(def.window_length == 32);
    CHECK(def.edge_overlap == 8);
    CHECK(def.bootstrap_resamples == 2000);
    CHECK(def.significance.c == 0.85);
    CHECK(def.significance.alpha == 0.05);
  }
  SUBCASE("invalid config rejected") {
    CHECK_THROWS_AS(pipeline_config_from_json_text(
                        R"({"window": {"length": 16, "edge_overlap": 8}})"),
                    Error);
    CHECK_THROWS_AS(
        pipeline_config_from_json_text(R"({"significance": {"c": 0.2}})"),
        Error);
    CHECK_THROWS_AS(pipeline_config_from_json_text(R"({"mode": "banana"})"),
                    Error);
  }
  SUBCASE("config hash is stable and content-sensitive") {
    CHECK(config_hash(text) == config_hash(text));
    PipelineConfig other = cfg;
    other.ridge = 1e-6;
    CHECK(config_hash(pipeline_config_to_json_text(other)) != config_hash(text));
  }
}

TEST_CASE("manifest round trip and dataset loading") {
  TempDir tmp;
  const TrialRecording t0 = small_trial(10);
  const TrialRecording t1 = small_trial(11);
  write_trial_binary(tmp.file("trial_0000.cfl"), t0);
  write_trial_binary(tmp.file("trial_0001.cfl"), t1);

  DatasetManifest manifest;
  manifest.files = {"trial_0000.cfl", "trial_0001.cfl"};
  manifest.channels = {"X", "Z", "Y"};
  manifest.sample_rate = 256.0;
  manifest.seed = 42;
  manifest.generator = "test";
  manifest.config_hash = "deadbeef";
  const std::string text = manifest_to_json_text(manifest);
  write_text_file(tmp.file("manifest.json"), text);

  const DatasetManifest back = manifest_from_json_text(text);
  CHECK(manifest_to_json_text(back) == text);

  PipelineConfig cfg;
  const auto trials = load_dataset(tmp.file("manifest.json"), cfg);
  REQUIRE(trials.size() == 2);
  CHECK(trials[0].channel_names == std::vector<std::string>{"X", "Z", "Y"});
  CHECK(trials[0].channels == t0.channels);
}

TEST_CASE("relay pipeline: conditioning kills the implied link") {
  std::vector<TrialRecording> trials;
  for (int t = 0; t < 40; ++t) {
    trials.push_back(generate_relay_trial(
        4000, 250.0, 1000 + static_cast<std::uint64_t>(t), 2));
  }

  PipelineConfig cfg;
  cfg.mode = AnalysisMode::PerTrial;
  cfg.window_length = 4;
  cfg.edge_overlap = 0;
  cfg.measures = {MeasureKind::MasseyDi};
  cfg.positive_tag = 2;
  cfg.negative_tag = 1;

  // channel order X, Z, Y -> identity rois 1, 2, 3; pair X -> Y is (1, 3)
  const RateTable conditioned = analyze_dataset(cfg, trials, {{1, 3}});
  cfg.condition_on_others = false;
  const RateTable unconditioned = analyze_dataset(cfg, trials, {{1, 3}});

  REQUIRE(conditioned.rows.size() == 40);
  REQUIRE(unconditioned.rows.size() == 40);
  double mean_cond = 0.0, mean_uncond = 0.0;
  for (const RateRow& row : conditioned.rows) mean_cond += row.rate_nats;
  for (const RateRow& row : unconditioned.rows) mean_uncond += row.rate_nats;
  mean_cond /= 40.0;
  mean_uncond /= 40.0;

  CHECK(mean_uncond > 0.05);
  CHECK(mean_cond < 0.1 * mean_uncond);
}

TEST_CASE("analyze_dataset pooled-windows mode produces per-window rows") {
  std::vector<TrialRecording> trials;
  for (int t = 0; t < 6; ++t) {
    TrialRecording trial = small_trial(500 + static_cast<std::uint64_t>(t), 128);
    trials.push_back(trial);
  }
  PipelineConfig cfg;
  cfg.mode = AnalysisMode::PooledWindows;
  cfg.window_length = 16;
  cfg.edge_overlap = 4;
  cfg.measures = {MeasureKind::Cbi};
  cfg.ridge = 1e-6;

  const RateTable table = analyze_dataset(cfg, trials, {{1, 3}});
  REQUIRE(!table.rows.empty());
  // 64-sample segments, N=16, stride 8 -> k = 0..6 per segment, both tags
  long k_max = 0;
  for (const RateRow& row : table.rows) {
    k_max = std::max(k_max, row.window_index);
    CHECK(row.window_time_ms == doctest::Approx(row.window_index * 8 / 256.0 * 1000.0));
  }
  CHECK(k_max == 6);

  SUBCASE("full ordered-pair enumeration") {
    const RateTable all = analyze_dataset(cfg, trials);
    CHECK(all.rows.size() == 6 * table.rows.size());  // 3 rois -> 6 pairs
  }
}

TEST_CASE("roc analysis flags separated classes and honors the span") {
  RateTable table;
  Rng rng(9);
  for (int k = 0; k < 256; ++k) {
    const double t_ms = k * 31.25;
    table.rows.push_back({1, 2, MeasureKind::Cbi, 2, k, t_ms,
                          1.0 + 0.05 * rng.normal()});
    table.rows.push_back({1, 2, MeasureKind::Cbi, 1, k, t_ms,
                          0.2 + 0.05 * rng.normal()});
    // decoy rows beyond the one-second span would flip the classes
    table.rows.push_back({1, 2, MeasureKind::Cbi, 2, k, 2000.0, 0.0});
    table.rows.push_back({1, 2, MeasureKind::Cbi, 1, k, 2000.0, 5.0});
  }
  PipelineConfig cfg;
  cfg.bootstrap_resamples = 200;
  const RocOutputs out = roc_analysis(cfg, table);
  REQUIRE(out.pairs.size() == 1);
  CHECK(out.pairs[0].boot.theta_hat > 0.99);
  CHECK(out.pairs[0].sig.reject);
  CHECK(out.matrix.significant.at(MeasureKind::Cbi)[0][1]);

  SUBCASE("identical classes flag nothing") {
    RateTable flat;
    for (int k = 0; k < 64; ++k) {
      flat.rows.push_back({1, 2, MeasureKind::Cbi, 2, k, 0.0, 0.5});
      flat.rows.push_back({1, 2, MeasureKind::Cbi, 1, k, 0.0, 0.5});
    }
    const RocOutputs none = roc_analysis(cfg, flat);
    CHECK(none.pairs[0].boot.theta_hat == doctest::Approx(0.5));
    CHECK_FALSE(none.pairs[0].sig.reject);
    CHECK_FALSE(none.matrix.significant.at(MeasureKind::Cbi)[0][1]);
  }
}

TEST_CASE("roc outputs json round trip and rethresholding") {
  RateTable table;
  Rng rng(4);
  for (int k = 0; k < 128; ++k) {
    table.rows.push_back({1, 2, MeasureKind::Cbi, 2, k, 0.0,
                          0.8 + 0.1 * rng.normal()});
    table.rows.push_back({1, 2, MeasureKind::Cbi, 1, k, 0.0,
                          0.3 + 0.1 * rng.normal()});
  }
  PipelineConfig cfg;
  cfg.bootstrap_resamples = 100;
  const RocOutputs out = roc_analysis(cfg, table);
  const std::string text = roc_outputs_to_json_text(out, cfg);
  const RocOutputs back = roc_outputs_from_json_text(text);
  REQUIRE(back.pairs.size() == 1);
  CHECK(back.pairs[0].boot.theta_hat == out.pairs[0].boot.theta_hat);
  CHECK(back.pairs[0].boot.theta_b == out.pairs[0].boot.theta_b);
  CHECK(back.pairs[0].curve.fp == out.pairs[0].curve.fp);

  // a stricter cutoff can only reduce rejections
  const RocOutputs strict = rethreshold(back, {0.99, 0.05});
  CHECK(strict.pairs[0].sig.p_value >= out.pairs[0].sig.p_value);
}

TEST_CASE("matrix exports") {
  ConnectivityMatrix matrix;
  matrix.rois = {1, 2};
  matrix.significant[MeasureKind::Cbi] = {{false, true}, {true, false}};
  const std::string csv = matrix_to_csv_text(matrix);
  CHECK(csv.find("measure,source,dest,significant") == 0);
  CHECK(csv.find("cbi,1,2,1") != std::string::npos);
  CHECK(csv.find("cbi,2,1,1") != std::string::npos);
}

TEST_CASE("diagnose handles constant channels without crashing") {
  TrialRecording trial = small_trial(3, 128);
  trial.channels.row(1).setConstant(4.2);
  PipelineConfig cfg;
  const DiagnoseReport report = diagnose_dataset(cfg, {trial}, 31);
  bool found_error = false;
  for (const DiagnoseEntry& entry : report.entries) {
    if (entry.roi == 2) {
      CHECK_FALSE(entry.fit_ok);
      CHECK(!entry.fit_error.empty());
      found_error = true;
    } else {
      CHECK(entry.fit_ok);
    }
  }
  CHECK(found_error);
  const std::string json_text = diagnose_to_json_text(report);
  CHECK(json_text.find("fit_error") != std::string::npos);
}

TEST_CASE("full mini pipeline is deterministic") {
  TempDir tmp;
  auto run = [&](const std::string& suffix) {
    SynthConfig synth = default_synth_config();
    synth.n_samples = 4096;
    std::vector<TrialRecording> trials;
    for (int t = 0; t < 8; ++t) {
      trials.push_back(generate_trial(synth, Activity::High, t, 21).recording);
      trials.push_back(generate_trial(synth, Activity::Low, t, 21).recording);
    }
    PipelineConfig cfg;
    cfg.mode = AnalysisMode::PerTrial;
    cfg.window_length = 30;
    cfg.edge_overlap = 0;
    cfg.measures = {MeasureKind::Cbi};
    cfg.bootstrap_resamples = 64;
    cfg.significance = {0.6, 0.05};
    const RateTable table =
        analyze_dataset(cfg, trials, {{1, 2}, {2, 1}});
    write_rate_csv(tmp.file("rates" + suffix + ".csv"), table.rows, false);
    const RocOutputs out = roc_analysis(cfg, table);
    write_text_file(tmp.file("matrix" + suffix + ".json"),
                    matrix_to_json_text(out, cfg));
    return read_text_file(tmp.file("rates" + suffix + ".csv")) +
           read_text_file(tmp.file("matrix" + suffix + ".json"));
  };
  CHECK(run("_a") == run("_b"));
}

TEST_CASE("identity report serialization") {
  const IdentityReport report =
      verify_identities(test::random_pmf(2, 2, 2, 2, 5));
  const std::string text = identity_report_to_json_text(report);
  CHECK(text.find("max_residual") != std::string::npos);
  CHECK(text.find("prop4_cbi_decomposition") != std::string::npos);
}

TEST_CASE("relay trial generator is deterministic") {
  const TrialRecording a = generate_relay_trial(256, 250.0, 5, 1);
  const TrialRecording b = generate_relay_trial(256, 250.0, 5, 1);
  CHECK(a.channels == b.channels);
  CHECK(a.channel_names == std::vector<std::string>{"X", "Z", "Y"});
}
