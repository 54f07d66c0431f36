#include "causalflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "causalflow/errors.hpp"
#include "causalflow/parallel.hpp"

namespace causalflow {

namespace {

constexpr double kPositionTolerance = 1e-9;

double great_circle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double dot = std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0);
  return std::acos(dot);
}

}  // namespace

int ElectrodeLayout::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < electrodes.size(); ++i) {
    if (electrodes[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void ElectrodeLayout::validate() const {
  if (electrodes.empty()) {
    throw Error(ErrorKind::Config, "synth-eeg", "ElectrodeLayout",
                "electrodes", "layout has no electrodes");
  }
  std::set<std::string> names;
  for (const Electrode& e : electrodes) {
    if (!names.insert(e.name).second) {
      throw Error(ErrorKind::Config, "synth-eeg", "ElectrodeLayout", "name",
                  "duplicate electrode '" + e.name + "'");
    }
    if (e.position.norm() < kPositionTolerance) {
      throw Error(ErrorKind::Config, "synth-eeg", "ElectrodeLayout",
                  "position", "electrode '" + e.name + "' at origin");
    }
  }
  for (std::size_t i = 0; i < electrodes.size(); ++i) {
    for (std::size_t j = i + 1; j < electrodes.size(); ++j) {
      if (great_circle(electrodes[i].position, electrodes[j].position) <
          kPositionTolerance) {
        throw Error(ErrorKind::Config, "synth-eeg", "ElectrodeLayout",
                    "position",
                    "electrodes '" + electrodes[i].name + "' and '" +
                        electrodes[j].name + "' coincide");
      }
    }
  }
  for (const BandRouting& route : routing) {
    for (const SourceSinkPair& pair : route.pairs) {
      if (index_of(pair.source) < 0 || index_of(pair.sink) < 0) {
        throw Error(ErrorKind::Config, "synth-eeg", "ElectrodeLayout",
                    "routing", "band '" + route.band +
                                   "' routes through unknown electrode");
      }
      if (pair.source == pair.sink) {
        throw Error(ErrorKind::Config, "synth-eeg", "ElectrodeLayout",
                    "routing",
                    "band '" + route.band + "' has source == sink");
      }
    }
  }
}

const char* to_string(Activity activity) {
  return activity == Activity::High ? "high" : "low";
}

Activity activity_from_string(const std::string& name) {
  if (name == "high") return Activity::High;
  if (name == "low") return Activity::Low;
  throw Error(ErrorKind::Config, "synth-eeg", "activity", "activity",
              "unknown activity '" + name + "' (expected high or low)");
}

std::vector<BandSpec> default_bands() {
  // dyadic splits of 250/2 Hz over 5 levels
  return {
      {"delta", 0.0, 3.90625, 5, true, {0.9, 1.0}, {0.55, 0.85}},
      {"theta", 3.90625, 7.8125, 5, false, {0.9, 1.0}, {0.55, 0.85}},
      {"alpha", 7.8125, 15.625, 4, false, {1.0, 1.0}, {1.0, 1.0}},
      {"beta", 15.625, 31.25, 3, false, {1.0, 1.0}, {1.0, 1.0}},
  };
}

ElectrodeLayout default_layout() {
  // idealized unit-sphere 10-10 positions (x right, y front, z up)
  ElectrodeLayout layout;
  layout.electrodes = {
      {"Fz", {0.0, 0.719, 0.695}},   {"Cz", {0.0, 0.0, 1.0}},
      {"F5", {-0.588, 0.724, 0.361}}, {"F6", {0.588, 0.724, 0.361}},
      {"P5", {-0.588, -0.724, 0.361}}, {"P6", {0.588, -0.724, 0.361}},
      {"T7", {-0.999, 0.0, 0.045}},  {"T8", {0.999, 0.0, 0.045}},
  };
  layout.routing = {
      {"delta", {{"Fz", "Cz"}}},
      {"theta", {{"F5", "P5"}, {"F6", "P6"}}},
      {"alpha", {{"P6", "Cz"}, {"F5", "Cz"}}},
      {"beta", {{"T7", "T8"}}},
  };
  return layout;
}

SynthConfig default_synth_config() {
  SynthConfig cfg;
  cfg.bands = default_bands();
  cfg.layout = default_layout();
  return cfg;
}

void SynthConfig::validate() const {
  if (!(sample_rate > 0.0)) {
    throw Error(ErrorKind::Config, "synth-eeg", "SynthConfig", "sample_rate",
                "sample rate must be positive");
  }
  if (n_samples < (1L << levels)) {
    throw Error(ErrorKind::Config, "synth-eeg", "SynthConfig", "n_samples",
                "need at least 2^levels samples");
  }
  if (levels < 1 || levels > 20) {
    throw Error(ErrorKind::Config, "synth-eeg", "SynthConfig", "levels",
                "levels out of range");
  }
  if (sensor_noise < 0.0 || source_sink_lag < 0) {
    throw Error(ErrorKind::Config, "synth-eeg", "SynthConfig", "sensor_noise",
                "noise and lag must be non-negative");
  }
  WaveletFilter::by_name(wavelet);
  layout.validate();
  std::set<std::string> band_names;
  for (const BandSpec& band : bands) {
    band_names.insert(band.name);
    if (band.level < 1 || band.level > levels) {
      throw Error(ErrorKind::Config, "synth-eeg", "SynthConfig", "level",
                  "band '" + band.name + "' level out of range");
    }
    // band edges must sit on the dyadic splits of sample_rate / 2
    const double top = sample_rate / std::pow(2.0, band.level + 1);
    const double expect_lo = band.is_approx ? 0.0 : top;
    const double expect_hi = band.is_approx ? top : 2.0 * top;
    if (std::abs(band.f_lo - expect_lo) > 1e-6 ||
        std::abs(band.f_hi - expect_hi) > 1e-6) {
      throw Error(ErrorKind::Config, "synth-eeg", "SynthConfig", "band",
                  "band '" + band.name + "' edges do not match its dyadic level");
    }
    if (!(band.high_activity.lo > 0.0) || !(band.low_activity.lo > 0.0) ||
        band.high_activity.hi < band.high_activity.lo ||
        band.low_activity.hi < band.low_activity.lo) {
      throw Error(ErrorKind::Config, "synth-eeg", "SynthConfig", "scale_law",
                  "band '" + band.name + "' has an invalid scale law");
    }
  }
  for (const BandRouting& route : layout.routing) {
    if (!band_names.count(route.band)) {
      throw Error(ErrorKind::Config, "synth-eeg", "SynthConfig", "routing",
                  "routing names unknown band '" + route.band + "'");
    }
  }
}

BandDraw draw_band_coefficients(const BandSpec& band, Activity activity,
                                long n_coeffs, double logistic_scale,
                                Rng& rng) {
  if (n_coeffs <= 0) {
    throw Error(ErrorKind::Parameter, "synth-eeg", "draw_band_coefficients",
                "n_coeffs", "need at least one coefficient");
  }
  const ScaleLaw& law =
      activity == Activity::High ? band.high_activity : band.low_activity;
  BandDraw draw;
  draw.scale = law.is_fixed() ? law.lo : rng.uniform(law.lo, law.hi);
  draw.coefficients.resize(static_cast<std::size_t>(n_coeffs));
  for (double& c : draw.coefficients) {
    c = draw.scale * rng.logistic(logistic_scale);
  }
  return draw;
}

long band_coefficient_count(const BandSpec& band, long n_samples, int levels) {
  const long padded = padded_length(n_samples, levels);
  return band.is_approx ? padded >> levels : padded >> band.level;
}

namespace {

std::vector<double> synthesize_padded(
    const WaveletFilter& filter, int levels, long padded,
    const std::vector<std::pair<const BandSpec*, std::vector<double>>>& parts) {
  DyadicBands bands;
  bands.approx.assign(static_cast<std::size_t>(padded >> levels), 0.0);
  bands.details.resize(static_cast<std::size_t>(levels));
  for (int level = 1; level <= levels; ++level) {
    bands.details[static_cast<std::size_t>(level - 1)].assign(
        static_cast<std::size_t>(padded >> level), 0.0);
  }
  for (const auto& [band, coeffs] : parts) {
    std::vector<double>& slot =
        band->is_approx ? bands.approx
                        : bands.details[static_cast<std::size_t>(band->level - 1)];
    if (coeffs.size() != slot.size()) {
      throw Error(ErrorKind::Parameter, "synth-eeg", "synthesize_source_signal",
                  "coefficients",
                  "band '" + band->name + "' expects " +
                      std::to_string(slot.size()) + " coefficients, got " +
                      std::to_string(coeffs.size()));
    }
    for (std::size_t i = 0; i < coeffs.size(); ++i) slot[i] += coeffs[i];
  }
  return idwt(filter, bands);
}

}  // namespace

std::vector<double> synthesize_source_signal(
    const WaveletFilter& filter, int levels, long n_samples,
    const std::vector<std::pair<const BandSpec*, std::vector<double>>>& parts,
    long* padded_to) {
  const long padded = padded_length(n_samples, levels);
  if (padded_to) *padded_to = padded;
  std::vector<double> signal = synthesize_padded(filter, levels, padded, parts);
  signal.resize(static_cast<std::size_t>(n_samples));
  return signal;
}

Eigen::MatrixXd mixing_weights(const std::vector<std::string>& source_names,
                               const ElectrodeLayout& layout) {
  layout.validate();
  if (source_names.empty()) {
    throw Error(ErrorKind::Parameter, "synth-eeg", "spatial_mix", "sources",
                "no source electrodes");
  }
  std::vector<int> src_index;
  src_index.reserve(source_names.size());
  for (const std::string& name : source_names) {
    const int idx = layout.index_of(name);
    if (idx < 0) {
      throw Error(ErrorKind::Config, "synth-eeg", "spatial_mix", "sources",
                  "source '" + name + "' not in layout");
    }
    src_index.push_back(idx);
  }

  const int n_e = static_cast<int>(layout.electrodes.size());
  const int n_s = static_cast<int>(source_names.size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_e, n_s);
  for (int e = 0; e < n_e; ++e) {
    std::vector<int> coincident;
    for (int s = 0; s < n_s; ++s) {
      if (great_circle(layout.electrodes[static_cast<std::size_t>(e)].position,
                       layout.electrodes[static_cast<std::size_t>(src_index[s])]
                           .position) < kPositionTolerance) {
        coincident.push_back(s);
      }
    }
    if (!coincident.empty()) {
      for (int s : coincident) w(e, s) = 1.0 / coincident.size();
      continue;
    }
    double total = 0.0;
    for (int s = 0; s < n_s; ++s) {
      const double d = great_circle(
          layout.electrodes[static_cast<std::size_t>(e)].position,
          layout.electrodes[static_cast<std::size_t>(src_index[s])].position);
      w(e, s) = 1.0 / (d * d);
      total += w(e, s);
    }
    w.row(e) /= total;
  }
  return w;
}

Eigen::MatrixXd spatial_mix(const std::vector<std::string>& source_names,
                            const Eigen::MatrixXd& source_signals,
                            const ElectrodeLayout& layout) {
  if (source_signals.rows() != static_cast<Eigen::Index>(source_names.size())) {
    throw Error(ErrorKind::Parameter, "synth-eeg", "spatial_mix", "signals",
                "one signal row per source required");
  }
  return mixing_weights(source_names, layout) * source_signals;
}

SyntheticTrial generate_trial(const SynthConfig& cfg, Activity activity,
                              int trial_index, std::uint64_t seed) {
  cfg.validate();
  const WaveletFilter& filter = WaveletFilter::by_name(cfg.wavelet);
  const long padded = padded_length(cfg.n_samples, cfg.levels);
  const std::uint64_t stream =
      static_cast<std::uint64_t>(trial_index) * 2 +
      (activity == Activity::High ? 1 : 0);
  Rng rng = Rng::derive(seed, stream);

  SyntheticTrial trial;
  trial.activity = activity;
  trial.seed = seed;
  trial.trial_index = trial_index;

  // one waveform per (band, source electrode); sinks receive a lagged copy
  std::vector<std::string> injected_names;
  std::vector<std::vector<double>> injected;
  injected_names.reserve(cfg.layout.electrodes.size());
  injected.reserve(cfg.layout.electrodes.size());
  auto injected_at = [&](const std::string& name) -> std::vector<double>& {
    for (std::size_t i = 0; i < injected_names.size(); ++i) {
      if (injected_names[i] == name) return injected[i];
    }
    injected_names.push_back(name);
    injected.emplace_back(static_cast<std::size_t>(padded), 0.0);
    return injected.back();
  };

  for (const BandSpec& band : cfg.bands) {
    const BandRouting* route = nullptr;
    for (const BandRouting& r : cfg.layout.routing) {
      if (r.band == band.name) route = &r;
    }
    if (!route) continue;

    std::vector<std::string> sources;
    for (const SourceSinkPair& pair : route->pairs) {
      if (std::find(sources.begin(), sources.end(), pair.source) ==
          sources.end()) {
        sources.push_back(pair.source);
      }
    }
    for (const std::string& source : sources) {
      const long count = band_coefficient_count(band, cfg.n_samples, cfg.levels);
      BandDraw draw = draw_band_coefficients(band, activity, count,
                                             cfg.logistic_scale, rng);
      trial.scale_draws[band.name + "/" + source] = draw.scale;
      const std::vector<double> wave = synthesize_padded(
          filter, cfg.levels, padded, {{&band, draw.coefficients}});

      std::vector<double>& src_sig = injected_at(source);
      for (long t = 0; t < padded; ++t) {
        src_sig[static_cast<std::size_t>(t)] += wave[static_cast<std::size_t>(t)];
      }
      const long lag = cfg.source_sink_lag % padded;
      for (const SourceSinkPair& pair : route->pairs) {
        if (pair.source != source) continue;
        std::vector<double>& sink_sig = injected_at(pair.sink);
        for (long t = 0; t < padded; ++t) {
          const long from = (t - lag + padded) % padded;
          sink_sig[static_cast<std::size_t>(t)] +=
              wave[static_cast<std::size_t>(from)];
        }
      }
    }
  }

  if (injected_names.empty()) {
    throw Error(ErrorKind::Config, "synth-eeg", "generate_trial", "routing",
                "no band routes through the layout");
  }

  Eigen::MatrixXd sources(injected_names.size(), cfg.n_samples);
  for (std::size_t i = 0; i < injected_names.size(); ++i) {
    for (long t = 0; t < cfg.n_samples; ++t) {
      sources(static_cast<Eigen::Index>(i), t) =
          injected[i][static_cast<std::size_t>(t)];
    }
  }

  Eigen::MatrixXd channels = spatial_mix(injected_names, sources, cfg.layout);
  if (cfg.sensor_noise > 0.0) {
    for (Eigen::Index e = 0; e < channels.rows(); ++e) {
      for (Eigen::Index t = 0; t < channels.cols(); ++t) {
        channels(e, t) += cfg.sensor_noise * rng.normal();
      }
    }
  }

  trial.recording.channels = std::move(channels);
  trial.recording.sample_rate = cfg.sample_rate;
  trial.recording.tags.assign(
      static_cast<std::size_t>(cfg.n_samples),
      activity == Activity::High ? cfg.tag_high : cfg.tag_low);
  for (const Electrode& e : cfg.layout.electrodes) {
    trial.recording.channel_names.push_back(e.name);
  }
  return trial;
}

std::vector<SyntheticTrial> generate_dataset(const SynthConfig& cfg,
                                             Activity activity, int n_trials,
                                             std::uint64_t seed, int threads) {
  cfg.validate();
  if (n_trials < 1) {
    throw Error(ErrorKind::Parameter, "synth-eeg", "generate_dataset",
                "n_trials", "need at least one trial");
  }
  std::vector<SyntheticTrial> trials(static_cast<std::size_t>(n_trials));
  parallel_for(
      n_trials,
      [&](int i) {
        trials[static_cast<std::size_t>(i)] =
            generate_trial(cfg, activity, i, seed);
      },
      threads);
  return trials;
}

// ---------------------------------------------------------------------------
// JSON config

namespace {

using nlohmann::json;

json scale_law_to_json(const ScaleLaw& law) {
  return json{{"lo", law.lo}, {"hi", law.hi}};
}

ScaleLaw scale_law_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), j.get<double>()};
  return {j.at("lo").get<double>(), j.at("hi").get<double>()};
}

}  // namespace

std::string synth_config_to_json_text(const SynthConfig& cfg) {
  json bands = json::array();
  for (const BandSpec& band : cfg.bands) {
    bands.push_back({{"name", band.name},
                     {"f_lo", band.f_lo},
                     {"f_hi", band.f_hi},
                     {"level", band.level},
                     {"is_approx", band.is_approx},
                     {"high", scale_law_to_json(band.high_activity)},
                     {"low", scale_law_to_json(band.low_activity)}});
  }
  json electrodes = json::array();
  for (const Electrode& e : cfg.layout.electrodes) {
    electrodes.push_back({{"name", e.name},
                          {"position", {e.position.x(), e.position.y(),
                                        e.position.z()}}});
  }
  json routing = json::array();
  for (const BandRouting& route : cfg.layout.routing) {
    json pairs = json::array();
    for (const SourceSinkPair& pair : route.pairs) {
      pairs.push_back({{"source", pair.source}, {"sink", pair.sink}});
    }
    routing.push_back({{"band", route.band}, {"pairs", pairs}});
  }
  const json j{{"sample_rate", cfg.sample_rate},
               {"n_samples", cfg.n_samples},
               {"levels", cfg.levels},
               {"wavelet", cfg.wavelet},
               {"logistic_scale", cfg.logistic_scale},
               {"bands", bands},
               {"electrodes", electrodes},
               {"routing", routing},
               {"source_sink_lag", cfg.source_sink_lag},
               {"sensor_noise", cfg.sensor_noise},
               {"tag_high", cfg.tag_high},
               {"tag_low", cfg.tag_low}};
  return j.dump(2);
}

SynthConfig synth_config_from_json_text(const std::string& text) {
  SynthConfig cfg = default_synth_config();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "synth-eeg", "synth_config_from_json",
                "json", e.what());
  }
  try {
    if (j.contains("sample_rate")) cfg.sample_rate = j["sample_rate"];
    if (j.contains("n_samples")) cfg.n_samples = j["n_samples"];
    if (j.contains("levels")) cfg.levels = j["levels"];
    if (j.contains("wavelet")) cfg.wavelet = j["wavelet"];
    if (j.contains("logistic_scale")) cfg.logistic_scale = j["logistic_scale"];
    if (j.contains("source_sink_lag")) cfg.source_sink_lag = j["source_sink_lag"];
    if (j.contains("sensor_noise")) cfg.sensor_noise = j["sensor_noise"];
    if (j.contains("tag_high")) cfg.tag_high = j["tag_high"].get<int>();
    if (j.contains("tag_low")) cfg.tag_low = j["tag_low"].get<int>();
    if (j.contains("bands")) {
      cfg.bands.clear();
      for (const json& jb : j["bands"]) {
        BandSpec band;
        band.name = jb.at("name");
        band.f_lo = jb.at("f_lo");
        band.f_hi = jb.at("f_hi");
        band.level = jb.at("level");
        band.is_approx = jb.at("is_approx");
        band.high_activity = scale_law_from_json(jb.at("high"));
        band.low_activity = scale_law_from_json(jb.at("low"));
        cfg.bands.push_back(band);
      }
    }
    if (j.contains("electrodes")) {
      cfg.layout.electrodes.clear();
      for (const json& je : j["electrodes"]) {
        Electrode e;
        e.name = je.at("name");
        const auto& pos = je.at("position");
        e.position = Eigen::Vector3d(pos.at(0), pos.at(1), pos.at(2));
        cfg.layout.electrodes.push_back(e);
      }
    }
    if (j.contains("routing")) {
      cfg.layout.routing.clear();
      for (const json& jr : j["routing"]) {
        BandRouting route;
        route.band = jr.at("band");
        for (const json& jp : jr.at("pairs")) {
          route.pairs.push_back({jp.at("source"), jp.at("sink")});
        }
        cfg.layout.routing.push_back(route);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "synth-eeg", "synth_config_from_json",
                "json", e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace causalflow
