#include "din/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>

#include "din/error.hpp"
#include "din/parallel.hpp"
#include "din/rng.hpp"

namespace din {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("config: '" + section + "' must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) throw ConfigError("config: unknown key '" + (section.empty() ? key : section + "." + key) + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: '" + (section.empty() ? std::string(key) : section + "." + key) + "' has the wrong type");
  }
}

FeatureKind kind_from(const std::string& s) {
  if (s == "auto") return FeatureKind::Auto;
  if (s == "continuous") return FeatureKind::Continuous;
  if (s == "categorical") return FeatureKind::Categorical;
  throw ConfigError("config: feature kind must be auto, continuous or categorical, got '" + s + "'");
}

const char* kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::Continuous: return "continuous";
    case FeatureKind::Categorical: return "categorical";
    default: return "auto";
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset.target.empty()) throw ConfigError("config: dataset.target is empty");
  if (quantizer.default_levels < 2) throw ConfigError("config: quantizer.default_levels must be >= 2");
  for (const auto& [name, o] : quantizer.features)
    if (o.levels && *o.levels < 2) throw ConfigError("config: levels for '" + name + "' must be >= 2");
  if (network.n_out.empty()) throw ConfigError("config: network.n_out is empty");
  for (std::size_t v : network.n_out)
    if (v < 1) throw ConfigError("config: network.n_out values must be >= 1");
  if (!(network.beta > 0.0)) throw ConfigError("config: network.beta must be > 0");
  if (!(network.tol > 0.0)) throw ConfigError("config: network.tol must be > 0");
  if (network.max_iter < 1) throw ConfigError("config: network.max_iter must be >= 1");
  if (split.n_train < 1) throw ConfigError("config: split.n_train must be >= 1");
  if (!(split.positive_fraction >= 0.0 && split.positive_fraction <= 1.0))
    throw ConfigError("config: split.positive_fraction must be in [0, 1]");
  if (runs < 1) throw ConfigError("config: runs must be >= 1");
  if (workers < 0) throw ConfigError("config: workers must be >= 0");
  if (prediction.repeats < 1) throw ConfigError("config: prediction.repeats must be >= 1");
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  reject_unknown(j, "", {"dataset", "quantizer", "network", "split", "runs", "workers", "seed", "prediction", "output"});
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    reject_unknown(d, "dataset", {"path", "format", "target", "missing_tokens", "delimiter", "positive_label"});
    read(d, "path", c.dataset.path, "dataset");
    if (d.contains("format")) {
      std::string f;
      read(d, "format", f, "dataset");
      if (f == "csv") c.dataset.format = DataFormat::Csv;
      else if (f == "arff") c.dataset.format = DataFormat::Arff;
      else throw ConfigError("config: dataset.format must be csv or arff, got '" + f + "'");
    }
    read(d, "target", c.dataset.target, "dataset");
    read(d, "missing_tokens", c.dataset.missing_tokens, "dataset");
    if (d.contains("delimiter")) {
      std::string s;
      read(d, "delimiter", s, "dataset");
      if (s.size() != 1) throw ConfigError("config: dataset.delimiter must be one character");
      c.dataset.delimiter = s[0];
    }
    read(d, "positive_label", c.dataset.positive_label, "dataset");
  }
  if (j.contains("quantizer")) {
    const auto& q = j["quantizer"];
    reject_unknown(q, "quantizer", {"default_levels", "categorical_threshold", "reserve_missing_symbol", "features"});
    read(q, "default_levels", c.quantizer.default_levels, "quantizer");
    read(q, "categorical_threshold", c.quantizer.categorical_threshold, "quantizer");
    read(q, "reserve_missing_symbol", c.quantizer.reserve_missing_symbol, "quantizer");
    if (q.contains("features")) {
      if (!q["features"].is_object()) throw ConfigError("config: 'quantizer.features' must be an object");
      for (const auto& [name, f] : q["features"].items()) {
        const std::string section = "quantizer.features." + name;
        reject_unknown(f, section, {"kind", "levels"});
        FeatureOverride o;
        if (f.contains("kind")) {
          std::string k;
          read(f, "kind", k, section);
          o.kind = kind_from(k);
        }
        if (f.contains("levels")) {
          int levels = 0;
          read(f, "levels", levels, section);
          o.levels = levels;
        }
        c.quantizer.features[name] = o;
      }
    }
  }
  if (j.contains("network")) {
    const auto& n = j["network"];
    reject_unknown(n, "network", {"n_out", "node_n_out", "beta", "tol", "max_iter"});
    if (n.contains("n_out")) {
      if (n["n_out"].is_number_unsigned()) c.network.n_out = {n["n_out"].get<std::size_t>()};
      else read(n, "n_out", c.network.n_out, "network");
    }
    if (n.contains("node_n_out")) {
      c.network.node_n_out.clear();
      for (const auto& o : n["node_n_out"]) {
        reject_unknown(o, "network.node_n_out[]", {"layer", "position", "n_out"});
        std::size_t layer = 0, pos = 0, v = 0;
        read(o, "layer", layer, "network.node_n_out[]");
        read(o, "position", pos, "network.node_n_out[]");
        read(o, "n_out", v, "network.node_n_out[]");
        c.network.node_n_out[{layer, pos}] = v;
      }
    }
    read(n, "beta", c.network.beta, "network");
    read(n, "tol", c.network.tol, "network");
    read(n, "max_iter", c.network.max_iter, "network");
  }
  if (j.contains("split")) {
    const auto& s = j["split"];
    reject_unknown(s, "split", {"n_train", "n_test", "stratify", "positive_fraction"});
    read(s, "n_train", c.split.n_train, "split");
    read(s, "n_test", c.split.n_test, "split");
    if (s.contains("stratify")) {
      std::string k;
      read(s, "stratify", k, "split");
      if (k == "none") c.split.stratify = Stratify::Kind::None;
      else if (k == "balanced") c.split.stratify = Stratify::Kind::Balanced;
      else throw ConfigError("config: split.stratify must be none or balanced, got '" + k + "'");
    }
    read(s, "positive_fraction", c.split.positive_fraction, "split");
  }
  read(j, "runs", c.runs, "");
  read(j, "workers", c.workers, "");
  read(j, "seed", c.seed, "");
  if (j.contains("prediction")) {
    const auto& p = j["prediction"];
    reject_unknown(p, "prediction", {"mode", "repeats"});
    if (p.contains("mode")) {
      std::string m;
      read(p, "mode", m, "prediction");
      if (m == "stochastic") c.prediction.mode = PredictionMode::Kind::Stochastic;
      else if (m == "ensemble") c.prediction.mode = PredictionMode::Kind::Ensemble;
      else throw ConfigError("config: prediction.mode must be stochastic or ensemble, got '" + m + "'");
    }
    read(p, "repeats", c.prediction.repeats, "prediction");
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    reject_unknown(o, "output", {"model", "metrics", "mi_flow"});
    read(o, "model", c.output.model, "output");
    read(o, "metrics", c.output.metrics, "output");
    read(o, "mi_flow", c.output.mi_flow, "output");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  json features = json::object();
  for (const auto& [name, o] : c.quantizer.features) {
    json f = json::object();
    if (o.kind) f["kind"] = kind_name(*o.kind);
    if (o.levels) f["levels"] = *o.levels;
    features[name] = f;
  }
  json overrides = json::array();
  for (const auto& [key, v] : c.network.node_n_out)
    overrides.push_back({{"layer", key.first}, {"position", key.second}, {"n_out", v}});
  return {{"dataset",
           {{"path", c.dataset.path},
            {"format", c.dataset.format == DataFormat::Arff ? "arff" : "csv"},
            {"target", c.dataset.target},
            {"missing_tokens", c.dataset.missing_tokens},
            {"delimiter", std::string(1, c.dataset.delimiter)},
            {"positive_label", c.dataset.positive_label}}},
          {"quantizer",
           {{"default_levels", c.quantizer.default_levels},
            {"categorical_threshold", c.quantizer.categorical_threshold},
            {"reserve_missing_symbol", c.quantizer.reserve_missing_symbol},
            {"features", features}}},
          {"network",
           {{"n_out", c.network.n_out},
            {"node_n_out", overrides},
            {"beta", c.network.beta},
            {"tol", c.network.tol},
            {"max_iter", c.network.max_iter}}},
          {"split",
           {{"n_train", c.split.n_train},
            {"n_test", c.split.n_test},
            {"stratify", c.split.stratify == Stratify::Kind::Balanced ? "balanced" : "none"},
            {"positive_fraction", c.split.positive_fraction}}},
          {"runs", c.runs},
          {"workers", c.workers},
          {"seed", c.seed},
          {"prediction",
           {{"mode", c.prediction.mode == PredictionMode::Kind::Ensemble ? "ensemble" : "stochastic"},
            {"repeats", c.prediction.repeats}}},
          {"output", {{"model", c.output.model}, {"metrics", c.output.metrics}, {"mi_flow", c.output.mi_flow}}}};
}

RunSeeds run_seeds(std::uint64_t master, std::size_t run) {
  const std::uint64_t r = derive_seed(master, {run});
  return {derive_seed(r, {1}), derive_seed(r, {2}), derive_seed(r, {3}), derive_seed(r, {4}), derive_seed(r, {5})};
}

int positive_class_index(const ExperimentConfig& config, const std::vector<std::string>& class_names) {
  if (class_names.empty()) throw DataError("dataset has no classes");
  if (config.dataset.positive_label.empty()) return 0;
  auto it = std::find(class_names.begin(), class_names.end(), config.dataset.positive_label);
  if (it == class_names.end())
    throw ConfigError("config: positive label '" + config.dataset.positive_label + "' is not a class of the dataset");
  return static_cast<int>(it - class_names.begin());
}

PredictionMode prediction_mode(const ExperimentConfig& config, std::uint64_t seed) {
  return config.prediction.mode == PredictionMode::Kind::Ensemble
             ? PredictionMode::ensemble(seed, config.prediction.repeats)
             : PredictionMode::stochastic(seed);
}

namespace {

Stratify stratify_of(const ExperimentConfig& config, const std::vector<std::string>& class_names) {
  Stratify s;
  s.kind = config.split.stratify;
  s.positive_fraction = config.split.positive_fraction;
  s.positive_label = class_names.at(static_cast<std::size_t>(positive_class_index(config, class_names)));
  return s;
}

}  // namespace

TrainedRun train_run(const ExperimentConfig& config, const RawDataset& data, std::size_t run, int threads) {
  const RunSeeds seeds = run_seeds(config.seed, run);
  const std::vector<std::string> class_names = data.class_names();
  const int positive = positive_class_index(config, class_names);

  TrainedRun out;
  out.split = split_indices(data, config.split.n_train, seeds.split, stratify_of(config, class_names), config.split.n_test);
  const RawDataset train = data.select_rows(out.split.train);
  std::vector<FeatureSpec> specs = fit_quantizers(train, config.quantizer);
  out.train_data = quantize_dataset(train, specs, class_names);

  const Topology topo = build_topology(out.train_data.feature_count(), config.network.n_out, class_names.size(),
                                       out.train_data.cardinalities, config.network.node_n_out);
  TrainingOptions opt{config.network.beta, config.network.tol, config.network.max_iter, seeds.train, threads};
  out.model = train_network(out.train_data, topo, opt);
  out.model.quantizers = std::move(specs);
  out.model.class_names = class_names;

  const auto predicted =
      predict_quantized(out.model, out.train_data.columns, prediction_mode(config, seeds.predict_train), threads);
  out.train_metrics = compute_metrics(predicted, out.train_data.labels, positive);
  return out;
}

Metrics evaluate_rows(const ExperimentConfig& config, const DINModel& model, const RawDataset& rows,
                      std::uint64_t seed, int threads) {
  const int positive = positive_class_index(config, model.class_names);
  const std::vector<int> actual = encode_labels(rows.target, model.class_names);
  const std::vector<int> predicted = predict(model, rows, prediction_mode(config, seed), threads);
  return compute_metrics(predicted, actual, positive);
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RawDataset& data, const ProgressFn& progress) {
  config.validate();
  ExperimentReport report;
  report.runs.resize(static_cast<std::size_t>(config.runs));
  std::mutex progress_mutex;
  const int workers = config.workers > 0 ? config.workers : max_threads();
  // Runs are the parallel unit here; nodes inside a run train serially.
  parallel_for(
      config.runs,
      [&](std::ptrdiff_t i) {
        const auto run = static_cast<std::size_t>(i);
        RunResult r;
        r.run = run;
        try {
          TrainedRun tr = train_run(config, data, run, 1);
          r.train = tr.train_metrics;
          r.test = evaluate_rows(config, tr.model, data.select_rows(tr.split.test),
                                 run_seeds(config.seed, run).predict_test, 1);
        } catch (const std::exception& e) {
          throw RunFailure(run, e.what());
        }
        report.runs[run] = r;
        if (progress) {
          std::lock_guard lock(progress_mutex);
          progress(r);
        }
      },
      workers);
  std::vector<Metrics> train, test;
  for (const auto& r : report.runs) {
    train.push_back(r.train);
    test.push_back(r.test);
  }
  report.train = aggregate(train);
  report.test = aggregate(test);
  return report;
}

json metrics_to_json(const Metrics& m) {
  return {{"accuracy", m.accuracy},         {"sensitivity", m.sensitivity}, {"specificity", m.specificity},
          {"f1", m.f1},                     {"tp", m.confusion.tp},         {"tn", m.confusion.tn},
          {"fp", m.confusion.fp},           {"fn", m.confusion.fn}};
}

namespace {

json summary_json(const AggregateMetrics& a) {
  auto one = [](const MetricSummary& s) { return json{{"mean", s.mean}, {"std", s.std}}; };
  return {{"accuracy", one(a.accuracy)}, {"sensitivity", one(a.sensitivity)}, {"specificity", one(a.specificity)},
          {"f1", one(a.f1)}};
}

}  // namespace

json report_to_json(const ExperimentReport& report, const ExperimentConfig& config) {
  json runs = json::array();
  for (const auto& r : report.runs)
    runs.push_back({{"run", r.run}, {"train", metrics_to_json(r.train)}, {"test", metrics_to_json(r.test)}});
  return {{"config", config_to_json(config)},
          {"runs", static_cast<int>(report.runs.size())},
          {"train", summary_json(report.train)},
          {"test", summary_json(report.test)},
          {"per_run", runs}};
}

RawDataset load_configured_dataset(const ExperimentConfig& config) {
  LoadOptions opt;
  opt.format = config.dataset.format;
  opt.target = config.dataset.target;
  opt.missing_tokens = config.dataset.missing_tokens;
  opt.delimiter = config.dataset.delimiter;
  return load_dataset(config.dataset.path, opt);
}

}  // namespace din
