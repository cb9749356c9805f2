// din: train, evaluate and inspect Deep Information Networks from the shell.
//
// Standard output carries only the final JSON document of a command; progress
// records and errors go to standard error, one JSON object per line.
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "din/analysis.hpp"
#include "din/dataio.hpp"
#include "din/experiment.hpp"
#include "din/model_io.hpp"
#include "din/synthetic.hpp"
#include "fetch.hpp"

namespace {

using nlohmann::json;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

constexpr const char* kDefaultUrl = "https://archive.ics.uci.edu/static/public/336/chronic+kidney+disease.zip";

/// Command-line values layered over the config file. Only options the user
/// actually passed are applied.
struct Overrides {
  std::string config;
  std::string data, format, target, positive_label, stratify, mode;
  std::vector<std::size_t> n_out;
  double beta = 0.0, positive_fraction = 0.0;
  std::size_t n_train = 0, n_test = 0;
  int runs = 0, workers = 0, repeats = 0, levels = 0, max_iter = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  std::string model_path, metrics_path, mi_flow_path;
  std::vector<CLI::Option*> given;

  /// True when `--name` was passed to whichever subcommand ran.
  bool has(const std::string& name) const {
    for (const auto* opt : given)
      if (opt->count() > 0 && opt->check_lname(name.substr(2))) return true;
    return false;
  }
};

void add_config_options(CLI::App& cmd, Overrides& o, bool experiment_knobs) {
  auto add = [&](const std::string& flags, auto& target, const std::string& help) {
    o.given.push_back(cmd.add_option(flags, target, help));
  };
  add("-c,--config", o.config, "JSON config file (comments allowed)");
  add("--data", o.data, "dataset path");
  add("--format", o.format, "csv or arff");
  add("--target", o.target, "target column name");
  add("--positive-label", o.positive_label, "class counted as positive");
  add("--seed", o.seed, "master seed");
  add("--n-out", o.n_out, "output symbols per layer (one value, one per hidden layer, or one per layer)");
  o.given.back()->delimiter(',');
  add("--beta", o.beta, "IB trade-off parameter");
  add("--tol", o.tol, "IB convergence tolerance");
  add("--max-iter", o.max_iter, "IB iteration cap");
  add("--levels", o.levels, "default quantization levels for continuous features");
  add("--n-train", o.n_train, "training rows");
  add("--n-test", o.n_test, "test rows (0: all remaining)");
  add("--stratify", o.stratify, "none or balanced");
  add("--positive-fraction", o.positive_fraction, "positive share of the training rows when balanced");
  add("--mode", o.mode, "stochastic or ensemble");
  add("--repeats", o.repeats, "passes per prediction in ensemble mode");
  if (experiment_knobs) {
    add("--runs", o.runs, "number of random splits");
    add("--workers", o.workers, "concurrent runs (0: all cores)");
  }
}

din::ExperimentConfig resolve_config(const Overrides& o) {
  din::ExperimentConfig c = o.config.empty() ? din::ExperimentConfig{} : din::load_config(o.config);
  if (o.has("--data")) c.dataset.path = o.data;
  if (o.has("--format")) {
    if (o.format == "csv") c.dataset.format = din::DataFormat::Csv;
    else if (o.format == "arff") c.dataset.format = din::DataFormat::Arff;
    else throw din::ConfigError("--format must be csv or arff");
  } else if (o.has("--data")) {
    // A recognised extension wins over the config; anything else keeps it.
    const auto ext = std::filesystem::path(o.data).extension();
    if (ext == ".arff") c.dataset.format = din::DataFormat::Arff;
    else if (ext == ".csv") c.dataset.format = din::DataFormat::Csv;
    else if (!o.has("--config")) c.dataset.format = din::DataFormat::Csv;
  }
  if (o.has("--target")) c.dataset.target = o.target;
  if (o.has("--positive-label")) c.dataset.positive_label = o.positive_label;
  if (o.has("--seed")) c.seed = o.seed;
  if (o.has("--n-out")) c.network.n_out = o.n_out;
  if (o.has("--beta")) c.network.beta = o.beta;
  if (o.has("--tol")) c.network.tol = o.tol;
  if (o.has("--max-iter")) c.network.max_iter = o.max_iter;
  if (o.has("--levels")) c.quantizer.default_levels = o.levels;
  if (o.has("--n-train")) c.split.n_train = o.n_train;
  if (o.has("--n-test")) c.split.n_test = o.n_test;
  if (o.has("--stratify")) {
    if (o.stratify == "none") c.split.stratify = din::Stratify::Kind::None;
    else if (o.stratify == "balanced") c.split.stratify = din::Stratify::Kind::Balanced;
    else throw din::ConfigError("--stratify must be none or balanced");
  }
  if (o.has("--positive-fraction")) c.split.positive_fraction = o.positive_fraction;
  if (o.has("--mode")) {
    if (o.mode == "stochastic") c.prediction.mode = din::PredictionMode::Kind::Stochastic;
    else if (o.mode == "ensemble") c.prediction.mode = din::PredictionMode::Kind::Ensemble;
    else throw din::ConfigError("--mode must be stochastic or ensemble");
  }
  if (o.has("--repeats")) c.prediction.repeats = o.repeats;
  if (o.has("--runs")) c.runs = o.runs;
  if (o.has("--workers")) c.workers = o.workers;
  if (o.has("--model")) c.output.model = o.model_path;
  if (o.has("--metrics")) c.output.metrics = o.metrics_path;
  if (o.has("--mi-flow")) c.output.mi_flow = o.mi_flow_path;
  c.validate();
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw din::Error("cannot write '" + path + "'");
  out << text;
}

void progress_line(const json& j) { std::cerr << j.dump() << '\n' << std::flush; }

/// Rows selected by --rows, reproducing the split of the given run.
din::RawDataset select(const din::ExperimentConfig& c, const din::RawDataset& data, const std::string& rows,
                       std::size_t run) {
  if (rows == "all") return data;
  const auto names = data.class_names();
  din::Stratify s;
  s.kind = c.split.stratify;
  s.positive_fraction = c.split.positive_fraction;
  s.positive_label = names.at(static_cast<std::size_t>(din::positive_class_index(c, names)));
  const auto idx = din::split_indices(data, c.split.n_train, din::run_seeds(c.seed, run).split, s, c.split.n_test);
  return data.select_rows(rows == "train" ? idx.train : idx.test);
}

json flow_summary(const din::MIFlowReport& flow) {
  const auto violations = din::check_bounds(flow, 1e-6);
  json v = json::array();
  for (const auto& b : violations) v.push_back({{"layer", b.layer}, {"position", b.position}, {"message", b.message}});
  return {{"max_output_information_per_layer", din::max_output_information_per_layer(flow)},
          {"bound_violations", v}};
}

int cmd_train(const Overrides& o, std::size_t run) {
  const auto c = resolve_config(o);
  const auto data = din::load_configured_dataset(c);
  const auto tr = din::train_run(c, data, run);
  din::save_model(tr.model, c.output.model);

  const auto flow = din::mi_flow(tr.model, tr.train_data, din::run_seeds(c.seed, run).flow);
  if (!c.output.mi_flow.empty()) {
    std::ofstream csv(c.output.mi_flow, std::ios::trunc);
    if (!csv) throw din::Error("cannot write '" + c.output.mi_flow + "'");
    din::write_mi_flow_csv(flow, csv);
  }
  json report{{"command", "train"},
              {"run", run},
              {"rows", tr.split.train.size()},
              {"train", din::metrics_to_json(tr.train_metrics)},
              {"layer_sizes", tr.model.topology.layer_sizes()},
              {"mi_flow", flow_summary(flow)},
              {"model", c.output.model}};
  const std::string text = report.dump(2) + "\n";
  write_text(c.output.metrics, text);
  std::cout << text;
  return 0;
}

int cmd_evaluate(const Overrides& o, const std::string& model_path, const std::string& rows, std::size_t run,
                 std::optional<std::uint64_t> predict_seed) {
  const auto c = resolve_config(o);
  const auto model = din::load_model(model_path);
  const auto data = din::load_configured_dataset(c);
  const auto chosen = select(c, data, rows, run);
  const auto seeds = din::run_seeds(c.seed, run);
  const std::uint64_t seed = predict_seed.value_or(rows == "train" ? seeds.predict_train : seeds.predict_test);
  const auto m = din::evaluate_rows(c, model, chosen, seed);
  json report{{"command", "evaluate"}, {"run", run}, {"rows", rows}, {"count", chosen.rows()},
              {"metrics", din::metrics_to_json(m)}};
  const std::string text = report.dump(2) + "\n";
  if (o.has("--metrics")) write_text(c.output.metrics, text);
  std::cout << text;
  return 0;
}

int cmd_experiment(const Overrides& o) {
  const auto c = resolve_config(o);
  const auto data = din::load_configured_dataset(c);
  progress_line({{"event", "start"}, {"runs", c.runs}, {"rows", data.rows()}});
  const auto report = din::run_experiment(c, data, [](const din::RunResult& r) {
    progress_line({{"event", "run"},
                   {"run", r.run},
                   {"train_accuracy", r.train.accuracy},
                   {"test_accuracy", r.test.accuracy},
                   {"test_f1", r.test.f1}});
  });
  const std::string text = din::report_to_json(report, c).dump(2) + "\n";
  write_text(c.output.metrics, text);
  std::cout << text;
  return 0;
}

int cmd_inspect(const Overrides& o, const std::string& model_path, const std::string& rows, std::size_t run,
                std::optional<std::uint64_t> flow_seed) {
  const auto c = resolve_config(o);
  const auto model = din::load_model(model_path);
  if (model.quantizers.empty()) throw din::DataError("model has no quantizers; it was trained on pre-quantized data");
  const auto data = din::load_configured_dataset(c);
  const auto chosen = select(c, data, rows, run);
  const auto q = din::quantize_dataset(chosen, model.quantizers, model.class_names);
  const auto flow = din::mi_flow(model, q, flow_seed.value_or(din::run_seeds(c.seed, run).flow));
  std::ofstream csv(c.output.mi_flow, std::ios::trunc);
  if (!csv) throw din::Error("cannot write '" + c.output.mi_flow + "'");
  din::write_mi_flow_csv(flow, csv);
  json report = flow_summary(flow);
  report["command"] = "inspect";
  report["rows"] = chosen.rows();
  report["mi_flow"] = c.output.mi_flow;
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_fetch(const std::string& url, const std::string& out_dir, const std::string& expected_sha) {
  progress_line({{"event", "download"}, {"url", url}});
  const std::string body = din::fetch::download(url);
  const std::string digest = din::fetch::sha256_hex(body);
  if (!expected_sha.empty() && digest != expected_sha)
    throw din::Error("checksum mismatch for '" + url + "': expected " + expected_sha + ", got " + digest);
  if (expected_sha.empty())
    progress_line({{"event", "warning"}, {"message", "no --sha256 given; record the digest below to pin it"},
                   {"sha256", digest}});

  std::filesystem::create_directories(out_dir);
  json files = json::array();
  const bool is_zip = body.size() >= 4 && body.compare(0, 4, "PK\x03\x04") == 0;
  if (is_zip) {
    const auto entries = din::fetch::unzip(body, ".arff");
    if (entries.empty()) throw din::DataError("archive from '" + url + "' contains no .arff file");
    for (const auto& e : entries) {
      const auto path = std::filesystem::path(out_dir) / std::filesystem::path(e.name).filename();
      write_text(path.string(), e.data);
      files.push_back(path.string());
    }
  } else {
    const auto name = std::filesystem::path(url).filename().string();
    const auto path = std::filesystem::path(out_dir) / (name.empty() ? "download.arff" : name);
    write_text(path.string(), body);
    files.push_back(path.string());
  }
  std::cout << json{{"command", "fetch-data"}, {"url", url}, {"sha256", digest}, {"verified", !expected_sha.empty()},
                    {"files", files}}
                   .dump(2)
            << "\n";
  return 0;
}

int cmd_synth(const din::SyntheticOptions& opt, const std::string& out) {
  const auto data = din::make_ckd_like(opt);
  std::ofstream f(out, std::ios::trunc);
  if (!f) throw din::Error("cannot write '" + out + "'");
  din::write_csv(data, f);
  std::cout << json{{"command", "synth"}, {"rows", data.rows()}, {"features", data.feature_count()}, {"path", out}}
                   .dump(2)
            << "\n";
  return 0;
}

int report_error(const char* kind, const std::string& message, int code) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep Information Network classifier"};
  app.require_subcommand(1);

  Overrides o;
  std::size_t run = 0;
  std::string model_path = "model.json", rows = "test";
  std::uint64_t seed_override = 0;

  auto* train = app.add_subcommand("train", "train one run and write model, metrics and MI-flow CSV");
  add_config_options(*train, o, false);
  train->add_option("--run", run, "run index selecting the split and seeds");
  o.given.push_back(train->add_option("--model", o.model_path, "model output path"));
  o.given.push_back(train->add_option("--metrics", o.metrics_path, "metrics JSON output path"));
  o.given.push_back(train->add_option("--mi-flow", o.mi_flow_path, "MI-flow CSV output path"));

  auto* evaluate = app.add_subcommand("evaluate", "score a saved model on dataset rows");
  add_config_options(*evaluate, o, false);
  evaluate->add_option("--model", model_path, "saved model")->required();
  evaluate->add_option("--rows", rows, "test, train or all")->check(CLI::IsMember({"test", "train", "all"}));
  evaluate->add_option("--run", run, "run index whose split selects the rows");
  auto* eval_seed = evaluate->add_option("--predict-seed", seed_override, "prediction seed (default: derived)");
  o.given.push_back(evaluate->add_option("--metrics", o.metrics_path, "also write the report here"));

  auto* experiment = app.add_subcommand("experiment", "repeat split/train/evaluate and aggregate");
  add_config_options(*experiment, o, true);
  o.given.push_back(experiment->add_option("--metrics", o.metrics_path, "report output path"));

  auto* inspect = app.add_subcommand("inspect", "write the MI-flow CSV of a saved model on dataset rows");
  add_config_options(*inspect, o, false);
  inspect->add_option("--model", model_path, "saved model")->required();
  inspect->add_option("--rows", rows, "test, train or all")->check(CLI::IsMember({"test", "train", "all"}));
  inspect->add_option("--run", run, "run index whose split selects the rows");
  auto* flow_seed = inspect->add_option("--flow-seed", seed_override, "propagation seed (default: derived)");
  o.given.push_back(inspect->add_option("--mi-flow", o.mi_flow_path, "MI-flow CSV output path"));

  std::string url = kDefaultUrl, out_dir = "data", sha;
  auto* fetch = app.add_subcommand("fetch-data", "download the Chronic Kidney Disease dataset");
  fetch->add_option("--url", url, "archive or .arff URL (file:// works)");
  fetch->add_option("--out-dir", out_dir, "destination directory");
  fetch->add_option("--sha256", sha, "expected SHA-256 of the download");

  din::SyntheticOptions synth_opt;
  std::string synth_out = "synthetic.csv";
  auto* synth = app.add_subcommand("synth", "write a synthetic kidney-disease-like CSV");
  synth->add_option("--rows", synth_opt.rows, "rows");
  synth->add_option("--seed", synth_opt.seed, "generator seed");
  synth->add_option("--missing-scale", synth_opt.missing_scale, "multiplier on the per-column missing rates");
  synth->add_flag("--separable", synth_opt.separable, "plant a deterministic class rule");
  synth->add_option("-o,--out", synth_out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report_error("usage", e.what(), kExitUsage);
  }

  try {
    if (train->parsed()) return cmd_train(o, run);
    if (evaluate->parsed())
      return cmd_evaluate(o, model_path, rows, run,
                          eval_seed->count() ? std::optional<std::uint64_t>(seed_override) : std::nullopt);
    if (experiment->parsed()) return cmd_experiment(o);
    if (inspect->parsed())
      return cmd_inspect(o, model_path, rows, run,
                         flow_seed->count() ? std::optional<std::uint64_t>(seed_override) : std::nullopt);
    if (fetch->parsed()) return cmd_fetch(url, out_dir, sha);
    if (synth->parsed()) return cmd_synth(synth_opt, synth_out);
  } catch (const din::ConfigError& e) {
    return report_error("config", e.what(), kExitUsage);
  } catch (const din::MissingFileError& e) {
    return report_error("missing_file", e.what(), kExitUsage);
  } catch (const din::RunFailure& e) {
    return report_error("run", e.what(), kExitRuntime);
  } catch (const din::ModelFileError& e) {
    return report_error("model_file", e.what(), kExitRuntime);
  } catch (const din::DataError& e) {
    return report_error("data", e.what(), kExitRuntime);
  } catch (const std::exception& e) {
    return report_error("runtime", e.what(), kExitRuntime);
  }
  return kExitUsage;
}
