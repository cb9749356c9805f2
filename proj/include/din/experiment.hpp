#pragma once

// Experiment configuration and the split -> fit -> train -> evaluate loop
// shared by the command-line tool and the acceptance suite.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "din/dataio.hpp"
#include "din/error.hpp"
#include "din/metrics.hpp"
#include "din/network.hpp"
#include "din/quantizer.hpp"

namespace din {

struct DatasetConfig {
  std::string path = "data/chronic_kidney_disease_full.arff";
  DataFormat format = DataFormat::Arff;
  std::string target = "class";
  std::vector<std::string> missing_tokens{"?", ""};
  char delimiter = ',';
  /// Class counted as positive for sensitivity/specificity; empty = first class.
  std::string positive_label = "ckd";
};

struct SplitConfig {
  std::size_t n_train = 200;
  std::size_t n_test = 0;  ///< 0: every row not used for training
  Stratify::Kind stratify = Stratify::Kind::Balanced;
  double positive_fraction = 0.5;
};

struct NetworkConfig {
  std::vector<std::size_t> n_out{3};
  NodeOutOverrides node_n_out;
  double beta = 5.0;
  double tol = 1e-8;
  int max_iter = 500;
};

struct PredictionConfig {
  PredictionMode::Kind mode = PredictionMode::Kind::Stochastic;
  int repeats = 1;
};

struct OutputConfig {
  std::string model = "model.json";
  std::string metrics = "metrics.json";
  std::string mi_flow = "mi_flow.csv";
};

/// Every field defaults to the reference Kidney Disease setup.
struct ExperimentConfig {
  DatasetConfig dataset;
  QuantizerConfig quantizer;
  NetworkConfig network;
  SplitConfig split;
  int runs = 1000;
  int workers = 0;  ///< concurrent runs; 0 = OpenMP default
  std::uint64_t seed = 1;
  PredictionConfig prediction;
  OutputConfig output;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Unknown keys are rejected so typos do not silently fall back to defaults.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Independent seeds used inside one run, derived from (master seed, run).
struct RunSeeds {
  std::uint64_t split;
  std::uint64_t train;
  std::uint64_t predict_train;
  std::uint64_t predict_test;
  std::uint64_t flow;
};
RunSeeds run_seeds(std::uint64_t master, std::size_t run);

int positive_class_index(const ExperimentConfig& config, const std::vector<std::string>& class_names);

PredictionMode prediction_mode(const ExperimentConfig& config, std::uint64_t seed);

struct TrainedRun {
  DINModel model;
  SplitIndices split;
  QuantizedDataset train_data;
  Metrics train_metrics;
};

/// Split, fit quantizers on the training rows, build the topology and train.
TrainedRun train_run(const ExperimentConfig& config, const RawDataset& data, std::size_t run, int threads = 0);

/// Metrics of the model on the given rows, predicting with `seed`.
Metrics evaluate_rows(const ExperimentConfig& config, const DINModel& model, const RawDataset& rows,
                      std::uint64_t seed, int threads = 0);

struct RunResult {
  std::size_t run = 0;
  Metrics train;
  Metrics test;
};

struct ExperimentReport {
  std::vector<RunResult> runs;
  AggregateMetrics train;
  AggregateMetrics test;
};

/// A run of an experiment failed; the message is prefixed with the run index.
class RunFailure : public Error {
 public:
  RunFailure(std::size_t run, const std::string& what) : Error("run " + std::to_string(run) + ": " + what), run_(run) {}
  std::size_t run() const noexcept { return run_; }

 private:
  std::size_t run_;
};

using ProgressFn = std::function<void(const RunResult&)>;

/// Runs are independent and may execute concurrently; results are ordered
/// by run index and do not depend on the worker count.
ExperimentReport run_experiment(const ExperimentConfig& config, const RawDataset& data, const ProgressFn& progress = {});

nlohmann::json metrics_to_json(const Metrics& m);
nlohmann::json report_to_json(const ExperimentReport& report, const ExperimentConfig& config);

RawDataset load_configured_dataset(const ExperimentConfig& config);

}  // namespace din
