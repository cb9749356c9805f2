#pragma once

// Layered tree of information nodes joined by multiplexers.
//
// Layer 0 has one node per feature. Each later layer groups adjacent nodes of
// the previous layer in pairs (the last group of an odd-width layer takes
// three), concatenates their outputs with a mixed-radix multiplexer and feeds
// the result to one node. The single node of the last layer emits N_class
// symbols.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "din/dataset.hpp"
#include "din/ib_solver.hpp"
#include "din/quantizer.hpp"

namespace din {

struct NodeShape {
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  bool operator==(const NodeShape&) const = default;
};

struct Layer {
  std::vector<NodeShape> nodes;
  /// groups[k]: indices of previous-layer nodes multiplexed into node k, in
  /// digit order (first member is the low-order digit). Empty for layer 0.
  std::vector<std::vector<std::size_t>> groups;
  bool operator==(const Layer&) const = default;
};

struct Topology {
  std::vector<Layer> layers;

  std::size_t depth() const noexcept { return layers.empty() ? 0 : layers.size() - 1; }
  std::size_t feature_count() const noexcept { return layers.empty() ? 0 : layers.front().nodes.size(); }
  std::size_t node_count() const noexcept;
  std::size_t mixer_count() const noexcept;
  std::size_t n_class() const noexcept { return layers.back().nodes.front().n_out; }
  std::vector<std::size_t> layer_sizes() const;
  /// Throws ConfigError when the tree is inconsistent (cardinality law,
  /// single root, group coverage).
  void validate() const;

  bool operator==(const Topology&) const = default;
};

/// Per-node output-cardinality override, keyed by (layer, position).
using NodeOutOverrides = std::map<std::pair<std::size_t, std::size_t>, std::size_t>;

/// Largest multiplexer output alphabet accepted by build_topology.
inline constexpr std::size_t kMaxNodeInputs = std::size_t{1} << 24;

/// n_out_per_layer may hold one value (used for every non-final layer), one
/// value per non-final layer, or one per layer with the last equal to n_class.
Topology build_topology(std::size_t feature_count, std::span<const std::size_t> n_out_per_layer,
                        std::size_t n_class, std::span<const std::size_t> feature_cardinalities,
                        const NodeOutOverrides& overrides = {});

/// Mixed radix: v0 + r0*v1 + r0*r1*v2 + ...
std::vector<int> mux_combine(std::span<const std::vector<int>> inputs, std::span<const std::size_t> radices);
/// Digits of one multiplexed symbol, low-order first.
std::vector<int> mux_decode(std::size_t value, std::span<const std::size_t> radices);

struct TrainedNode {
  ConditionalMatrix channel;
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  IBDiagnostics diagnostics;
  double mi_in_y = 0.0;   ///< I(X_in;Y) on the training data, bits
  double mi_out_y = 0.0;  ///< I(X_out;Y) through the learned channel, bits
};

struct DINModel {
  Topology topology;
  std::vector<std::vector<TrainedNode>> nodes;  ///< [layer][position]
  std::vector<FeatureSpec> quantizers;          ///< empty when trained on pre-quantized data
  std::vector<std::string> class_names;
  /// class_alignment[j]: class predicted when the root emits symbol j.
  std::vector<int> class_alignment;
  double beta = 5.0;
  double tol = 1e-8;
  int max_iter = 500;
  std::uint64_t seed = 0;

  const TrainedNode& node(std::size_t layer, std::size_t position) const { return nodes.at(layer).at(position); }
  /// Throws ValidationError when counts, shapes or the alignment are inconsistent.
  void validate() const;
};

struct TrainingOptions {
  double beta = 5.0;
  double tol = 1e-8;
  int max_iter = 500;
  std::uint64_t seed = 0;
  int threads = 0;  ///< 0: OpenMP default
};

/// Trains layer by layer; nodes of one layer are trained in parallel.
DINModel train_network(const QuantizedDataset& data, const Topology& topology, const TrainingOptions& options);
inline DINModel train_network(const QuantizedDataset& data, const Topology& topology, double beta, double tol,
                              int max_iter, std::uint64_t seed) {
  return train_network(data, topology, TrainingOptions{beta, tol, max_iter, seed, 0});
}

struct PredictionMode {
  enum class Kind { Stochastic, Ensemble };
  Kind kind = Kind::Stochastic;
  std::uint64_t seed = 0;
  int repeats = 1;  ///< ensemble only

  static PredictionMode stochastic(std::uint64_t seed) { return {Kind::Stochastic, seed, 1}; }
  static PredictionMode ensemble(std::uint64_t seed, int repeats) { return {Kind::Ensemble, seed, repeats}; }
};

/// Node inputs and outputs of one stochastic pass, [layer][position][row].
struct PassTrace {
  std::vector<std::vector<std::vector<int>>> inputs;
  std::vector<std::vector<std::vector<int>>> outputs;
};

/// One stochastic pass over quantized columns, keeping every intermediate vector.
PassTrace run_pass(const DINModel& model, std::span<const std::vector<int>> columns, std::uint64_t seed,
                   int threads = 0);

/// Class indices for quantized columns.
std::vector<int> predict_quantized(const DINModel& model, std::span<const std::vector<int>> columns,
                                   const PredictionMode& mode, int threads = 0);

/// Quantizes raw rows with the model's specs (matched by column name) and predicts.
std::vector<int> predict(const DINModel& model, const RawDataset& rows, const PredictionMode& mode,
                         int threads = 0);

// Building blocks shared by the parallel and the reference implementations.
namespace detail {

/// Draws out[n] ~ channel(in[n], .) using one uniform per row.
std::vector<int> sample_channel(const ConditionalMatrix& channel, std::span<const int> inputs, std::uint64_t seed);

/// Node inputs of `layer` from the previous layer's outputs.
std::vector<std::vector<int>> layer_inputs(const Topology& topology, std::size_t layer,
                                           const std::vector<std::vector<int>>& previous_outputs);

/// Estimate + solve + sample for one node.
TrainedNode train_node(std::span<const int> inputs, std::span<const int> labels, std::size_t n_in, std::size_t n_out,
                       std::size_t n_class, const TrainingOptions& options, std::size_t layer, std::size_t position,
                       IBSolution* solution_out = nullptr);

/// Training-phase output stream of a node.
std::vector<int> training_outputs(const TrainedNode& node, std::span<const int> inputs, std::uint64_t seed,
                                  std::size_t layer, std::size_t position);

/// Bijection from root symbols to classes maximizing the joint mass on the
/// chosen pairs; per-symbol argmax (ties toward the smaller class) when that
/// is already a bijection.
std::vector<int> align_classes(const IBSolution& root);

/// Seed of the r-th stochastic pass of a prediction; r = 0 is the seed itself.
std::uint64_t pass_seed(std::uint64_t seed, int repeat);

std::vector<int> majority_vote(const std::vector<std::vector<int>>& votes, std::size_t n_class);

}  // namespace detail

/// Serial implementations kept as the reference the parallel code is tested against.
namespace reference {
DINModel train_network(const QuantizedDataset& data, const Topology& topology, const TrainingOptions& options);
std::vector<int> predict_quantized(const DINModel& model, std::span<const std::vector<int>> columns,
                                   const PredictionMode& mode);
}  // namespace reference

}  // namespace din
