// Serial versions of the network kernels. They walk nodes in index order on
// one thread and are what the OpenMP code is checked against.

#include <string>

#include "din/error.hpp"
#include "din/network.hpp"
#include "din/rng.hpp"

namespace din::reference {

DINModel train_network(const QuantizedDataset& data, const Topology& topology, const TrainingOptions& options) {
  data.validate();
  topology.validate();
  if (data.feature_count() != topology.feature_count() || data.n_class != topology.n_class())
    throw ValidationError("reference train: data does not match topology");

  DINModel model;
  model.topology = topology;
  model.beta = options.beta;
  model.tol = options.tol;
  model.max_iter = options.max_iter;
  model.seed = options.seed;
  for (std::size_t m = 0; m < data.n_class; ++m) model.class_names.push_back(std::to_string(m));

  std::vector<std::vector<int>> current = data.columns;
  IBSolution root;
  for (std::size_t L = 0; L < topology.layers.size(); ++L) {
    if (L > 0) current = detail::layer_inputs(topology, L, current);
    const bool last = L + 1 == topology.layers.size();
    std::vector<TrainedNode> layer;
    std::vector<std::vector<int>> outputs;
    for (std::size_t k = 0; k < topology.layers[L].nodes.size(); ++k) {
      const auto& s = topology.layers[L].nodes[k];
      layer.push_back(detail::train_node(current[k], data.labels, s.n_in, s.n_out, data.n_class, options, L, k,
                                         last ? &root : nullptr));
      if (!last) outputs.push_back(detail::training_outputs(layer.back(), current[k], options.seed, L, k));
    }
    model.nodes.push_back(std::move(layer));
    current = std::move(outputs);
  }
  model.class_alignment = detail::align_classes(root);
  return model;
}

std::vector<int> predict_quantized(const DINModel& model, std::span<const std::vector<int>> columns,
                                   const PredictionMode& mode) {
  const int repeats = mode.kind == PredictionMode::Kind::Ensemble ? mode.repeats : 1;
  std::vector<std::vector<int>> votes;
  for (int r = 0; r < repeats; ++r) {
    const std::uint64_t seed = detail::pass_seed(mode.seed, r);
    std::vector<std::vector<int>> current(columns.begin(), columns.end());
    for (std::size_t L = 0; L < model.topology.layers.size(); ++L) {
      if (L > 0) current = detail::layer_inputs(model.topology, L, current);
      for (std::size_t k = 0; k < current.size(); ++k)
        current[k] = detail::sample_channel(model.nodes[L][k].channel, current[k], derive_seed(seed, {L, k, 2}));
    }
    std::vector<int> labels = current.front();
    for (int& s : labels) s = model.class_alignment[static_cast<std::size_t>(s)];
    votes.push_back(std::move(labels));
  }
  return votes.size() == 1 ? votes.front() : detail::majority_vote(votes, model.topology.n_class());
}

}  // namespace din::reference
