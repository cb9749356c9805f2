#include "din/network.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "din/error.hpp"
#include "din/parallel.hpp"
#include "din/rng.hpp"

namespace din {

namespace {

std::string at(std::size_t layer, std::size_t position) {
  return "node (" + std::to_string(position) + "," + std::to_string(layer) + ")";
}

// Adjacent pairs; an odd-width layer ends with one group of three.
std::vector<std::vector<std::size_t>> pair_up(std::size_t count) {
  std::vector<std::vector<std::size_t>> groups;
  const std::size_t n_groups = count / 2;
  for (std::size_t g = 0; g < n_groups; ++g) {
    std::vector<std::size_t> grp{2 * g, 2 * g + 1};
    if (g + 1 == n_groups && count % 2 == 1) grp.push_back(2 * g + 2);
    groups.push_back(std::move(grp));
  }
  return groups;
}

// Streams: solve, training-phase sampling, prediction sampling.
constexpr std::uint64_t kSolveStream = 0;
constexpr std::uint64_t kTrainSampleStream = 1;
constexpr std::uint64_t kPredictSampleStream = 2;

}  // namespace

std::size_t Topology::node_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.nodes.size();
  return n;
}

std::size_t Topology::mixer_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers)
    for (const auto& g : l.groups)
      if (g.size() >= 2) ++n;
  return n;
}

std::vector<std::size_t> Topology::layer_sizes() const {
  std::vector<std::size_t> s;
  for (const auto& l : layers) s.push_back(l.nodes.size());
  return s;
}

void Topology::validate() const {
  if (layers.empty() || layers.front().nodes.empty()) throw ConfigError("topology: no layers");
  if (layers.back().nodes.size() != 1) throw ConfigError("topology: last layer must have exactly one node");
  if (!layers.front().groups.empty()) throw ConfigError("topology: layer 0 has multiplexer groups");
  for (std::size_t L = 0; L < layers.size(); ++L)
    for (std::size_t k = 0; k < layers[L].nodes.size(); ++k) {
      const auto& s = layers[L].nodes[k];
      if (s.n_in < 1 || s.n_out < 1) throw ConfigError("topology: " + at(L, k) + " has an empty alphabet");
    }
  for (std::size_t L = 1; L < layers.size(); ++L) {
    const auto& prev = layers[L - 1];
    const auto& cur = layers[L];
    if (cur.groups.size() != cur.nodes.size())
      throw ConfigError("topology: layer " + std::to_string(L) + " group count differs from node count");
    std::vector<int> used(prev.nodes.size(), 0);
    for (std::size_t k = 0; k < cur.nodes.size(); ++k) {
      std::size_t card = 1;
      if (cur.groups[k].empty()) throw ConfigError("topology: " + at(L, k) + " has no inputs");
      for (std::size_t m : cur.groups[k]) {
        if (m >= prev.nodes.size()) throw ConfigError("topology: " + at(L, k) + " reads a missing node");
        ++used[m];
        card *= prev.nodes[m].n_out;
      }
      if (card != cur.nodes[k].n_in)
        throw ConfigError("topology: " + at(L, k) + " input cardinality " + std::to_string(cur.nodes[k].n_in) +
                          " differs from the multiplexer output " + std::to_string(card));
    }
    if (std::any_of(used.begin(), used.end(), [](int u) { return u != 1; }))
      throw ConfigError("topology: layer " + std::to_string(L) + " groups do not partition layer " +
                        std::to_string(L - 1));
  }
}

Topology build_topology(std::size_t feature_count, std::span<const std::size_t> n_out_per_layer, std::size_t n_class,
                        std::span<const std::size_t> feature_cardinalities, const NodeOutOverrides& overrides) {
  if (feature_count < 1) throw ConfigError("topology: need at least one feature");
  if (n_class < 1) throw ConfigError("topology: need at least one class");
  if (feature_cardinalities.size() != feature_count)
    throw ConfigError("topology: " + std::to_string(feature_cardinalities.size()) + " feature cardinalities for " +
                      std::to_string(feature_count) + " features");

  std::vector<std::size_t> sizes{feature_count};
  while (sizes.back() > 1) sizes.push_back(sizes.back() / 2);
  const std::size_t depth = sizes.size() - 1;

  std::vector<std::size_t> hidden;
  const std::size_t given = n_out_per_layer.size();
  if (given == depth + 1 && n_out_per_layer.back() == n_class) {
    hidden.assign(n_out_per_layer.begin(), n_out_per_layer.end() - 1);
  } else if (given == depth) {
    hidden.assign(n_out_per_layer.begin(), n_out_per_layer.end());
  } else if (given == 1) {
    hidden.assign(depth, n_out_per_layer.front());
  } else if (given == depth + 1) {
    throw ConfigError("topology: last layer n_out is " + std::to_string(n_out_per_layer.back()) +
                      " but there are " + std::to_string(n_class) + " classes");
  } else {
    throw ConfigError("topology: n_out list has " + std::to_string(given) + " entries, the tree has depth " +
                      std::to_string(depth) + " (give 1, " + std::to_string(depth) + " or " +
                      std::to_string(depth + 1) + " values)");
  }
  for (std::size_t v : hidden)
    if (v < 1) throw ConfigError("topology: n_out must be >= 1");

  auto n_out_of = [&](std::size_t L, std::size_t k) {
    std::size_t v = L == depth ? n_class : hidden[L];
    if (auto it = overrides.find({L, k}); it != overrides.end()) {
      if (L == depth && it->second != n_class)
        throw ConfigError("topology: the final node must emit n_class symbols");
      if (it->second < 1) throw ConfigError("topology: n_out must be >= 1");
      v = it->second;
    }
    return v;
  };
  for (const auto& [key, v] : overrides)
    if (key.first > depth || key.second >= sizes[key.first])
      throw ConfigError("topology: n_out override for nonexistent " + at(key.first, key.second));

  Topology topo;
  topo.layers.resize(sizes.size());
  for (std::size_t k = 0; k < feature_count; ++k) {
    if (feature_cardinalities[k] < 1) throw ConfigError("topology: feature " + std::to_string(k) + " has no symbols");
    topo.layers[0].nodes.push_back({feature_cardinalities[k], n_out_of(0, k)});
  }
  for (std::size_t L = 1; L <= depth; ++L) {
    auto& layer = topo.layers[L];
    layer.groups = pair_up(sizes[L - 1]);
    for (std::size_t k = 0; k < layer.groups.size(); ++k) {
      std::size_t card = 1;
      for (std::size_t m : layer.groups[k]) {
        card *= topo.layers[L - 1].nodes[m].n_out;
        if (card > kMaxNodeInputs) throw ConfigError("topology: " + at(L, k) + " input alphabet is too large");
      }
      layer.nodes.push_back({card, n_out_of(L, k)});
    }
  }
  topo.validate();
  return topo;
}

std::vector<int> mux_combine(std::span<const std::vector<int>> inputs, std::span<const std::size_t> radices) {
  if (inputs.size() < 2) throw ValidationError("mux_combine: needs at least two inputs");
  if (inputs.size() != radices.size()) throw ValidationError("mux_combine: one radix per input required");
  const std::size_t n = inputs.front().size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (inputs[k].size() != n) throw ValidationError("mux_combine: input vectors differ in length");
    if (radices[k] < 1) throw ValidationError("mux_combine: radix must be >= 1");
    total *= radices[k];
    if (total > static_cast<std::size_t>(INT32_MAX)) throw ValidationError("mux_combine: output alphabet overflows");
  }
  std::vector<int> out(n, 0);
  std::size_t place = 1;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t r = 0; r < n; ++r) {
      const int v = inputs[k][r];
      if (v < 0 || static_cast<std::size_t>(v) >= radices[k])
        throw ValidationError("mux_combine: input " + std::to_string(k) + " symbol " + std::to_string(v) +
                              " is not below radix " + std::to_string(radices[k]));
      out[r] += static_cast<int>(place * static_cast<std::size_t>(v));
    }
    place *= radices[k];
  }
  return out;
}

std::vector<int> mux_decode(std::size_t value, std::span<const std::size_t> radices) {
  std::vector<int> digits;
  digits.reserve(radices.size());
  for (std::size_t r : radices) {
    if (r < 1) throw ValidationError("mux_decode: radix must be >= 1");
    digits.push_back(static_cast<int>(value % r));
    value /= r;
  }
  if (value != 0) throw ValidationError("mux_decode: value exceeds the product of radices");
  return digits;
}

void DINModel::validate() const {
  topology.validate();
  if (nodes.size() != topology.layers.size()) throw ValidationError("model: layer count differs from topology");
  for (std::size_t L = 0; L < nodes.size(); ++L) {
    if (nodes[L].size() != topology.layers[L].nodes.size())
      throw ValidationError("model: layer " + std::to_string(L) + " node count differs from topology");
    for (std::size_t k = 0; k < nodes[L].size(); ++k) {
      const auto& n = nodes[L][k];
      const auto& s = topology.layers[L].nodes[k];
      if (n.n_in != s.n_in || n.n_out != s.n_out || n.channel.rows() != s.n_in || n.channel.cols() != s.n_out)
        throw ValidationError("model: " + at(L, k) + " channel shape differs from topology");
    }
  }
  const std::size_t n_class = topology.n_class();
  if (class_names.size() != n_class) throw ValidationError("model: class name count differs from n_class");
  if (class_alignment.size() != n_class) throw ValidationError("model: class alignment has the wrong size");
  std::vector<int> seen(n_class, 0);
  for (int c : class_alignment) {
    if (c < 0 || static_cast<std::size_t>(c) >= n_class || seen[static_cast<std::size_t>(c)]++)
      throw ValidationError("model: class alignment is not a bijection");
  }
  if (!quantizers.empty()) {
    if (quantizers.size() != topology.feature_count())
      throw ValidationError("model: quantizer count differs from feature count");
    for (std::size_t k = 0; k < quantizers.size(); ++k)
      if (quantizers[k].cardinality() != topology.layers[0].nodes[k].n_in)
        throw ValidationError("model: quantizer '" + quantizers[k].name + "' cardinality differs from its node");
  }
}

namespace detail {

std::vector<int> sample_channel(const ConditionalMatrix& channel, std::span<const int> inputs, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> out(inputs.size());
  const std::size_t n_out = channel.cols();
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const int x = inputs[n];
    if (x < 0 || static_cast<std::size_t>(x) >= channel.rows())
      throw ValidationError("sample: input symbol " + std::to_string(x) + " outside the channel");
    const auto row = channel.row(static_cast<std::size_t>(x));
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = n_out;
    std::size_t last_nonzero = 0;
    for (std::size_t j = 0; j < n_out; ++j) {
      if (row[j] <= 0.0) continue;
      last_nonzero = j;
      acc += row[j];
      if (u < acc) {
        pick = j;
        break;
      }
    }
    out[n] = static_cast<int>(pick == n_out ? last_nonzero : pick);
  }
  return out;
}

std::vector<std::vector<int>> layer_inputs(const Topology& topology, std::size_t layer,
                                           const std::vector<std::vector<int>>& previous_outputs) {
  const auto& cur = topology.layers.at(layer);
  const auto& prev = topology.layers.at(layer - 1);
  std::vector<std::vector<int>> inputs;
  inputs.reserve(cur.groups.size());
  for (const auto& group : cur.groups) {
    if (group.size() == 1) {
      inputs.push_back(previous_outputs.at(group.front()));
      continue;
    }
    std::vector<std::vector<int>> members;
    std::vector<std::size_t> radices;
    for (std::size_t m : group) {
      members.push_back(previous_outputs.at(m));
      radices.push_back(prev.nodes[m].n_out);
    }
    inputs.push_back(mux_combine(members, radices));
  }
  return inputs;
}

TrainedNode train_node(std::span<const int> inputs, std::span<const int> labels, std::size_t n_in, std::size_t n_out,
                       std::size_t n_class, const TrainingOptions& options, std::size_t layer, std::size_t position,
                       IBSolution* solution_out) {
  auto [px, pyx] = estimate_empirical(inputs, labels, n_in, n_class);
  IBProblem problem{std::move(px), std::move(pyx), options.beta, n_out};
  IBSolution sol = solve_ib(problem, options.tol, options.max_iter, derive_seed(options.seed, {layer, position, kSolveStream}));
  TrainedNode node{sol.channel, n_in, n_out, sol.diagnostics, mutual_information(problem.px, problem.py_given_x),
                   sol.diagnostics.i_y_out};
  if (solution_out) *solution_out = std::move(sol);
  return node;
}

std::vector<int> training_outputs(const TrainedNode& node, std::span<const int> inputs, std::uint64_t seed,
                                  std::size_t layer, std::size_t position) {
  return sample_channel(node.channel, inputs, derive_seed(seed, {layer, position, kTrainSampleStream}));
}

std::vector<int> align_classes(const IBSolution& root) {
  const std::size_t n = root.py_given_out.rows();
  if (root.py_given_out.cols() != n)
    throw ValidationError("class alignment: final node emits " + std::to_string(n) + " symbols for " +
                          std::to_string(root.py_given_out.cols()) + " classes");
  std::vector<int> argmax(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = root.py_given_out.row(j);
    argmax[j] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  std::vector<int> sorted = argmax;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) return argmax;

  auto mass = [&](std::size_t j, int m) { return root.p_out[j] * root.py_given_out(j, static_cast<std::size_t>(m)); };
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (n <= 8) {
    std::vector<int> best = perm;
    double best_score = -1.0;
    do {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += mass(j, perm[j]);
      if (s > best_score) {
        best_score = s;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  // Greedy on the largest remaining joint mass.
  std::vector<int> result(n, -1);
  std::vector<bool> taken(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    double best = -1.0;
    std::size_t bj = 0;
    int bm = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (result[j] >= 0) continue;
      for (std::size_t m = 0; m < n; ++m)
        if (!taken[m] && mass(j, static_cast<int>(m)) > best) {
          best = mass(j, static_cast<int>(m));
          bj = j;
          bm = static_cast<int>(m);
        }
    }
    result[bj] = bm;
    taken[static_cast<std::size_t>(bm)] = true;
  }
  return result;
}

std::uint64_t pass_seed(std::uint64_t seed, int repeat) {
  return repeat == 0 ? seed : derive_seed(seed, {static_cast<std::uint64_t>(repeat)});
}

std::vector<int> majority_vote(const std::vector<std::vector<int>>& votes, std::size_t n_class) {
  if (votes.empty()) return {};
  const std::size_t rows = votes.front().size();
  std::vector<int> out(rows);
  std::vector<int> count(n_class);
  for (std::size_t r = 0; r < rows; ++r) {
    std::fill(count.begin(), count.end(), 0);
    for (const auto& v : votes) ++count[static_cast<std::size_t>(v[r])];
    out[r] = static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
  }
  return out;
}

}  // namespace detail

namespace {

void check_training_data(const QuantizedDataset& data, const Topology& topology) {
  data.validate();
  topology.validate();
  if (data.rows() == 0) throw ValidationError("training data has no rows");
  if (data.feature_count() != topology.feature_count())
    throw ValidationError("training data has " + std::to_string(data.feature_count()) + " features, topology expects " +
                          std::to_string(topology.feature_count()));
  for (std::size_t k = 0; k < data.feature_count(); ++k)
    if (data.cardinalities[k] != topology.layers[0].nodes[k].n_in)
      throw ValidationError("feature " + std::to_string(k) + " cardinality " + std::to_string(data.cardinalities[k]) +
                            " differs from topology " + std::to_string(topology.layers[0].nodes[k].n_in));
  if (data.n_class != topology.n_class())
    throw ValidationError("training data has " + std::to_string(data.n_class) + " classes, final node emits " +
                          std::to_string(topology.n_class()));
}

std::vector<std::string> default_class_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t m = 0; m < n; ++m) names.push_back(std::to_string(m));
  return names;
}

void check_columns(const DINModel& model, std::span<const std::vector<int>> columns) {
  const auto& layer0 = model.topology.layers.front().nodes;
  if (columns.size() != layer0.size())
    throw ValidationError("got " + std::to_string(columns.size()) + " feature columns, model expects " +
                          std::to_string(layer0.size()));
  for (std::size_t k = 1; k < columns.size(); ++k)
    if (columns[k].size() != columns[0].size()) throw ValidationError("feature columns differ in length");
}

}  // namespace

DINModel train_network(const QuantizedDataset& data, const Topology& topology, const TrainingOptions& options) {
  check_training_data(data, topology);
  DINModel model;
  model.topology = topology;
  model.beta = options.beta;
  model.tol = options.tol;
  model.max_iter = options.max_iter;
  model.seed = options.seed;
  model.class_names = default_class_names(data.n_class);
  model.nodes.resize(topology.layers.size());

  std::vector<std::vector<int>> outputs;
  IBSolution root;
  for (std::size_t L = 0; L < topology.layers.size(); ++L) {
    const auto& shapes = topology.layers[L].nodes;
    std::vector<std::vector<int>> inputs = L == 0 ? data.columns : detail::layer_inputs(topology, L, outputs);
    const bool last = L + 1 == topology.layers.size();
    auto& layer_nodes = model.nodes[L];
    layer_nodes.resize(shapes.size());
    std::vector<std::vector<int>> next(last ? 0 : shapes.size());
    parallel_for(
        static_cast<std::ptrdiff_t>(shapes.size()),
        [&](std::ptrdiff_t i) {
          const auto k = static_cast<std::size_t>(i);
          layer_nodes[k] = detail::train_node(inputs[k], data.labels, shapes[k].n_in, shapes[k].n_out, data.n_class,
                                              options, L, k, last ? &root : nullptr);
          if (!last) next[k] = detail::training_outputs(layer_nodes[k], inputs[k], options.seed, L, k);
        },
        options.threads);
    outputs = std::move(next);
  }
  model.class_alignment = detail::align_classes(root);
  return model;
}

PassTrace run_pass(const DINModel& model, std::span<const std::vector<int>> columns, std::uint64_t seed, int threads) {
  check_columns(model, columns);
  const auto& topo = model.topology;
  PassTrace trace;
  trace.inputs.resize(topo.layers.size());
  trace.outputs.resize(topo.layers.size());
  for (std::size_t L = 0; L < topo.layers.size(); ++L) {
    trace.inputs[L] = L == 0 ? std::vector<std::vector<int>>(columns.begin(), columns.end())
                             : detail::layer_inputs(topo, L, trace.outputs[L - 1]);
    const std::size_t width = topo.layers[L].nodes.size();
    trace.outputs[L].resize(width);
    parallel_for(
        static_cast<std::ptrdiff_t>(width),
        [&](std::ptrdiff_t i) {
          const auto k = static_cast<std::size_t>(i);
          trace.outputs[L][k] = detail::sample_channel(model.nodes[L][k].channel, trace.inputs[L][k],
                                                       derive_seed(seed, {L, k, kPredictSampleStream}));
        },
        threads);
  }
  return trace;
}

std::vector<int> predict_quantized(const DINModel& model, std::span<const std::vector<int>> columns,
                                   const PredictionMode& mode, int threads) {
  const int repeats = mode.kind == PredictionMode::Kind::Ensemble ? mode.repeats : 1;
  if (repeats < 1) throw ValidationError("predict: ensemble repeats must be >= 1");
  std::vector<std::vector<int>> votes;
  for (int r = 0; r < repeats; ++r) {
    PassTrace trace = run_pass(model, columns, detail::pass_seed(mode.seed, r), threads);
    std::vector<int> labels = std::move(trace.outputs.back().front());
    for (int& s : labels) s = model.class_alignment[static_cast<std::size_t>(s)];
    votes.push_back(std::move(labels));
  }
  if (votes.size() == 1) return std::move(votes.front());
  return detail::majority_vote(votes, model.topology.n_class());
}

std::vector<int> predict(const DINModel& model, const RawDataset& rows, const PredictionMode& mode, int threads) {
  if (model.quantizers.empty()) throw ValidationError("predict: model carries no quantizers; use predict_quantized");
  std::vector<std::vector<int>> columns;
  columns.reserve(model.quantizers.size());
  for (const auto& spec : model.quantizers) {
    auto idx = rows.find_feature(spec.name);
    if (!idx) throw ValidationError("predict: dataset has no column '" + spec.name + "'");
    columns.push_back(apply_quantizer(spec, rows.features[*idx].values));
  }
  return predict_quantized(model, columns, mode, threads);
}

}  // namespace din
