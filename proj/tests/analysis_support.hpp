#pragma once

// Random-channel models and a path-enumeration oracle for the end-to-end
// matrix, shared by the unit and acceptance tests.

#include <functional>

#include "din/analysis.hpp"
#include "support.hpp"

namespace din::testing {

/// Model over `cards` with every channel drawn at random.
inline DINModel random_model(const std::vector<std::size_t>& cards, std::size_t n_out, std::size_t n_class, Rng& rng) {
  const std::vector<std::size_t> outs{n_out};
  DINModel m;
  m.topology = build_topology(cards.size(), outs, n_class, cards);
  for (const auto& layer : m.topology.layers) {
    std::vector<TrainedNode> nodes;
    for (const auto& s : layer.nodes) {
      TrainedNode t;
      t.n_in = s.n_in;
      t.n_out = s.n_out;
      t.channel = random_stochastic(s.n_in, s.n_out, rng, true);
      nodes.push_back(std::move(t));
    }
    m.nodes.push_back(std::move(nodes));
  }
  for (std::size_t c = 0; c < n_class; ++c) {
    m.class_names.push_back(std::to_string(c));
    m.class_alignment.push_back(static_cast<int>(c));
  }
  return m;
}

/// P(root symbol | joint input) by summing, for every joint input, over every
/// assignment of output symbols to the non-root nodes.
inline std::vector<double> brute_force_matrix(const DINModel& m) {
  const auto& topo = m.topology;
  const std::size_t D = topo.feature_count();
  std::vector<std::size_t> cards;
  for (const auto& s : topo.layers[0].nodes) cards.push_back(s.n_in);
  std::size_t rows = 1;
  for (auto c : cards) rows *= c;
  const std::size_t n_root = topo.layers.back().nodes[0].n_out;

  // Flatten non-root nodes in layer order.
  std::vector<std::pair<std::size_t, std::size_t>> hidden;
  for (std::size_t L = 0; L + 1 < topo.layers.size(); ++L)
    for (std::size_t k = 0; k < topo.layers[L].nodes.size(); ++k) hidden.emplace_back(L, k);
  if (topo.layers.size() == 1) hidden.clear();

  std::vector<double> out(rows * n_root, 0.0);
  for (std::size_t x = 0; x < rows; ++x) {
    std::vector<int> features(D);
    std::size_t rest = x;
    for (std::size_t f = 0; f < D; ++f) {
      features[f] = static_cast<int>(rest % cards[f]);
      rest /= cards[f];
    }
    auto input_of = [&](std::size_t L, std::size_t k, const std::vector<std::vector<int>>& sym) -> std::size_t {
      if (L == 0) return static_cast<std::size_t>(features[k]);
      std::size_t code = 0, radix = 1;
      for (std::size_t member : topo.layers[L].groups[k]) {
        code += radix * static_cast<std::size_t>(sym[L - 1][member]);
        radix *= topo.layers[L - 1].nodes[member].n_out;
      }
      return code;
    };
    std::vector<std::vector<int>> sym(topo.layers.size());
    for (std::size_t L = 0; L < topo.layers.size(); ++L) sym[L].assign(topo.layers[L].nodes.size(), 0);

    std::function<void(std::size_t, double)> walk = [&](std::size_t h, double weight) {
      if (weight == 0.0) return;
      if (h == hidden.size()) {
        const std::size_t last = topo.layers.size() - 1;
        const std::size_t in = input_of(last, 0, sym);
        for (std::size_t j = 0; j < n_root; ++j) out[x * n_root + j] += weight * m.nodes[last][0].channel(in, j);
        return;
      }
      const auto [L, k] = hidden[h];
      const std::size_t in = input_of(L, k, sym);
      for (std::size_t v = 0; v < m.nodes[L][k].n_out; ++v) {
        sym[L][k] = static_cast<int>(v);
        walk(h + 1, weight * m.nodes[L][k].channel(in, v));
      }
    };
    walk(0, 1.0);
  }
  return out;
}

}  // namespace din::testing
