#include "din/analysis.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "din/kernels.hpp"

namespace din {

StateSpaceTooLarge::StateSpaceTooLarge(std::size_t required, std::size_t cap)
    : ValidationError("full matrix needs " + (required == 0 ? std::string("more than SIZE_MAX") : std::to_string(required)) +
                      " input rows, cap is " + std::to_string(cap)),
      required_(required),
      cap_(cap) {}

std::size_t joint_input_rows(const Topology& topology) {
  std::size_t rows = 1;
  for (const auto& n : topology.layers.front().nodes) {
    if (n.n_in != 0 && rows > std::numeric_limits<std::size_t>::max() / n.n_in) return 0;
    rows *= n.n_in;
  }
  return rows;
}

namespace {

template <typename Kron, typename Matmul>
ConditionalMatrix compose_node(const DINModel& model, std::size_t layer, std::size_t position, Kron&& kron,
                               Matmul&& matmul) {
  const auto& channel = model.node(layer, position).channel;
  if (layer == 0) return channel;
  const auto& group = model.topology.layers[layer].groups[position];
  // Last member is the high-order digit, so it is the leftmost factor.
  ConditionalMatrix joint = compose_node(model, layer - 1, group.back(), kron, matmul);
  for (std::size_t m = group.size() - 1; m-- > 0;)
    joint = kron(joint, compose_node(model, layer - 1, group[m], kron, matmul));
  return matmul(joint, channel);
}

void check_cap(const DINModel& model, std::size_t cap) {
  model.validate();
  const std::size_t rows = joint_input_rows(model.topology);
  if (rows == 0 || rows > cap) throw StateSpaceTooLarge(rows, cap);
}

}  // namespace

ConditionalMatrix compose_full_matrix(const DINModel& model, std::size_t state_cap, int threads) {
  check_cap(model, state_cap);
  return compose_node(
      model, model.topology.depth(), 0,
      [threads](const ConditionalMatrix& a, const ConditionalMatrix& b) { return kernels::kron(a, b, threads); },
      [threads](const ConditionalMatrix& a, const ConditionalMatrix& b) { return kernels::matmul(a, b, threads); });
}

ConditionalMatrix reference::compose_full_matrix(const DINModel& model, std::size_t state_cap) {
  check_cap(model, state_cap);
  return compose_node(
      model, model.topology.depth(), 0,
      [](const ConditionalMatrix& a, const ConditionalMatrix& b) { return kernels::reference::kron(a, b); },
      [](const ConditionalMatrix& a, const ConditionalMatrix& b) { return kernels::reference::matmul(a, b); });
}

MIFlowReport mi_flow(const DINModel& model, const QuantizedDataset& data, std::uint64_t seed, int threads) {
  data.validate();
  if (data.n_class != model.topology.n_class())
    throw ValidationError("mi_flow: data has " + std::to_string(data.n_class) + " classes, model has " +
                          std::to_string(model.topology.n_class()));
  const auto& layer0 = model.topology.layers.front().nodes;
  if (data.feature_count() != layer0.size())
    throw ValidationError("mi_flow: data has " + std::to_string(data.feature_count()) + " features, model has " +
                          std::to_string(layer0.size()));
  for (std::size_t k = 0; k < layer0.size(); ++k)
    if (data.cardinalities[k] != layer0[k].n_in)
      throw ValidationError("mi_flow: feature " + std::to_string(k) + " cardinality differs from the model");

  const PassTrace trace = run_pass(model, data.columns, seed, threads);
  const auto& topo = model.topology;
  const std::size_t n_class = data.n_class;

  MIFlowReport report;
  std::vector<std::vector<std::size_t>> index(topo.layers.size());
  for (std::size_t L = 0; L < topo.layers.size(); ++L) {
    for (std::size_t k = 0; k < topo.layers[L].nodes.size(); ++k) {
      const auto& s = topo.layers[L].nodes[k];
      NodeFlow f;
      f.layer = L;
      f.position = k;
      f.mi_in_y = empirical_mutual_information(trace.inputs[L][k], data.labels, s.n_in, n_class);
      f.mi_out_y = empirical_mutual_information(trace.outputs[L][k], data.labels, s.n_out, n_class);
      f.h_out = empirical_entropy(trace.outputs[L][k], s.n_out);
      index[L].push_back(report.nodes.size());
      report.nodes.push_back(f);
    }
  }
  for (std::size_t L = 1; L < topo.layers.size(); ++L) {
    for (std::size_t k = 0; k < topo.layers[L].groups.size(); ++k) {
      const auto& group = topo.layers[L].groups[k];
      if (group.size() < 2) continue;
      MuxFlow mux;
      mux.layer = L;
      mux.position = k;
      mux.members = group;
      mux.observed = report.nodes[index[L][k]].mi_in_y;
      mux.upper_bound = std::numeric_limits<double>::infinity();
      double h_total = 0.0;
      for (std::size_t m : group) h_total += report.nodes[index[L - 1][m]].h_out;
      for (std::size_t m : group) {
        const auto& member = report.nodes[index[L - 1][m]];
        mux.lower_bound = std::max(mux.lower_bound, member.mi_out_y);
        mux.upper_bound = std::min(mux.upper_bound, member.mi_out_y + (h_total - member.h_out));
      }
      report.muxes.push_back(std::move(mux));
    }
  }
  return report;
}

std::vector<BoundViolation> check_bounds(const MIFlowReport& report, double tol) {
  std::vector<BoundViolation> out;
  for (const auto& m : report.muxes) {
    const std::string where = "mux feeding node (" + std::to_string(m.position) + "," + std::to_string(m.layer) + ")";
    if (m.observed < m.lower_bound - tol)
      out.push_back({m.layer, m.position,
                     where + ": observed " + format_number(m.observed) + " below lower bound " +
                         format_number(m.lower_bound)});
    if (m.observed > m.upper_bound + tol)
      out.push_back({m.layer, m.position,
                     where + ": observed " + format_number(m.observed) + " above upper bound " +
                         format_number(m.upper_bound)});
  }
  return out;
}

std::vector<double> max_output_information_per_layer(const MIFlowReport& report) {
  std::vector<double> best;
  for (const auto& n : report.nodes) {
    if (best.size() <= n.layer) best.resize(n.layer + 1, 0.0);
    best[n.layer] = std::max(best[n.layer], n.mi_out_y);
  }
  return best;
}

void write_mi_flow_csv(const MIFlowReport& report, std::ostream& out) {
  out << "kind,layer,position,mi_in_y,mi_out_y,h_out,lower_bound,observed,upper_bound\n";
  for (const auto& n : report.nodes)
    out << "node," << n.layer << ',' << n.position << ',' << format_number(n.mi_in_y) << ','
        << format_number(n.mi_out_y) << ',' << format_number(n.h_out) << ",,,\n";
  for (const auto& m : report.muxes)
    out << "mux," << m.layer << ',' << m.position << ",,,," << format_number(m.lower_bound) << ','
        << format_number(m.observed) << ',' << format_number(m.upper_bound) << '\n';
}

}  // namespace din
