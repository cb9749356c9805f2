#pragma once

// End-to-end probability matrix of a trained network and the flow of
// information about the target through its nodes and multiplexers.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "din/dataset.hpp"
#include "din/error.hpp"
#include "din/infotheory.hpp"
#include "din/network.hpp"

namespace din {

/// compose_full_matrix refused: the joint input space has too many rows.
class StateSpaceTooLarge : public ValidationError {
 public:
  StateSpaceTooLarge(std::size_t required, std::size_t cap);
  std::size_t required() const noexcept { return required_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t required_;
  std::size_t cap_;
};

inline constexpr std::size_t kDefaultStateCap = std::size_t{1} << 20;

/// Rows of the joint quantized input, or 0 if it overflows size_t.
std::size_t joint_input_rows(const Topology& topology);

/// P(class symbol | joint input). Row index is the mixed-radix code of the
/// quantized features with feature 0 as the low-order digit, matching
/// mux_combine; each multiplexer contributes (P_last (x) ... (x) P_first)
/// followed by the node's own channel. Columns are root output symbols
/// (before class alignment).
ConditionalMatrix compose_full_matrix(const DINModel& model, std::size_t state_cap = kDefaultStateCap,
                                      int threads = 0);

namespace reference {
ConditionalMatrix compose_full_matrix(const DINModel& model, std::size_t state_cap = kDefaultStateCap);
}

struct NodeFlow {
  std::size_t layer = 0;
  std::size_t position = 0;
  double mi_in_y = 0.0;
  double mi_out_y = 0.0;
  double h_out = 0.0;
};

/// Bounds on the information a multiplexer output carries about Y:
/// max_m I(X_m;Y) <= I(X_mux;Y) <= min_m [I(X_m;Y) + sum_{m' != m} H(X_m')].
/// For two inputs this is the usual pairwise sandwich; wider groups chain it.
struct MuxFlow {
  std::size_t layer = 0;     ///< layer of the node the multiplexer feeds
  std::size_t position = 0;  ///< position of that node
  std::vector<std::size_t> members;
  double lower_bound = 0.0;
  double observed = 0.0;
  double upper_bound = 0.0;
};

struct MIFlowReport {
  std::vector<NodeFlow> nodes;
  std::vector<MuxFlow> muxes;
};

/// Re-propagates quantized data through the model with one seeded pass and
/// takes plug-in estimates at every node and multiplexer.
MIFlowReport mi_flow(const DINModel& model, const QuantizedDataset& data, std::uint64_t seed, int threads = 0);

struct BoundViolation {
  std::size_t layer = 0;
  std::size_t position = 0;
  std::string message;
};

std::vector<BoundViolation> check_bounds(const MIFlowReport& report, double tol);

/// Largest observed multiplexer-input I(X_out;Y) per layer (the per-layer
/// maximum over node outputs), index = layer.
std::vector<double> max_output_information_per_layer(const MIFlowReport& report);

/// One row per node and per multiplexer, quantities in bits.
void write_mi_flow_csv(const MIFlowReport& report, std::ostream& out);

}  // namespace din
