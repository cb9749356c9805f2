#pragma once

#include <cstddef>
#include <cstdint>

#include "din/dataset.hpp"

namespace din {

struct SyntheticOptions {
  std::size_t rows = 400;
  std::uint64_t seed = 1;
  double positive_rate = 0.625;  ///< share of "ckd" rows
  double missing_scale = 1.0;    ///< multiplies each column's missing rate
  /// Plant a deterministic class rule: 'sg', 'al', 'htn' and 'hemo' take
  /// disjoint values per class and are never missing. They sit under each
  /// of the three subtrees feeding the root of a 24-feature network.
  bool separable = false;
};

/// Kidney-disease-like table: the same 24 column names and kinds as the UCI
/// file (11 numeric, 13 nominal), target 'class' in {ckd, notckd}, missing
/// cells and class-dependent feature distributions.
RawDataset make_ckd_like(const SyntheticOptions& options);

}  // namespace din
