#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace din {

/// One raw table cell: missing, a number, or a category string.
using RawValue = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const RawValue& v) noexcept { return std::holds_alternative<std::monostate>(v); }

/// Shortest text that round-trips the number; used as a category key.
std::string format_number(double v);

/// Category key of a non-missing cell.
std::string category_key(const RawValue& v);

struct RawColumn {
  std::string name;
  std::vector<RawValue> values;
  /// Category list declared by the file format (ARFF nominal attributes).
  std::optional<std::vector<std::string>> declared_categories;
};

/// Rectangular table of raw features plus the target column.
struct RawDataset {
  std::vector<RawColumn> features;
  RawColumn target;

  std::size_t rows() const noexcept { return target.values.size(); }
  std::size_t feature_count() const noexcept { return features.size(); }
  /// Index of a feature column; nullopt when absent.
  std::optional<std::size_t> find_feature(const std::string& name) const;
  /// Copy of the given rows, in the given order.
  RawDataset select_rows(std::span<const std::size_t> indices) const;
  /// Class names: declared categories when present, else first appearance.
  std::vector<std::string> class_names() const;
  /// Throws DataError unless every column has rows() entries.
  void validate() const;
};

/// Integer-coded features and labels consumed by the network.
struct QuantizedDataset {
  std::vector<std::vector<int>> columns;
  std::vector<std::size_t> cardinalities;
  std::vector<int> labels;
  std::size_t n_class = 0;

  std::size_t rows() const noexcept { return labels.size(); }
  std::size_t feature_count() const noexcept { return columns.size(); }
  /// Throws ValidationError on ragged columns or out-of-range symbols.
  void validate() const;
};

/// Maps target cells to indices into class_names. Missing or unknown
/// labels throw DataError.
std::vector<int> encode_labels(const RawColumn& target, const std::vector<std::string>& class_names);

}  // namespace din
