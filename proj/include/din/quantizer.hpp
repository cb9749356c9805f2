#pragma once

// Uniform quantization of raw features into finite alphabets. Missing values
// always get their own trailing symbol.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "din/dataset.hpp"

namespace din {

struct ContinuousBins {
  double min = 0.0;
  double max = 1.0;
  int levels = 2;
  bool operator==(const ContinuousBins&) const = default;
};

struct CategoryDictionary {
  std::vector<std::string> categories;
  bool operator==(const CategoryDictionary&) const = default;
};

struct FeatureSpec {
  std::string name;
  std::variant<ContinuousBins, CategoryDictionary> kind;
  bool has_missing = false;
  /// Constant continuous column: a single bin plus a missing symbol.
  bool degenerate = false;

  bool is_continuous() const noexcept { return std::holds_alternative<ContinuousBins>(kind); }
  int value_symbols() const noexcept;
  std::size_t cardinality() const noexcept { return static_cast<std::size_t>(value_symbols() + (has_missing ? 1 : 0)); }
  /// Last symbol; only meaningful when has_missing.
  int missing_symbol() const noexcept { return value_symbols(); }

  bool operator==(const FeatureSpec&) const = default;
};

enum class FeatureKind { Auto, Continuous, Categorical };

/// Numeric columns become uniform bins over the observed range; columns with
/// any string value, or kind == Categorical, become first-appearance
/// dictionaries (or the declared category list when given).
FeatureSpec fit_quantizer(std::span<const RawValue> column, int requested_levels,
                          FeatureKind kind = FeatureKind::Auto, std::string name = {},
                          const std::vector<std::string>* declared_categories = nullptr);

/// Symbol per value. Out-of-range numbers clamp to the edge bins.
std::vector<int> apply_quantizer(const FeatureSpec& spec, std::span<const RawValue> column);

struct FeatureOverride {
  std::optional<FeatureKind> kind;
  std::optional<int> levels;
};

struct QuantizerConfig {
  int default_levels = 10;
  /// Numeric columns with at most this many distinct values are categorical.
  int categorical_threshold = 16;
  /// Give every feature a missing symbol even if the fitting data has no
  /// missing values, so rows seen later with gaps or unseen categories
  /// still quantize.
  bool reserve_missing_symbol = true;
  std::map<std::string, FeatureOverride> features;
};

/// Fits one spec per feature column of the (training) dataset.
std::vector<FeatureSpec> fit_quantizers(const RawDataset& data, const QuantizerConfig& config);

/// Applies fitted specs by column name and encodes the target against
/// class_names.
QuantizedDataset quantize_dataset(const RawDataset& data, std::span<const FeatureSpec> specs,
                                  const std::vector<std::string>& class_names);

}  // namespace din
