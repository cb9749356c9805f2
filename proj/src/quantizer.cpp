#include "din/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "din/error.hpp"

namespace din {

int FeatureSpec::value_symbols() const noexcept {
  if (const auto* bins = std::get_if<ContinuousBins>(&kind)) return bins->levels;
  return static_cast<int>(std::get<CategoryDictionary>(kind).categories.size());
}

namespace {

std::string label(const std::string& name) { return name.empty() ? "<unnamed>" : "'" + name + "'"; }

bool all_numeric(std::span<const RawValue> column) {
  return std::all_of(column.begin(), column.end(),
                     [](const RawValue& v) { return !std::holds_alternative<std::string>(v); });
}

}  // namespace

FeatureSpec fit_quantizer(std::span<const RawValue> column, int requested_levels, FeatureKind kind,
                          std::string name, const std::vector<std::string>* declared_categories) {
  if (column.empty()) throw ValidationError("feature " + label(name) + ": empty column");
  const bool has_missing = std::any_of(column.begin(), column.end(), is_missing);
  const bool any_present = std::any_of(column.begin(), column.end(), [](const RawValue& v) { return !is_missing(v); });
  if (!any_present) throw ValidationError("feature " + label(name) + ": every value is missing");

  if (kind == FeatureKind::Auto)
    kind = (declared_categories || !all_numeric(column)) ? FeatureKind::Categorical : FeatureKind::Continuous;

  FeatureSpec spec;
  spec.name = std::move(name);
  spec.has_missing = has_missing;

  if (kind == FeatureKind::Categorical) {
    CategoryDictionary dict;
    if (declared_categories) {
      dict.categories = *declared_categories;
    } else {
      std::set<std::string> seen;
      for (const auto& v : column) {
        if (is_missing(v)) continue;
        std::string key = category_key(v);
        if (seen.insert(key).second) dict.categories.push_back(std::move(key));
      }
    }
    spec.kind = std::move(dict);
    return spec;
  }

  if (!all_numeric(column))
    throw ValidationError("feature " + label(spec.name) + ": continuous quantization of a non-numeric column");
  if (requested_levels < 2)
    throw ValidationError("feature " + label(spec.name) + ": continuous quantization needs >= 2 levels");
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& v : column) {
    if (const auto* d = std::get_if<double>(&v)) {
      lo = std::min(lo, *d);
      hi = std::max(hi, *d);
    }
  }
  if (lo == hi) {
    spec.kind = ContinuousBins{lo, hi, 1};
    spec.has_missing = true;
    spec.degenerate = true;
    return spec;
  }
  spec.kind = ContinuousBins{lo, hi, requested_levels};
  return spec;
}

std::vector<int> apply_quantizer(const FeatureSpec& spec, std::span<const RawValue> column) {
  std::vector<int> out;
  out.reserve(column.size());
  const int missing = spec.missing_symbol();

  if (const auto* bins = std::get_if<ContinuousBins>(&spec.kind)) {
    const double width = bins->levels > 1 ? (bins->max - bins->min) / bins->levels : 1.0;
    for (const auto& v : column) {
      if (is_missing(v)) {
        if (!spec.has_missing) throw ValidationError("feature " + label(spec.name) + ": missing value but no missing symbol");
        out.push_back(missing);
        continue;
      }
      const auto* d = std::get_if<double>(&v);
      if (!d) throw ValidationError("feature " + label(spec.name) + ": non-numeric value '" + category_key(v) + "'");
      if (bins->levels == 1) {
        out.push_back(0);
        continue;
      }
      const double pos = std::floor((*d - bins->min) / width);
      out.push_back(static_cast<int>(std::clamp(pos, 0.0, static_cast<double>(bins->levels - 1))));
    }
    return out;
  }

  const auto& cats = std::get<CategoryDictionary>(spec.kind).categories;
  std::unordered_map<std::string, int> index;
  for (std::size_t k = 0; k < cats.size(); ++k) index.emplace(cats[k], static_cast<int>(k));
  for (const auto& v : column) {
    if (is_missing(v)) {
      if (!spec.has_missing) throw ValidationError("feature " + label(spec.name) + ": missing value but no missing symbol");
      out.push_back(missing);
      continue;
    }
    const std::string key = category_key(v);
    auto it = index.find(key);
    if (it != index.end()) {
      out.push_back(it->second);
    } else if (spec.has_missing) {
      out.push_back(missing);
    } else {
      throw ValidationError("feature " + label(spec.name) + ": unseen category '" + key + "'");
    }
  }
  return out;
}

std::vector<FeatureSpec> fit_quantizers(const RawDataset& data, const QuantizerConfig& config) {
  std::vector<FeatureSpec> specs;
  specs.reserve(data.features.size());
  for (const auto& col : data.features) {
    FeatureKind kind = FeatureKind::Auto;
    int levels = config.default_levels;
    if (auto it = config.features.find(col.name); it != config.features.end()) {
      if (it->second.kind) kind = *it->second.kind;
      if (it->second.levels) levels = *it->second.levels;
    }
    if (kind == FeatureKind::Auto && !col.declared_categories && all_numeric(col.values)) {
      std::set<double> distinct;
      for (const auto& v : col.values)
        if (const auto* d = std::get_if<double>(&v)) distinct.insert(*d);
      if (static_cast<int>(distinct.size()) <= config.categorical_threshold) kind = FeatureKind::Categorical;
    }
    const auto* declared = col.declared_categories ? &*col.declared_categories : nullptr;
    if (kind == FeatureKind::Continuous) declared = nullptr;
    FeatureSpec spec = fit_quantizer(col.values, levels, kind, col.name, declared);
    if (config.reserve_missing_symbol) spec.has_missing = true;
    specs.push_back(std::move(spec));
  }
  return specs;
}

QuantizedDataset quantize_dataset(const RawDataset& data, std::span<const FeatureSpec> specs,
                                  const std::vector<std::string>& class_names) {
  QuantizedDataset q;
  q.columns.reserve(specs.size());
  for (const auto& spec : specs) {
    auto idx = data.find_feature(spec.name);
    if (!idx) throw ValidationError("dataset has no column '" + spec.name + "'");
    q.columns.push_back(apply_quantizer(spec, data.features[*idx].values));
    q.cardinalities.push_back(spec.cardinality());
  }
  q.labels = encode_labels(data.target, class_names);
  q.n_class = class_names.size();
  q.validate();
  return q;
}

}  // namespace din
