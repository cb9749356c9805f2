#include "din/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "din/error.hpp"

namespace din {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string category_key(const RawValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw ValidationError("category_key: missing value has no key");
}

std::optional<std::size_t> RawDataset::find_feature(const std::string& name) const {
  for (std::size_t k = 0; k < features.size(); ++k)
    if (features[k].name == name) return k;
  return std::nullopt;
}

RawDataset RawDataset::select_rows(std::span<const std::size_t> indices) const {
  auto pick = [&](const RawColumn& c) {
    RawColumn out{c.name, {}, c.declared_categories};
    out.values.reserve(indices.size());
    for (std::size_t i : indices) out.values.push_back(c.values.at(i));
    return out;
  };
  RawDataset out;
  out.features.reserve(features.size());
  for (const auto& c : features) out.features.push_back(pick(c));
  out.target = pick(target);
  return out;
}

std::vector<std::string> RawDataset::class_names() const {
  if (target.declared_categories) return *target.declared_categories;
  std::vector<std::string> names;
  for (const auto& v : target.values) {
    if (is_missing(v)) continue;
    std::string k = category_key(v);
    if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(std::move(k));
  }
  return names;
}

void RawDataset::validate() const {
  for (const auto& c : features)
    if (c.values.size() != rows())
      throw DataError("column '" + c.name + "' has " + std::to_string(c.values.size()) +
                      " rows, target has " + std::to_string(rows()));
}

void QuantizedDataset::validate() const {
  if (cardinalities.size() != columns.size())
    throw ValidationError("quantized dataset: cardinality count does not match column count");
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k].size() != labels.size())
      throw ValidationError("quantized dataset: column " + std::to_string(k) + " is ragged");
    for (int s : columns[k])
      if (s < 0 || static_cast<std::size_t>(s) >= cardinalities[k])
        throw ValidationError("quantized dataset: column " + std::to_string(k) + " symbol " +
                              std::to_string(s) + " out of range");
  }
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= n_class)
      throw ValidationError("quantized dataset: label out of range");
}

std::vector<int> encode_labels(const RawColumn& target, const std::vector<std::string>& class_names) {
  std::unordered_map<std::string, int> index;
  for (std::size_t m = 0; m < class_names.size(); ++m) index.emplace(class_names[m], static_cast<int>(m));
  std::vector<int> labels;
  labels.reserve(target.values.size());
  for (std::size_t n = 0; n < target.values.size(); ++n) {
    const auto& v = target.values[n];
    if (is_missing(v)) throw DataError("target '" + target.name + "' is missing at row " + std::to_string(n));
    auto it = index.find(category_key(v));
    if (it == index.end())
      throw DataError("target '" + target.name + "' has unknown class '" + category_key(v) + "' at row " +
                      std::to_string(n));
    labels.push_back(it->second);
  }
  return labels;
}

}  // namespace din
