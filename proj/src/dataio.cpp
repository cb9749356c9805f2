#include "din/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "din/rng.hpp"

namespace din {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

bool is_missing_token(const std::string& cell, const std::vector<std::string>& tokens) {
  return std::find(tokens.begin(), tokens.end(), cell) != tokens.end();
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
  std::vector<bool> quoted;
};

// RFC 4180 records. Quoted fields may contain delimiters, doubled quotes and
// newlines.
std::vector<Record> read_records(std::istream& in, char delim, const std::string& source) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<Record> records;
  Record rec;
  std::string field;
  bool in_quotes = false;
  bool was_quoted = false;
  bool any = false;
  std::size_t line = 1;
  rec.line = 1;
  auto end_field = [&] {
    rec.fields.push_back(was_quoted ? field : trim(field));
    rec.quoted.push_back(was_quoted);
    field.clear();
    was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(rec.fields.size() == 1 && rec.fields[0].empty() && !rec.quoted[0])) records.push_back(std::move(rec));
    rec = Record{};
    rec.line = line;
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && trim(field).empty()) {
      field.clear();
      in_quotes = true;
      was_quoted = true;
      any = true;
    } else if (c == delim) {
      end_field();
      any = true;
    } else if (c == '\n') {
      ++line;
      end_record();
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (in_quotes) throw DataError(source + ":" + std::to_string(rec.line) + ": unterminated quoted field");
  if (any || !field.empty()) end_record();
  return records;
}

// Quoting marks a cell as text: quoted numbers and quoted missing tokens
// stay literal strings, which is what write_csv relies on.
RawValue csv_cell(const std::string& cell, bool quoted, const std::vector<std::string>& missing) {
  if (quoted) return cell;
  if (is_missing_token(cell, missing)) return std::monostate{};
  double v;
  if (parse_double(cell, v)) return v;
  return cell;
}

}  // namespace

RawDataset parse_csv(std::istream& in, const LoadOptions& options, const std::string& source) {
  std::vector<Record> records = read_records(in, options.delimiter, source);
  if (records.empty()) throw DataError(source + ": empty file");
  const auto& header = records.front().fields;
  const auto target_it = std::find(header.begin(), header.end(), options.target);
  if (target_it == header.end()) throw DataError(source + ": target column '" + options.target + "' not found");
  const auto target_col = static_cast<std::size_t>(target_it - header.begin());

  RawDataset data;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != target_col) data.features.push_back(RawColumn{header[c], {}, std::nullopt});
  data.target.name = options.target;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size())
      throw DataError(source + ":" + std::to_string(rec.line) + ": expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(rec.fields.size()));
    std::size_t f = 0;
    for (std::size_t c = 0; c < rec.fields.size(); ++c) {
      RawValue v = csv_cell(rec.fields[c], rec.quoted[c], options.missing_tokens);
      if (c == target_col) {
        // Class labels stay categorical even when numeric-looking.
        if (std::holds_alternative<double>(v)) v = rec.fields[c];
        data.target.values.push_back(std::move(v));
      } else {
        data.features[f++].values.push_back(std::move(v));
      }
    }
  }
  data.validate();
  return data;
}

RawDataset parse_arff(std::istream& in, const LoadOptions& options, const std::string& source) {
  struct Attribute {
    std::string name;
    bool numeric = false;
    std::optional<std::vector<std::string>> nominal;
  };
  std::vector<Attribute> attrs;
  std::vector<std::vector<RawValue>> columns;
  bool in_data = false;
  std::string raw_line;
  std::size_t line = 0;
  auto fail = [&](std::size_t col, const std::string& msg) {
    throw DataError(source + ":" + std::to_string(line) + (col ? ":" + std::to_string(col) : std::string()) + ": " +
                    msg);
  };

  while (std::getline(in, raw_line)) {
    ++line;
    std::string l = trim(raw_line);
    if (l.empty() || l.front() == '%') continue;
    if (!in_data) {
      std::string lower = l;
      std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
      if (lower.rfind("@relation", 0) == 0) continue;
      if (lower.rfind("@data", 0) == 0) {
        in_data = true;
        columns.resize(attrs.size());
        continue;
      }
      if (lower.rfind("@attribute", 0) != 0) fail(1, "unexpected header line");
      std::string rest = trim(std::string_view(l).substr(10));
      Attribute a;
      if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
        const auto close = rest.find(rest.front(), 1);
        if (close == std::string::npos) fail(11, "unterminated attribute name");
        a.name = rest.substr(1, close - 1);
        rest = trim(std::string_view(rest).substr(close + 1));
      } else {
        const auto sp = rest.find_first_of(" \t");
        if (sp == std::string::npos) fail(11, "attribute without a type");
        a.name = rest.substr(0, sp);
        rest = trim(std::string_view(rest).substr(sp));
      }
      if (!rest.empty() && rest.front() == '{') {
        const auto close = rest.find('}');
        if (close == std::string::npos) fail(0, "unterminated nominal list for '" + a.name + "'");
        std::vector<std::string> values;
        std::stringstream ss(rest.substr(1, close - 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
          std::string v = unquote(trim(item));
          if (!v.empty()) values.push_back(std::move(v));
        }
        a.nominal = std::move(values);
      } else {
        std::string type = rest;
        std::transform(type.begin(), type.end(), type.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (type == "numeric" || type == "real" || type == "integer") {
          a.numeric = true;
        } else if (type != "string") {
          fail(0, "unsupported attribute type '" + rest + "'");
        }
      }
      attrs.push_back(std::move(a));
      continue;
    }

    std::vector<std::string> fields;
    {
      std::stringstream ss(l);
      std::string item;
      while (std::getline(ss, item, ',')) fields.push_back(unquote(trim(item)));
      if (!l.empty() && l.back() == ',') fields.emplace_back();
    }
    // Stray trailing delimiters show up in real files; drop empty extras.
    while (fields.size() > attrs.size() && fields.back().empty()) fields.pop_back();
    if (fields.size() != attrs.size())
      fail(0, "expected " + std::to_string(attrs.size()) + " values, got " + std::to_string(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& cell = fields[c];
      if (cell == "?" || is_missing_token(cell, options.missing_tokens)) {
        columns[c].emplace_back(std::monostate{});
        continue;
      }
      const auto& a = attrs[c];
      if (a.numeric) {
        double v;
        if (!parse_double(cell, v)) fail(c + 1, "'" + cell + "' is not a number (attribute '" + a.name + "')");
        columns[c].emplace_back(v);
      } else {
        if (a.nominal && std::find(a.nominal->begin(), a.nominal->end(), cell) == a.nominal->end())
          fail(c + 1, "'" + cell + "' is not declared for attribute '" + a.name + "'");
        columns[c].emplace_back(cell);
      }
    }
  }
  if (!in_data) throw DataError(source + ": no @data section");

  RawDataset data;
  bool found = false;
  for (std::size_t c = 0; c < attrs.size(); ++c) {
    RawColumn col{attrs[c].name, std::move(columns[c]), attrs[c].nominal};
    if (attrs[c].name == options.target) {
      data.target = std::move(col);
      found = true;
    } else {
      data.features.push_back(std::move(col));
    }
  }
  if (!found) throw DataError(source + ": target attribute '" + options.target + "' not found");
  data.validate();
  return data;
}

RawDataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path);
  return options.format == DataFormat::Arff ? parse_arff(in, options, path.string())
                                            : parse_csv(in, options, path.string());
}

namespace {

void write_cell(std::ostream& out, const RawValue& v, char delim) {
  if (is_missing(v)) {
    out << '?';
    return;
  }
  const std::string s = category_key(v);
  double as_number;
  // Strings that would read back as numbers or as missing get quoted.
  const bool quote = s.find_first_of(std::string("\"\n\r") + delim) != std::string::npos || s == "?" ||
                     (std::holds_alternative<std::string>(v) && (s.empty() || parse_double(s, as_number)));
  if (quote) {
    out << '"';
    for (char c : s) out << (c == '"' ? "\"\"" : std::string(1, c));
    out << '"';
  } else {
    out << s;
  }
}

}  // namespace

void write_csv(const RawDataset& data, std::ostream& out, char delimiter) {
  for (const auto& c : data.features) out << c.name << delimiter;
  out << data.target.name << '\n';
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (const auto& c : data.features) {
      write_cell(out, c.values[r], delimiter);
      out << delimiter;
    }
    write_cell(out, data.target.values[r], delimiter);
    out << '\n';
  }
}

SplitIndices split_indices(const RawDataset& data, std::size_t n_train, std::uint64_t seed, const Stratify& stratify,
                           std::size_t n_test) {
  const std::size_t rows = data.rows();
  if (n_train < 1 || n_train >= rows)
    throw ValidationError("split: n_train must be in [1, " + std::to_string(rows) + "), got " + std::to_string(n_train));
  if (n_test > rows - n_train)
    throw ValidationError("split: n_test " + std::to_string(n_test) + " exceeds the " + std::to_string(rows - n_train) +
                          " rows left after training");
  Rng rng(seed);
  SplitIndices out;
  std::vector<char> in_train(rows, 0);

  if (stratify.kind == Stratify::Kind::None) {
    std::vector<std::size_t> order(rows);
    for (std::size_t i = 0; i < rows; ++i) order[i] = i;
    rng.shuffle(order);
    out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  } else {
    if (!(stratify.positive_fraction >= 0.0 && stratify.positive_fraction <= 1.0))
      throw ValidationError("split: positive fraction must be in [0, 1]");
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < rows; ++i) {
      const auto& v = data.target.values[i];
      (!is_missing(v) && category_key(v) == stratify.positive_label ? pos : neg).push_back(i);
    }
    const auto n_pos = static_cast<std::size_t>(std::llround(stratify.positive_fraction * static_cast<double>(n_train)));
    const std::size_t n_neg = n_train - n_pos;
    if (n_pos > pos.size() || n_neg > neg.size())
      throw ValidationError("split: need " + std::to_string(n_pos) + " '" + stratify.positive_label + "' and " +
                            std::to_string(n_neg) + " other rows, have " + std::to_string(pos.size()) + " and " +
                            std::to_string(neg.size()));
    rng.shuffle(pos);
    rng.shuffle(neg);
    out.train.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(n_pos));
    out.train.insert(out.train.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(n_neg));
  }
  std::sort(out.train.begin(), out.train.end());
  for (std::size_t i : out.train) in_train[i] = 1;
  for (std::size_t i = 0; i < rows; ++i)
    if (!in_train[i]) out.test.push_back(i);
  if (n_test > 0) {
    // Keep a seeded subset of the remainder, in row order.
    rng.shuffle(out.test);
    out.test.resize(n_test);
    std::sort(out.test.begin(), out.test.end());
  }
  return out;
}

std::pair<RawDataset, RawDataset> split(const RawDataset& data, std::size_t n_train, std::uint64_t seed,
                                        const Stratify& stratify, std::size_t n_test) {
  const SplitIndices idx = split_indices(data, n_train, seed, stratify, n_test);
  return {data.select_rows(idx.train), data.select_rows(idx.test)};
}

}  // namespace din
