#include "din/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "din/error.hpp"

namespace din {

using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "din-model";

std::string fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json spec_to_json(const FeatureSpec& s) {
  json j{{"name", s.name}, {"has_missing", s.has_missing}, {"degenerate", s.degenerate}};
  if (const auto* b = std::get_if<ContinuousBins>(&s.kind)) {
    j["kind"] = "continuous";
    j["min"] = b->min;
    j["max"] = b->max;
    j["levels"] = b->levels;
  } else {
    j["kind"] = "categorical";
    j["categories"] = std::get<CategoryDictionary>(s.kind).categories;
  }
  return j;
}

FeatureSpec spec_from_json(const json& j) {
  FeatureSpec s;
  s.name = j.at("name").get<std::string>();
  s.has_missing = j.at("has_missing").get<bool>();
  s.degenerate = j.at("degenerate").get<bool>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "continuous") {
    s.kind = ContinuousBins{j.at("min").get<double>(), j.at("max").get<double>(), j.at("levels").get<int>()};
  } else if (kind == "categorical") {
    s.kind = CategoryDictionary{j.at("categories").get<std::vector<std::string>>()};
  } else {
    throw ModelFileError(ModelFileError::Kind::Format, "model file: unknown quantizer kind '" + kind + "'");
  }
  return s;
}

json payload(const DINModel& m) {
  json layers = json::array();
  for (const auto& l : m.topology.layers) {
    json shapes = json::array();
    for (const auto& n : l.nodes) shapes.push_back({n.n_in, n.n_out});
    layers.push_back({{"nodes", shapes}, {"groups", l.groups}});
  }
  json nodes = json::array();
  for (const auto& layer : m.nodes) {
    json row = json::array();
    for (const auto& n : layer) {
      row.push_back({{"n_in", n.n_in},
                     {"n_out", n.n_out},
                     {"channel", std::vector<double>(n.channel.data().begin(), n.channel.data().end())},
                     {"mi_in_y", n.mi_in_y},
                     {"mi_out_y", n.mi_out_y},
                     {"diagnostics",
                      {{"iterations", n.diagnostics.iterations},
                       {"converged", n.diagnostics.converged},
                       {"i_in_out", n.diagnostics.i_in_out},
                       {"i_y_out", n.diagnostics.i_y_out},
                       {"lagrangian_trace", n.diagnostics.lagrangian_trace}}}});
    }
    nodes.push_back(std::move(row));
  }
  json quantizers = json::array();
  for (const auto& q : m.quantizers) quantizers.push_back(spec_to_json(q));
  return {{"topology", {{"layers", layers}}},
          {"nodes", nodes},
          {"quantizers", quantizers},
          {"class_names", m.class_names},
          {"class_alignment", m.class_alignment},
          {"beta", m.beta},
          {"tol", m.tol},
          {"max_iter", m.max_iter},
          {"seed", m.seed}};
}

DINModel from_payload(const json& p) {
  DINModel m;
  for (const auto& l : p.at("topology").at("layers")) {
    Layer layer;
    for (const auto& s : l.at("nodes")) layer.nodes.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
    layer.groups = l.at("groups").get<std::vector<std::vector<std::size_t>>>();
    m.topology.layers.push_back(std::move(layer));
  }
  for (const auto& row : p.at("nodes")) {
    std::vector<TrainedNode> layer;
    for (const auto& n : row) {
      TrainedNode t;
      t.n_in = n.at("n_in").get<std::size_t>();
      t.n_out = n.at("n_out").get<std::size_t>();
      t.channel = ConditionalMatrix(t.n_in, t.n_out, n.at("channel").get<std::vector<double>>());
      t.mi_in_y = n.at("mi_in_y").get<double>();
      t.mi_out_y = n.at("mi_out_y").get<double>();
      const auto& d = n.at("diagnostics");
      t.diagnostics.iterations = d.at("iterations").get<int>();
      t.diagnostics.converged = d.at("converged").get<bool>();
      t.diagnostics.i_in_out = d.at("i_in_out").get<double>();
      t.diagnostics.i_y_out = d.at("i_y_out").get<double>();
      t.diagnostics.lagrangian_trace = d.at("lagrangian_trace").get<std::vector<double>>();
      layer.push_back(std::move(t));
    }
    m.nodes.push_back(std::move(layer));
  }
  for (const auto& q : p.at("quantizers")) m.quantizers.push_back(spec_from_json(q));
  m.class_names = p.at("class_names").get<std::vector<std::string>>();
  m.class_alignment = p.at("class_alignment").get<std::vector<int>>();
  m.beta = p.at("beta").get<double>();
  m.tol = p.at("tol").get<double>();
  m.max_iter = p.at("max_iter").get<int>();
  m.seed = p.at("seed").get<std::uint64_t>();
  m.validate();
  return m;
}

}  // namespace

std::string model_to_json(const DINModel& model) {
  model.validate();
  json body = payload(model);
  json doc{{"format", kFormatTag},
           {"version", kModelFormatVersion},
           {"checksum", "fnv1a64:" + fnv1a64(body.dump())},
           {"model", std::move(body)}};
  return doc.dump(1) + "\n";
}

DINModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelFileError(ModelFileError::Kind::Checksum,
                         std::string("model file is truncated or corrupt (checksum cannot be verified): ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kFormatTag)
    throw ModelFileError(ModelFileError::Kind::Format, "not a din-model file");
  if (!doc.contains("version") || !doc["version"].is_number_integer())
    throw ModelFileError(ModelFileError::Kind::Version, "model file has no version");
  const int version = doc["version"].get<int>();
  if (version != kModelFormatVersion)
    throw ModelFileError(ModelFileError::Kind::Version, "model file version " + std::to_string(version) +
                                                            " is not supported (this build reads version " +
                                                            std::to_string(kModelFormatVersion) + ")");
  if (!doc.contains("model") || !doc.contains("checksum"))
    throw ModelFileError(ModelFileError::Kind::Checksum, "model file has no payload or checksum");
  const std::string expected = doc["checksum"].get<std::string>();
  const std::string actual = "fnv1a64:" + fnv1a64(doc["model"].dump());
  if (expected != actual)
    throw ModelFileError(ModelFileError::Kind::Checksum,
                         "model file checksum mismatch: stored " + expected + ", computed " + actual);
  try {
    return from_payload(doc["model"]);
  } catch (const json::exception& e) {
    throw ModelFileError(ModelFileError::Kind::Format, std::string("model file: ") + e.what());
  } catch (const ValidationError& e) {
    throw ModelFileError(ModelFileError::Kind::Format, std::string("model file: ") + e.what());
  }
}

void save_model(const DINModel& model, const std::filesystem::path& path) {
  const std::string text = model_to_json(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write model file '" + path.string() + "'");
  out << text;
  if (!out) throw Error("failed writing model file '" + path.string() + "'");
}

DINModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace din
