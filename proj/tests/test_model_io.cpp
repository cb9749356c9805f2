#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "din/experiment.hpp"
#include "din/model_io.hpp"
#include "din/synthetic.hpp"

using namespace din;

namespace {

DINModel trained_model() {
  ExperimentConfig c;
  c.split.n_train = 120;
  c.network.n_out = {3};
  return train_run(c, make_ckd_like({.rows = 200, .seed = 3}), 0, 1).model;
}

void check_equal(const DINModel& a, const DINModel& b) {
  CHECK(a.topology == b.topology);
  CHECK(a.quantizers == b.quantizers);
  CHECK(a.class_names == b.class_names);
  CHECK(a.class_alignment == b.class_alignment);
  CHECK(a.beta == b.beta);
  CHECK(a.tol == b.tol);
  CHECK(a.max_iter == b.max_iter);
  CHECK(a.seed == b.seed);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t l = 0; l < a.nodes.size(); ++l)
    for (std::size_t k = 0; k < a.nodes[l].size(); ++k) {
      const auto &x = a.nodes[l][k], &y = b.nodes[l][k];
      CHECK(x.channel == y.channel);
      CHECK(x.mi_in_y == y.mi_in_y);
      CHECK(x.mi_out_y == y.mi_out_y);
      CHECK(x.diagnostics.iterations == y.diagnostics.iterations);
      CHECK(x.diagnostics.converged == y.diagnostics.converged);
      CHECK(x.diagnostics.lagrangian_trace == y.diagnostics.lagrangian_trace);
    }
}

ModelFileError::Kind kind_of(const std::string& text) {
  try {
    model_from_json(text);
  } catch (const ModelFileError& e) {
    return e.kind();
  }
  FAIL("expected ModelFileError");
  return ModelFileError::Kind::Format;
}

}  // namespace

TEST_CASE("model round trip is exact") {
  const auto m = trained_model();
  const std::string text = model_to_json(m);
  check_equal(model_from_json(text), m);
  CHECK(model_to_json(model_from_json(text)) == text);

  const auto path = std::filesystem::temp_directory_path() / "din_model_roundtrip.json";
  save_model(m, path);
  check_equal(load_model(path), m);
  std::filesystem::remove(path);
}

TEST_CASE("damaged model files") {
  const std::string text = model_to_json(trained_model());
  CHECK(kind_of(text.substr(0, text.size() / 2)) == ModelFileError::Kind::Checksum);

  auto doc = nlohmann::json::parse(text);
  doc["version"] = kModelFormatVersion + 1;
  CHECK(kind_of(doc.dump()) == ModelFileError::Kind::Version);

  doc = nlohmann::json::parse(text);
  doc["model"]["beta"] = 6.0;
  CHECK(kind_of(doc.dump()) == ModelFileError::Kind::Checksum);

  doc = nlohmann::json::parse(text);
  doc["format"] = "something-else";
  CHECK(kind_of(doc.dump()) == ModelFileError::Kind::Format);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), Error);
}
