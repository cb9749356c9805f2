// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
//   din_acceptance            run everything, exit 1 if anything failed
//   din_acceptance 3c         run one criterion (exit 0 pass, 1 fail, 77 skip)
//
// The kidney-disease criteria read data/chronic_kidney_disease_full.arff under
// the source tree, or the file named by DIN_CKD_PATH.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "analysis_support.hpp"
#include "din/analysis.hpp"
#include "din/experiment.hpp"
#include "din/metrics.hpp"
#include "din/synthetic.hpp"
#include "support.hpp"

using namespace din;

namespace {

// Pinned tolerances and targets.
constexpr double kCkdAccTarget1 = 0.9762, kCkdAccTol1 = 0.03;
constexpr double kCkdF1Target1 = 0.9709, kCkdF1Tol1 = 0.04;
constexpr double kCkdTrainMin2 = 0.98;
constexpr double kCkdAccTarget2 = 0.9303, kCkdAccTol2 = 0.03;
constexpr int kCkdRuns = 200;

constexpr int kIbProblems = 50;
constexpr double kResidualTol = 1e-6;
constexpr double kStochasticTolerance = 1e-9;
constexpr double kInfoTol = 1e-9;
constexpr double kTinyBeta = 1e-3;
constexpr double kTinyBetaInfo = 0.01;
constexpr int kKronModels = 20;
constexpr double kKronTol = 1e-9;
constexpr double kBoundTol = 1e-6;
constexpr std::size_t kMaxRadix = 5;
constexpr int kXorSeeds = 100;
constexpr double kXorAccuracy = 0.95;
constexpr double kXorBeta = 10.0;
constexpr int kXorRepeats = 15;

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }

std::filesystem::path ckd_path() {
  if (const char* env = std::getenv("DIN_CKD_PATH")) return env;
  return std::filesystem::path(DIN_SOURCE_DIR) / "data" / "chronic_kidney_disease_full.arff";
}

ExperimentConfig ckd_config(std::vector<std::size_t> n_out, std::size_t n_train, Stratify::Kind stratify) {
  ExperimentConfig c;
  c.dataset.path = ckd_path().string();
  c.network.n_out = std::move(n_out);
  c.network.beta = 5.0;
  c.split.n_train = n_train;
  c.split.stratify = stratify;
  c.runs = kCkdRuns;
  c.seed = 1;
  return c;
}

Outcome ckd_row_320() {
  if (!std::filesystem::exists(ckd_path())) return {Status::Skip, "dataset missing at " + ckd_path().string()};
  const auto c = ckd_config({2}, 320, Stratify::Kind::None);
  const auto report = run_experiment(c, load_configured_dataset(c));
  const double acc = report.test.accuracy.mean, f1 = report.test.f1.mean;
  return verdict(std::abs(acc - kCkdAccTarget1) <= kCkdAccTol1 && std::abs(f1 - kCkdF1Target1) <= kCkdF1Tol1,
                 std::to_string(kCkdRuns) + " runs, test accuracy " + fmt(acc) + " (target " + fmt(kCkdAccTarget1) +
                     " +/- " + fmt(kCkdAccTol1) + "), test F1 " + fmt(f1) + " (target " + fmt(kCkdF1Target1) +
                     " +/- " + fmt(kCkdF1Tol1) + ")");
}

Outcome ckd_row_200() {
  if (!std::filesystem::exists(ckd_path())) return {Status::Skip, "dataset missing at " + ckd_path().string()};
  const auto c = ckd_config({3}, 200, Stratify::Kind::Balanced);
  const auto report = run_experiment(c, load_configured_dataset(c));
  const double train = report.train.accuracy.mean, test = report.test.accuracy.mean;
  return verdict(train >= kCkdTrainMin2 && std::abs(test - kCkdAccTarget2) <= kCkdAccTol2 && train > test,
                 std::to_string(kCkdRuns) + " runs, train accuracy " + fmt(train) + " (>= " + fmt(kCkdTrainMin2) +
                     "), test accuracy " + fmt(test) + " (target " + fmt(kCkdAccTarget2) + " +/- " +
                     fmt(kCkdAccTol2) + ")");
}

std::vector<IBProblem> ib_problems(double fixed_beta = 0.0) {
  Rng rng(derive_seed(2024, {1}));
  const double betas[] = {0.1, 1.0, 5.0, 20.0};
  std::vector<IBProblem> out;
  for (int k = 0; k < kIbProblems; ++k)
    out.push_back(testing::random_problem(rng, fixed_beta > 0 ? fixed_beta : betas[k % 4], 16, 4));
  return out;
}

Outcome ib_properties() {
  int converged = 0;
  double residual = 0.0, stochastic = 0.0, dpi = -1.0, capacity = -1.0;
  const auto problems = ib_problems();
  for (std::size_t k = 0; k < problems.size(); ++k) {
    const auto& p = problems[k];
    const auto sol = solve_ib(p, 1e-10, 5000, k);
    if (!sol.diagnostics.converged) continue;
    ++converged;
    residual = std::max(residual, max_abs_difference(ib_step(p, sol.channel), sol.channel));
    for (std::size_t i = 0; i < sol.channel.rows(); ++i) {
      double s = 0.0;
      for (double v : sol.channel.row(i)) s += v;
      stochastic = std::max(stochastic, std::abs(s - 1.0));
    }
    dpi = std::max(dpi, sol.diagnostics.i_y_out - mutual_information(p.px, p.py_given_x));
    const double cap = std::min(entropy(p.px), std::log2(static_cast<double>(p.n_out)));
    capacity = std::max(capacity, sol.diagnostics.i_in_out - cap);
  }
  return verdict(converged > 0 && residual < kResidualTol && stochastic < kStochasticTolerance && dpi <= kInfoTol &&
                     capacity <= kInfoTol,
                 std::to_string(converged) + "/" + std::to_string(kIbProblems) + " converged; residual " +
                     fmt(residual) + ", row-sum error " + fmt(stochastic) + ", max I(Y;T)-I(Y;X) " + fmt(dpi) +
                     ", max I(X;T)-cap " + fmt(capacity));
}

Outcome tiny_beta() {
  double worst = 0.0;
  const auto problems = ib_problems(kTinyBeta);
  for (std::size_t k = 0; k < problems.size(); ++k)
    worst = std::max(worst, solve_ib(problems[k], 1e-10, 5000, k).diagnostics.i_in_out);
  return verdict(worst < kTinyBetaInfo, std::to_string(kIbProblems) + " problems at beta=" + fmt(kTinyBeta) +
                                            ", max I(X;T) " + fmt(worst) + " bits (< " + fmt(kTinyBetaInfo) + ")");
}

Outcome kron_oracle() {
  Rng rng(derive_seed(2024, {3}));
  double worst = 0.0;
  for (int t = 0; t < kKronModels; ++t) {
    const std::size_t d = t % 2 ? 4 : 2;
    std::vector<std::size_t> cards(d);
    for (auto& c : cards) c = 2 + rng.below(2);
    const auto m = testing::random_model(cards, 2 + rng.below(2), 2, rng);
    const auto fast = compose_full_matrix(m);
    const auto slow = testing::brute_force_matrix(m);
    for (std::size_t k = 0; k < slow.size(); ++k) worst = std::max(worst, std::abs(fast.data()[k] - slow[k]));
  }
  return verdict(worst < kKronTol, std::to_string(kKronModels) + " models (D in {2,4}), max abs difference " +
                                       fmt(worst) + " (< " + fmt(kKronTol) + ")");
}

Outcome bounds() {
  std::size_t models = 0, violations = 0, muxes = 0;
  auto check = [&](const DINModel& m, const QuantizedDataset& q, std::uint64_t seed) {
    const auto flow = mi_flow(m, q, seed);
    violations += check_bounds(flow, kBoundTol).size();
    muxes += flow.muxes.size();
    ++models;
  };
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto q = testing::random_dataset(120, {2, 3, 4, 2, 3, 2, 5}, 2 + s % 2, s);
    const std::vector<std::size_t> n_out{2 + s % 2};
    check(train_network(q, build_topology(q.feature_count(), n_out, q.n_class, q.cardinalities), 5.0, 1e-8, 500, s),
          q, s);
  }
  const auto xq = testing::xor_dataset(50);
  const std::vector<std::size_t> two{2};
  check(train_network(xq, build_topology(2, two, 2, xq.cardinalities), kXorBeta, 1e-8, 500, 1), xq, 1);
  for (std::uint64_t s = 1; s <= 6; ++s) {
    const auto data = make_ckd_like({.rows = 400, .seed = s, .separable = s % 3 == 0});
    const auto specs = fit_quantizers(data, {});
    const auto q = quantize_dataset(data, specs, data.class_names());
    const std::vector<std::size_t> n_out{s % 2 ? 3u : 2u};
    check(train_network(q, build_topology(24, n_out, 2, q.cardinalities), 5.0, 1e-8, 500, s), q, s);
  }
  return verdict(violations == 0, std::to_string(models) + " trained models, " + std::to_string(muxes) +
                                      " multiplexers, " + std::to_string(violations) + " violations (tol " +
                                      fmt(kBoundTol) + ")");
}

Outcome mux_roundtrip() {
  std::size_t grids = 0, failures = 0;
  for (std::size_t len = 2; len <= 3; ++len) {
    std::vector<std::size_t> radices(len, 1);
    while (true) {
      std::size_t total = 1;
      for (auto r : radices) total *= r;
      std::vector<std::vector<int>> cols(len);
      for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        for (std::size_t k = 0; k < len; ++k) {
          cols[k].push_back(static_cast<int>(rest % radices[k]));
          rest /= radices[k];
        }
      }
      const auto codes = mux_combine(cols, radices);
      for (std::size_t n = 0; n < total; ++n) {
        std::vector<int> digits;
        for (std::size_t k = 0; k < len; ++k) digits.push_back(cols[k][n]);
        if (codes[n] != static_cast<int>(n) || mux_decode(static_cast<std::size_t>(codes[n]), radices) != digits)
          ++failures;
      }
      ++grids;
      std::size_t k = 0;
      while (k < len && radices[k] == kMaxRadix) radices[k++] = 1;
      if (k == len) break;
      ++radices[k];
    }
  }
  return verdict(failures == 0, std::to_string(grids) + " radix lists up to (5,5,5), " + std::to_string(failures) +
                                    " mismatches");
}

Outcome xor_synthesis() {
  const auto q = testing::xor_dataset(50);
  const std::vector<std::size_t> n_out{2};
  const auto topo = build_topology(2, n_out, 2, q.cardinalities);
  double worst = 1.0, sum = 0.0, layer0 = 0.0;
  int passing = 0;
  for (int s = 0; s < kXorSeeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    const auto m = train_network(q, topo, kXorBeta, 1e-8, 500, seed);
    const auto pred = predict_quantized(m, q.columns, PredictionMode::ensemble(seed, kXorRepeats));
    const double acc = compute_metrics(pred, q.labels, 1).accuracy;
    worst = std::min(worst, acc);
    sum += acc;
    passing += acc >= kXorAccuracy;
    layer0 = std::max({layer0, m.node(0, 0).diagnostics.i_in_out, m.node(0, 1).diagnostics.i_in_out});
  }
  return verdict(worst >= kXorAccuracy, std::to_string(passing) + "/" + std::to_string(kXorSeeds) +
                                            " seeds reach " + fmt(kXorAccuracy) + "; mean accuracy " +
                                            fmt(sum / kXorSeeds) + ", min " + fmt(worst) +
                                            "; max layer-0 I(X_in;X_out) " + fmt(layer0) + " bits");
}

Outcome determinism() {
  const auto data = make_ckd_like({.rows = 400, .seed = 12});
  ExperimentConfig c;
  c.runs = 20;
  c.seed = 77;
  const auto a = report_to_json(run_experiment(c, data), c).dump(2);
  const auto b = report_to_json(run_experiment(c, data), c).dump(2);
  return verdict(a == b, "two 20-run experiments, reports of " + std::to_string(a.size()) + " bytes " +
                             (a == b ? "identical" : "differ"));
}

Outcome topology_counts() {
  bool ok = true;
  std::string detail;
  const std::vector<std::size_t> n_out{3};
  for (std::size_t d : {2, 4, 8, 16}) {
    const std::vector<std::size_t> cards(d, 4);
    const auto t = build_topology(d, n_out, 2, cards);
    ok = ok && t.node_count() == 2 * d - 1 && t.mixer_count() == d - 1;
    detail += "D=" + std::to_string(d) + ": " + std::to_string(t.node_count()) + " nodes, " +
              std::to_string(t.mixer_count()) + " mixers; ";
  }
  const std::vector<std::size_t> cards(24, 4);
  const auto sizes = build_topology(24, n_out, 2, cards).layer_sizes();
  ok = ok && sizes == std::vector<std::size_t>{24, 12, 6, 3, 1};
  detail += "D=24 layers";
  for (auto s : sizes) detail += " " + std::to_string(s);
  return verdict(ok, detail);
}

struct Criterion {
  const char* id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"1", "kidney disease, n_out=2, 320/80", ckd_row_320},
      {"2", "kidney disease, n_out=3, 200/200, overfitting", ckd_row_200},
      {"3a", "IB solver fixed points", ib_properties},
      {"3b", "small-beta compression", tiny_beta},
      {"3c", "composition vs path enumeration", kron_oracle},
      {"3d", "multiplexer information bounds", bounds},
      {"3e", "multiplexer round trip", mux_roundtrip},
      {"3f", "balanced XOR synthesis", xor_synthesis},
      {"4", "experiment determinism", determinism},
      {"5", "topology counts", topology_counts},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  bool failed = false, ran = false, skipped = false;
  for (const auto& c : criteria) {
    if (!only.empty() && only != c.id) continue;
    ran = true;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    std::printf("%s %-3s %s: %s\n", tag, c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    failed = failed || o.status == Status::Fail;
    skipped = skipped || o.status == Status::Skip;
  }
  if (!ran) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  if (failed) return 1;
  return !only.empty() && skipped ? 77 : 0;
}
