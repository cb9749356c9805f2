// Wall-clock comparison of the OpenMP kernels against the serial reference
// versions on synthetic data. Prints one JSON object per measurement.
//
//   din_bench [rows] [features] [repeats]

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "din/analysis.hpp"
#include "din/network.hpp"
#include "din/rng.hpp"

namespace {

din::QuantizedDataset make_data(std::size_t rows, std::size_t features, std::uint64_t seed) {
  din::Rng rng(seed);
  din::QuantizedDataset q;
  q.cardinalities.assign(features, 4);
  q.n_class = 2;
  q.columns.assign(features, {});
  for (std::size_t r = 0; r < rows; ++r) {
    int score = 0;
    for (std::size_t f = 0; f < features; ++f) {
      const int v = static_cast<int>(rng.below(4));
      q.columns[f].push_back(v);
      if (f < 4) score += v;
    }
    q.labels.push_back(score + (rng.uniform() < 0.1 ? 1 : 0) > 6 ? 1 : 0);
  }
  return q;
}

template <class F>
double best_seconds(int repeats, F&& f) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    if (dt.count() < best) best = dt.count();
  }
  return best;
}

void report(const char* what, double serial, double parallel, bool identical) {
  std::printf("{\"kernel\":\"%s\",\"threads\":%d,\"reference_s\":%.6f,\"parallel_s\":%.6f,\"speedup\":%.3f,"
              "\"identical\":%s}\n",
              what, omp_get_max_threads(), serial, parallel, serial / parallel, identical ? "true" : "false");
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t rows = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 20000;
  const std::size_t features = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 16;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;

  const auto data = make_data(rows, features, 7);
  const std::vector<std::size_t> n_out{3};
  const auto topology = din::build_topology(features, n_out, 2, data.cardinalities);
  const din::TrainingOptions options{5.0, 1e-8, 500, 11, 0};

  din::DINModel serial_model, parallel_model;
  const double t_train_ref = best_seconds(repeats, [&] { serial_model = din::reference::train_network(data, topology, options); });
  const double t_train = best_seconds(repeats, [&] { parallel_model = din::train_network(data, topology, options); });
  report("train_network", t_train_ref, t_train,
         din::reference::predict_quantized(serial_model, data.columns, din::PredictionMode::stochastic(3)) ==
             din::predict_quantized(parallel_model, data.columns, din::PredictionMode::stochastic(3)));

  const auto mode = din::PredictionMode::ensemble(5, 9);
  std::vector<int> a, b;
  const double t_pred_ref = best_seconds(repeats, [&] { a = din::reference::predict_quantized(parallel_model, data.columns, mode); });
  const double t_pred = best_seconds(repeats, [&] { b = din::predict_quantized(parallel_model, data.columns, mode); });
  report("predict_ensemble", t_pred_ref, t_pred, a == b);

  // The end-to-end matrix needs a joint input space that fits in memory.
  const std::size_t small = 8;
  const auto small_data = make_data(rows, small, 9);
  const auto small_topology = din::build_topology(small, n_out, 2, small_data.cardinalities);
  const auto small_model = din::train_network(small_data, small_topology, options);
  din::ConditionalMatrix m_ref, m_par;
  const double t_full_ref = best_seconds(repeats, [&] { m_ref = din::reference::compose_full_matrix(small_model); });
  const double t_full = best_seconds(repeats, [&] { m_par = din::compose_full_matrix(small_model); });
  report("compose_full_matrix", t_full_ref, t_full, std::equal(m_ref.data().begin(), m_ref.data().end(), m_par.data().begin(), m_par.data().end()));
  return 0;
}
