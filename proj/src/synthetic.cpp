#include "din/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <string>
#include <vector>

#include "din/rng.hpp"

namespace din {

namespace {

double normal(Rng& rng, double mean, double sd) {
  // Box-Muller; one draw per call keeps the stream layout simple.
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double round_to(double v, double step) {
  if (step >= 1.0) return std::round(v / step) * step;
  const double inv = std::round(1.0 / step);  // divide, so 0.1 steps print as 3.9, not 3.9000000000000004
  return std::round(v * inv) / inv;
}

std::string pick(Rng& rng, const std::vector<std::string>& values, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (u < weights[k]) return values[k];
    u -= weights[k];
  }
  return values.back();
}

struct Numeric {
  const char* name;
  double ill_mean, ill_sd, ok_mean, ok_sd, step, lo, hi, missing;
};

struct Nominal {
  const char* name;
  std::vector<std::string> values;
  std::vector<double> ill_weights, ok_weights;
  double missing;
};

}  // namespace

RawDataset make_ckd_like(const SyntheticOptions& options) {
  // Columns in the UCI order; separate streams per column.
  const std::vector<Numeric> numeric{
      {"age", 55, 16, 46, 15, 1, 2, 90, 0.02},      {"bp", 80, 14, 72, 8, 10, 50, 180, 0.03},
      {"bgr", 170, 80, 110, 20, 1, 22, 490, 0.11},  {"bu", 75, 50, 32, 11, 1, 1.5, 391, 0.05},
      {"sc", 4.0, 3.5, 0.9, 0.25, 0.1, 0.4, 76, 0.04}, {"sod", 133, 7, 141, 4.5, 1, 4.5, 163, 0.22},
      {"pot", 4.9, 2.5, 4.4, 0.6, 0.1, 2.5, 47, 0.22}, {"hemo", 10.6, 2.2, 15.2, 1.3, 0.1, 3.1, 17.8, 0.13},
      {"pcv", 32, 7, 46, 4, 1, 9, 54, 0.18},        {"wbcc", 9000, 3500, 7700, 1800, 100, 2200, 26400, 0.26},
      {"rbcc", 3.9, 0.9, 5.4, 0.6, 0.1, 2.1, 8.0, 0.33}};
  const std::vector<Nominal> nominal{
      {"sg", {"1.005", "1.010", "1.015", "1.020", "1.025"}, {4, 45, 40, 10, 1}, {0, 0, 1, 45, 54}, 0.12},
      {"al", {"0", "1", "2", "3", "4", "5"}, {20, 20, 20, 20, 15, 5}, {100, 0, 0, 0, 0, 0}, 0.12},
      {"su", {"0", "1", "2", "3", "4", "5"}, {60, 10, 10, 10, 6, 4}, {100, 0, 0, 0, 0, 0}, 0.12},
      {"rbc", {"normal", "abnormal"}, {55, 45}, {100, 0}, 0.38},
      {"pc", {"normal", "abnormal"}, {55, 45}, {100, 0}, 0.16},
      {"pcc", {"present", "notpresent"}, {17, 83}, {0, 100}, 0.01},
      {"ba", {"present", "notpresent"}, {9, 91}, {0, 100}, 0.01},
      {"htn", {"yes", "no"}, {59, 41}, {0, 100}, 0.005},
      {"dm", {"yes", "no"}, {55, 45}, {0, 100}, 0.005},
      {"cad", {"yes", "no"}, {14, 86}, {0, 100}, 0.005},
      {"appet", {"good", "poor"}, {67, 33}, {100, 0}, 0.003},
      {"pe", {"yes", "no"}, {30, 70}, {0, 100}, 0.003},
      {"ane", {"yes", "no"}, {24, 76}, {0, 100}, 0.003}};

  RawDataset data;
  data.target.name = "class";
  data.target.declared_categories = std::vector<std::string>{"ckd", "notckd"};
  Rng label_rng(derive_seed(options.seed, {0}));
  std::vector<bool> ill(options.rows);
  for (std::size_t r = 0; r < options.rows; ++r) {
    ill[r] = label_rng.uniform() < options.positive_rate;
    data.target.values.emplace_back(std::string(ill[r] ? "ckd" : "notckd"));
  }

  // UCI column order: age bp sg al su rbc pc pcc ba bgr bu sc sod pot hemo pcv wbcc rbcc htn dm cad appet pe ane
  const std::vector<std::pair<bool, std::size_t>> order{
      {true, 0},  {true, 1},  {false, 0}, {false, 1}, {false, 2},  {false, 3},  {false, 4},  {false, 5},
      {false, 6}, {true, 2},  {true, 3},  {true, 4},  {true, 5},   {true, 6},   {true, 7},   {true, 8},
      {true, 9},  {true, 10}, {false, 7}, {false, 8}, {false, 9},  {false, 10}, {false, 11}, {false, 12}};

  std::uint64_t stream = 1;
  for (const auto& [is_numeric, idx] : order) {
    Rng rng(derive_seed(options.seed, {stream++}));
    RawColumn col;
    if (is_numeric) {
      const Numeric& f = numeric[idx];
      col.name = f.name;
      // A 2 g/dl gap is wider than any of the default 10 bins over hemo's range.
      const bool planted = options.separable && col.name == "hemo";
      for (std::size_t r = 0; r < options.rows; ++r) {
        double v = ill[r] ? normal(rng, f.ill_mean, f.ill_sd) : normal(rng, f.ok_mean, f.ok_sd);
        if (planted) v = ill[r] ? std::min(v, 12.0) : std::max(v, 14.0);
        const bool missing = !planted && rng.uniform() < f.missing * options.missing_scale;
        if (missing) col.values.emplace_back(std::monostate{});
        else col.values.emplace_back(round_to(std::clamp(v, f.lo, f.hi), f.step));
      }
    } else {
      const Nominal& f = nominal[idx];
      col.name = f.name;
      col.declared_categories = f.values;
      const bool planted = options.separable && (col.name == "sg" || col.name == "al" || col.name == "htn");
      std::vector<double> ill_w = f.ill_weights, ok_w = f.ok_weights;
      if (planted) {
        // Each value goes to the class that favours it; the other class never draws it.
        const double ill_total = std::accumulate(ill_w.begin(), ill_w.end(), 0.0);
        const double ok_total = std::accumulate(ok_w.begin(), ok_w.end(), 0.0);
        for (std::size_t k = 0; k < f.values.size(); ++k) {
          if (f.ok_weights[k] / ok_total > f.ill_weights[k] / ill_total) ill_w[k] = 0.0;
          else ok_w[k] = 0.0;
        }
      }
      for (std::size_t r = 0; r < options.rows; ++r) {
        std::string v = pick(rng, f.values, ill[r] ? ill_w : ok_w);
        const bool missing = !planted && rng.uniform() < f.missing * options.missing_scale;
        if (missing) col.values.emplace_back(std::monostate{});
        else col.values.emplace_back(std::move(v));
      }
    }
    data.features.push_back(std::move(col));
  }
  return data;
}

}  // namespace din
