#pragma once

// Experiment orchestration: instance distributions, trial execution across a
// worker pool, sample-size sweeps, and CSV/JSON reporting.

#include <json.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "revpref/types.hpp"
#include "revpref/utility.hpp"

namespace revpref {

struct PriceLaw {  // log-uniform on [lo, hi]
  double lo = 0.5;
  double hi = 2.0;
};

struct BudgetLaw {  // uniform on [lo, hi]
  double lo = 0.1;
  double hi = 2.0;
};

struct ExperimentConfig {
  UtilityClass klass = UtilityClass::linear;
  std::string mode = "stat";  // stat | query | value-query | value-stat
  int d = 5;
  int kappa = 2;
  int n_bits = 4;
  PriceLaw price_law;
  BudgetLaw budget_law;
  std::vector<int> sample_sizes = {25, 50, 100, 200, 400};
  int trials = 50;
  int test_size = 200;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::string out_prefix;  // empty: nothing written
  int threads = 0;         // 0: hardware concurrency
};

void validate(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

// CSV columns: trial, m, err_value, err_bundle, train_err, queries, seconds.
struct TrialRecord {
  int trial = 0;
  int m = 0;
  double err_value = 0;
  double err_bundle = 0;
  double train_err = 0;
  long queries = 0;
  double seconds = 0;
};

PriceBudget sample_instance(const PriceLaw& price_law, const BudgetLaw& budget_law,
                            int d, std::mt19937_64& rng);

struct ExperimentResult {
  std::vector<TrialRecord> rows;
  nlohmann::json summary;
};

// Runs the configured sweep; writes <out_prefix>.csv and <out_prefix>.json
// when an output prefix is set. Fully deterministic under a fixed seed apart
// from the wall-time column.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string to_csv(const std::vector<TrialRecord>& rows);

// One Algorithm-3 learning trial on uniform random bundles: returns the test
// mismatch rate and whether every update kept b_j >= a_j (checked exactly).
struct LeontiefStatTrial {
  double test_error = 0;
  double train_error = 0;
  bool sandwich_ok = true;
};
LeontiefStatTrial leontief_value_stat_trial(int d, int n_bits, int m, int test_size,
                                            std::mt19937_64& rng);

}  // namespace revpref
