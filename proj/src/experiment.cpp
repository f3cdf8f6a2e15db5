#include "revpref/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "revpref/demand.hpp"
#include "revpref/rng.hpp"
#include "revpref/rp_query.hpp"
#include "revpref/svm.hpp"
#include "revpref/value_query.hpp"

namespace revpref {

void validate(const ExperimentConfig& cfg) {
  if (cfg.price_law.lo <= 0 || cfg.price_law.hi < cfg.price_law.lo)
    throw std::invalid_argument("ExperimentConfig: bad price law");
  if (cfg.budget_law.lo <= 0 || cfg.budget_law.hi < cfg.budget_law.lo)
    throw std::invalid_argument("ExperimentConfig: bad budget law");
  if (cfg.trials < 1 || cfg.d < 1 || cfg.test_size < 1)
    throw std::invalid_argument("ExperimentConfig: bad counts");
  for (std::size_t i = 0; i + 1 < cfg.sample_sizes.size(); ++i)
    if (cfg.sample_sizes[i] >= cfg.sample_sizes[i + 1])
      throw std::invalid_argument("ExperimentConfig: sample sizes must increase");
  if (cfg.mode != "stat" && cfg.mode != "query" && cfg.mode != "value-query" &&
      cfg.mode != "value-stat")
    throw std::invalid_argument("ExperimentConfig: unknown mode '" + cfg.mode + "'");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("class")) cfg.klass = class_from_name(j.at("class"));
  cfg.mode = j.value("mode", cfg.mode);
  cfg.d = j.value("d", cfg.d);
  cfg.kappa = j.value("kappa", cfg.kappa);
  cfg.n_bits = j.value("n_bits", cfg.n_bits);
  if (j.contains("price_law")) {
    cfg.price_law.lo = j.at("price_law").value("lo", cfg.price_law.lo);
    cfg.price_law.hi = j.at("price_law").value("hi", cfg.price_law.hi);
  }
  if (j.contains("budget_law")) {
    cfg.budget_law.lo = j.at("budget_law").value("lo", cfg.budget_law.lo);
    cfg.budget_law.hi = j.at("budget_law").value("hi", cfg.budget_law.hi);
  }
  if (j.contains("sample_sizes"))
    cfg.sample_sizes = j.at("sample_sizes").get<std::vector<int>>();
  cfg.trials = j.value("trials", cfg.trials);
  cfg.test_size = j.value("test_size", cfg.test_size);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.tol = j.value("tol", cfg.tol);
  cfg.out_prefix = j.value("out_prefix", cfg.out_prefix);
  cfg.threads = j.value("threads", cfg.threads);
  validate(cfg);
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["class"] = class_name(cfg.klass);
  j["mode"] = cfg.mode;
  j["d"] = cfg.d;
  j["kappa"] = cfg.kappa;
  j["n_bits"] = cfg.n_bits;
  j["price_law"] = {{"lo", cfg.price_law.lo}, {"hi", cfg.price_law.hi}};
  j["budget_law"] = {{"lo", cfg.budget_law.lo}, {"hi", cfg.budget_law.hi}};
  j["sample_sizes"] = cfg.sample_sizes;
  j["trials"] = cfg.trials;
  j["test_size"] = cfg.test_size;
  j["seed"] = cfg.seed;
  j["tol"] = cfg.tol;
  j["out_prefix"] = cfg.out_prefix;
  j["threads"] = cfg.threads;
  return j;
}

PriceBudget sample_instance(const PriceLaw& price_law, const BudgetLaw& budget_law,
                            int d, std::mt19937_64& rng) {
  PriceBudget pb;
  pb.prices.resize(d);
  const double llo = std::log(price_law.lo), lhi = std::log(price_law.hi);
  for (int j = 0; j < d; ++j) pb.prices[j] = std::exp(uniform_real(rng, llo, lhi));
  pb.budget = uniform_real(rng, budget_law.lo, budget_law.hi);
  return pb;
}

namespace {

std::mt19937_64 trial_rng(std::uint64_t seed, int m, int trial) {
  std::seed_seq seq{static_cast<std::uint64_t>(seed),
                    static_cast<std::uint64_t>(m) + 0x9e3779b9ull,
                    static_cast<std::uint64_t>(trial) + 1ull};
  return std::mt19937_64(seq);
}

// exact equality of parameters, segment for segment
bool utilities_identical(const Utility& a, const Utility& b) {
  if (class_of(a) != class_of(b)) return false;
  if (std::holds_alternative<LinearUtility>(a))
    return std::get<LinearUtility>(a).a == std::get<LinearUtility>(b).a;
  if (std::holds_alternative<LeontiefUtility>(a))
    return std::get<LeontiefUtility>(a).a == std::get<LeontiefUtility>(b).a;
  if (std::holds_alternative<SPLCUtility>(a)) {
    const auto& x = std::get<SPLCUtility>(a).goods;
    const auto& y = std::get<SPLCUtility>(b).goods;
    if (x.size() != y.size()) return false;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j].size() != y[j].size()) return false;
      for (std::size_t k = 0; k < x[j].size(); ++k) {
        if (!(x[j][k].slope == y[j][k].slope)) return false;
        if (x[j][k].length.has_value() != y[j][k].length.has_value()) return false;
        if (x[j][k].length && !(*x[j][k].length == *y[j][k].length)) return false;
      }
    }
    return true;
  }
  return false;
}

bool ces_close(const CESUtility& truth, const CESUtility& learned, double rtol) {
  if (std::abs(truth.rho - learned.rho) > rtol * (1 + std::abs(truth.rho)))
    return false;
  if (truth.a.size() != learned.a.size()) return false;
  for (std::size_t j = 0; j < truth.a.size(); ++j) {
    double t = truth.a[j].to_double(), l = learned.a[j].to_double();
    if (std::abs(t - l) > rtol * (1 + std::abs(t))) return false;
  }
  return true;
}

TrialRecord run_stat_trial(const ExperimentConfig& cfg, int m, int trial) {
  auto rng = trial_rng(cfg.seed, m, trial);
  auto t0 = std::chrono::steady_clock::now();
  if (cfg.klass != UtilityClass::linear)
    throw std::invalid_argument("run_experiment: stat mode supports the linear class");

  LinearUtility truth = random_linear(cfg.d, cfg.n_bits, rng);
  Utility tu = truth;

  std::vector<LabeledDemand> train(m);
  for (auto& s : train) {
    s.pb = sample_instance(cfg.price_law, cfg.budget_law, cfg.d, rng);
    s.bundle = demand(tu, s.pb).bundle;
  }
  auto [hyp, report] = svm_train(train, FeatureMapSpec::linear(cfg.d));

  std::vector<PriceBudget> train_pbs, test_pbs(cfg.test_size);
  for (const auto& s : train) train_pbs.push_back(s.pb);
  for (auto& pb : test_pbs)
    pb = sample_instance(cfg.price_law, cfg.budget_law, cfg.d, rng);

  RPError train_err = rp_error(tu, hyp, train_pbs, cfg.tol);
  RPError test_err = rp_error(tu, hyp, test_pbs, cfg.tol);

  TrialRecord rec;
  rec.trial = trial;
  rec.m = m;
  rec.err_value = test_err.value_rate;
  rec.err_bundle = test_err.bundle_rate;
  rec.train_err = report.converged ? train_err.value_rate : 1.0;
  rec.queries = 0;
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

TrialRecord run_query_trial(const ExperimentConfig& cfg, int trial) {
  auto rng = trial_rng(cfg.seed, 0, trial);
  auto t0 = std::chrono::steady_clock::now();

  Utility truth = random_utility(cfg.klass, cfg.d, cfg.kappa, cfg.n_bits, rng());
  Domain dom = cfg.klass == UtilityClass::splc ? Domain::nonnegative : Domain::unit_cube;
  RPOracle oracle(truth, dom);

  bool exact = false;
  switch (cfg.klass) {
    case UtilityClass::linear: {
      Utility learned = learn_linear_rp(oracle, cfg.d, cfg.n_bits);
      exact = utilities_identical(truth, learned);
      break;
    }
    case UtilityClass::splc: {
      Utility learned = learn_splc_rp(oracle, cfg.d, cfg.kappa, cfg.n_bits);
      exact = utilities_identical(truth, learned);
      break;
    }
    case UtilityClass::ces: {
      CESUtility learned = learn_ces_rp(oracle, cfg.d);
      exact = ces_close(std::get<CESUtility>(truth), learned, 1e-6);
      break;
    }
    case UtilityClass::leontief: {
      Utility learned = learn_leontief_rp_query(oracle, cfg.d);
      exact = utilities_identical(truth, learned);
      break;
    }
  }

  TrialRecord rec;
  rec.trial = trial;
  rec.m = 0;
  rec.err_value = exact ? 0.0 : 1.0;
  rec.err_bundle = rec.err_value;
  rec.queries = oracle.query_count();
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

TrialRecord run_value_query_trial(const ExperimentConfig& cfg, int trial) {
  auto rng = trial_rng(cfg.seed, 0, trial);
  auto t0 = std::chrono::steady_clock::now();

  Utility truth = random_utility(cfg.klass, cfg.d, cfg.kappa, cfg.n_bits, rng());
  ValueOracle oracle(truth);

  bool exact = false;
  switch (cfg.klass) {
    case UtilityClass::linear:
      exact = utilities_identical(truth, vq_linear(oracle, cfg.d));
      break;
    case UtilityClass::splc:
      exact = utilities_identical(truth, vq_splc(oracle, cfg.d, cfg.n_bits));
      break;
    case UtilityClass::ces:
      exact = ces_close(std::get<CESUtility>(truth),
                        vq_ces(oracle, cfg.d, std::get<CESUtility>(truth).rho), 1e-9);
      break;
    case UtilityClass::leontief:
      exact = utilities_identical(truth, vq_leontief(oracle, cfg.d, cfg.n_bits));
      break;
  }

  TrialRecord rec;
  rec.trial = trial;
  rec.m = 0;
  rec.err_value = exact ? 0.0 : 1.0;
  rec.err_bundle = rec.err_value;
  rec.queries = oracle.query_count();
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

TrialRecord run_value_stat_trial(const ExperimentConfig& cfg, int m, int trial) {
  if (cfg.klass != UtilityClass::leontief)
    throw std::invalid_argument(
        "run_experiment: value-stat mode supports the leontief class");
  auto rng = trial_rng(cfg.seed, m, trial);
  auto t0 = std::chrono::steady_clock::now();
  LeontiefStatTrial out =
      leontief_value_stat_trial(cfg.d, cfg.n_bits, m, cfg.test_size, rng);
  TrialRecord rec;
  rec.trial = trial;
  rec.m = m;
  rec.err_value = out.test_error;
  rec.err_bundle = out.sandwich_ok ? 0.0 : 1.0;
  rec.train_err = out.train_error;
  rec.queries = m;
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace

LeontiefStatTrial leontief_value_stat_trial(int d, int n_bits, int m, int test_size,
                                            std::mt19937_64& rng) {
  LeontiefUtility truth = random_leontief(d, n_bits, rng);
  const long grid = 1 << 12;
  auto draw_bundle = [&]() {
    BundleQ x(d);
    for (int j = 0; j < d; ++j) x[j] = Rational(uniform_int(rng, 0, grid), grid);
    return x;
  };

  LeontiefEstimate est(d);
  std::vector<BundleQ> train(m);
  for (auto& x : train) x = draw_bundle();

  LeontiefStatTrial out;
  for (const auto& x : train) {
    Rational y = eval<Rational>(truth, x);
    est.update(x, y);
    for (int j = 0; j < d; ++j)  // the estimate may only shrink toward a_j
      if (est.b[j] && *est.b[j] < truth.a[j]) out.sandwich_ok = false;
  }

  int train_miss = 0;
  for (const auto& x : train)
    if (!(est.predict(x) == eval<Rational>(truth, x))) ++train_miss;
  out.train_error = static_cast<double>(train_miss) / static_cast<double>(m);

  int miss = 0;
  for (int t = 0; t < test_size; ++t) {
    BundleQ x = draw_bundle();
    if (!(est.predict(x) == eval<Rational>(truth, x))) ++miss;
  }
  out.test_error = static_cast<double>(miss) / static_cast<double>(test_size);
  return out;
}

std::string to_csv(const std::vector<TrialRecord>& rows) {
  std::string out = "trial,m,err_value,err_bundle,train_err,queries,seconds\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.10g,%.10g,%.10g,%ld,%.3f\n", r.trial,
                  r.m, r.err_value, r.err_bundle, r.train_err, r.queries, r.seconds);
    out += buf;
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);

  const bool swept = cfg.mode == "stat" || cfg.mode == "value-stat";
  std::vector<int> sizes = swept ? cfg.sample_sizes : std::vector<int>{0};

  struct Job {
    int m;
    int trial;
  };
  std::vector<Job> jobs;
  for (int m : sizes)
    for (int t = 0; t < cfg.trials; ++t) jobs.push_back({m, t});

  std::vector<TrialRecord> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  int nthreads = cfg.threads > 0
                     ? cfg.threads
                     : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<int>(nthreads, static_cast<int>(jobs.size()));

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      if (cfg.mode == "stat")
        rows[i] = run_stat_trial(cfg, job.m, job.trial);
      else if (cfg.mode == "query")
        rows[i] = run_query_trial(cfg, job.trial);
      else if (cfg.mode == "value-query")
        rows[i] = run_value_query_trial(cfg, job.trial);
      else
        rows[i] = run_value_stat_trial(cfg, job.m, job.trial);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  // aggregation is a single-writer step over the ordered rows
  nlohmann::json per_m = nlohmann::json::array();
  for (int m : sizes) {
    std::vector<double> errs;
    double bundle_sum = 0, train_sum = 0;
    long query_max = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].m != m) continue;
      errs.push_back(rows[i].err_value);
      bundle_sum += rows[i].err_bundle;
      train_sum += rows[i].train_err;
      query_max = std::max(query_max, rows[i].queries);
    }
    std::vector<double> sorted = errs;
    std::sort(sorted.begin(), sorted.end());
    double mean = 0;
    for (double e : errs) mean += e;
    mean /= static_cast<double>(errs.size());
    nlohmann::json entry;
    entry["m"] = m;
    entry["trials"] = errs.size();
    entry["mean_err_value"] = mean;
    entry["median_err_value"] = sorted[sorted.size() / 2];
    entry["q90_err_value"] = sorted[(sorted.size() * 9) / 10];
    entry["mean_err_bundle"] = bundle_sum / static_cast<double>(errs.size());
    entry["mean_train_err"] = train_sum / static_cast<double>(errs.size());
    entry["max_queries"] = query_max;
    per_m.push_back(entry);
  }

  ExperimentResult result;
  result.rows = std::move(rows);
  result.summary["config"] = to_json(cfg);
  result.summary["per_m"] = per_m;

  if (!cfg.out_prefix.empty()) {
    std::ofstream csv(cfg.out_prefix + ".csv");
    csv << to_csv(result.rows);
    std::ofstream js(cfg.out_prefix + ".json");
    js << result.summary.dump(2) << "\n";
  }
  return result;
}

}  // namespace revpref
