// Experiment CLI: demand oracles, second-best queries, the three learning
// regimes, sample-complexity sweeps, and the verification suite.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "revpref/demand.hpp"
#include "revpref/experiment.hpp"
#include "revpref/feature_map.hpp"
#include "revpref/rp_query.hpp"
#include "revpref/serialize.hpp"
#include "revpref/svm.hpp"
#include "revpref/value_query.hpp"
#include "revpref/verify.hpp"

using namespace revpref;
using nlohmann::json;

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split_commas(s)) out.push_back(std::stod(p));
  return out;
}

std::vector<Rational> parse_rationals(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& p : split_commas(s)) out.push_back(Rational::from_string(p));
  return out;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

Utility load_or_draw_utility(const std::string& utility_file, const std::string& klass,
                             int d, int kappa, int n_bits, std::uint64_t seed) {
  if (!utility_file.empty()) return utility_from_json(load_json(utility_file));
  return random_utility(class_from_name(klass), d, kappa, n_bits, seed);
}

json bundle_to_json(const Bundle& b) { return json(b); }

json bundle_to_json(const BundleQ& b) {
  json arr = json::array();
  for (const auto& r : b) arr.push_back(r.str());
  return arr;
}

int cmd_demand(const std::string& utility_file, const std::string& klass, int d,
               int kappa, int n_bits, std::uint64_t seed, const std::string& prices,
               const std::string& budget, bool exact) {
  Utility u = load_or_draw_utility(utility_file, klass, d, kappa, n_bits, seed);
  json out;
  out["utility"] = to_json(u);
  if (exact) {
    PriceBudgetQ pb{parse_rationals(prices), Rational::from_string(budget)};
    auto res = demand_exact(u, pb);
    out["bundle"] = bundle_to_json(res.bundle);
    out["spent"] = res.spent.str();
    out["tie_broken"] = res.tie_broken;
    out["kkt"] = kkt_check_exact(u, pb, res.bundle);
  } else {
    PriceBudget pb{parse_doubles(prices), std::stod(budget)};
    auto res = demand(u, pb);
    out["bundle"] = bundle_to_json(res.bundle);
    out["spent"] = res.spent;
    out["tie_broken"] = res.tie_broken;
    out["kkt"] = kkt_check(u, pb, res.bundle, 1e-9);
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_second_best(const std::string& w_str, const std::string& prices,
                    const std::string& budget, bool ordering) {
  json out;
  std::vector<double> w = parse_doubles(w_str);
  std::vector<double> p = parse_doubles(prices);
  if (ordering) {
    out["best"] = best_ordering(w, p);
    out["second_best"] = second_best_ordering(w, p);
  } else {
    PriceBudget pb{p, std::stod(budget)};
    Bundle best = admissible_argmax_linear(w, pb);
    SecondBest sb = second_best_linear(w, pb);
    out["best"] = bundle_to_json(best);
    out["second_best"] = bundle_to_json(sb.bundle);
    out["degenerate"] = sb.degenerate;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_learn_stat(int d, int n_bits, int m, int test_size, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.klass = UtilityClass::linear;
  cfg.mode = "stat";
  cfg.d = d;
  cfg.n_bits = n_bits;
  cfg.sample_sizes = {m};
  cfg.trials = 1;
  cfg.test_size = test_size;
  cfg.seed = seed;
  ExperimentResult res = run_experiment(cfg);
  std::cout << res.summary.dump(2) << "\n";
  return 0;
}

int cmd_learn_query(const std::string& klass, int d, int kappa, int n_bits,
                    std::uint64_t seed) {
  UtilityClass c = class_from_name(klass);
  Utility truth = random_utility(c, d, kappa, n_bits, seed);
  Domain dom = c == UtilityClass::splc ? Domain::nonnegative : Domain::unit_cube;
  RPOracle oracle(truth, dom);

  json out;
  out["hidden"] = to_json(truth);
  Utility learned = truth;
  switch (c) {
    case UtilityClass::linear: learned = learn_linear_rp(oracle, d, n_bits); break;
    case UtilityClass::splc: learned = learn_splc_rp(oracle, d, kappa, n_bits); break;
    case UtilityClass::ces: learned = learn_ces_rp(oracle, d); break;
    case UtilityClass::leontief: learned = learn_leontief_rp_query(oracle, d); break;
  }
  out["recovered"] = to_json(learned);
  out["queries"] = oracle.query_count();
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_learn_value(const std::string& mode, const std::string& klass, int d,
                    int kappa, int n_bits, int m, std::uint64_t seed) {
  UtilityClass c = class_from_name(klass);
  json out;
  if (mode == "query") {
    Utility truth = random_utility(c, d, kappa, n_bits, seed);
    ValueOracle oracle(truth);
    out["hidden"] = to_json(truth);
    Utility learned = truth;
    switch (c) {
      case UtilityClass::linear: learned = vq_linear(oracle, d); break;
      case UtilityClass::splc: learned = vq_splc(oracle, d, n_bits); break;
      case UtilityClass::ces:
        learned = vq_ces(oracle, d, std::get<CESUtility>(truth).rho);
        break;
      case UtilityClass::leontief: learned = vq_leontief(oracle, d, n_bits); break;
    }
    out["recovered"] = to_json(learned);
    out["queries"] = oracle.query_count();
  } else if (mode == "stat") {
    if (c != UtilityClass::leontief)
      throw std::runtime_error("learn-value --mode stat supports --class leontief");
    std::mt19937_64 rng(seed);
    LeontiefStatTrial trial = leontief_value_stat_trial(d, n_bits, m, 500, rng);
    out["m"] = m;
    out["test_error"] = trial.test_error;
    out["train_error"] = trial.train_error;
    out["sandwich_ok"] = trial.sandwich_ok;
  } else {
    throw std::runtime_error("learn-value: mode must be stat or query");
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_experiment(const std::string& config_path) {
  ExperimentConfig cfg = config_from_json(load_json(config_path));
  if (cfg.out_prefix.empty()) cfg.out_prefix = "experiment";
  ExperimentResult res = run_experiment(cfg);
  std::cout << res.summary.dump(2) << "\n";
  std::cerr << "wrote " << cfg.out_prefix << ".csv and " << cfg.out_prefix
            << ".json\n";
  return 0;
}

int cmd_verify(std::uint64_t seed, bool quick) {
  auto results = verify::run_suite(seed, quick);
  bool all = true;
  std::printf("%-50s %s\n", "check", "result");
  for (const auto& r : results) {
    all = all && r.pass;
    std::printf("%-50s %s%s%s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                r.detail.empty() ? "" : "  ", r.detail.c_str());
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"utility-maximizing buyer models and revealed-preference learners"};
  app.require_subcommand(1);

  std::string utility_file, klass = "linear", prices, budget = "1", w_str;
  std::string mode = "query", config_path;
  int d = 3, kappa = 2, n_bits = 4, m = 100, test_size = 200;
  std::uint64_t seed = 1;
  bool exact = false, ordering = false, quick = false;

  auto* cd = app.add_subcommand("demand", "optimal bundle for a utility at (p, B)");
  cd->add_option("--utility", utility_file, "utility JSON file");
  cd->add_option("--class", klass, "linear|splc|ces|leontief (random draw)");
  cd->add_option("--d", d);
  cd->add_option("--kappa", kappa);
  cd->add_option("--n-bits", n_bits);
  cd->add_option("--seed", seed);
  cd->add_option("--prices", prices, "comma separated")->required();
  cd->add_option("--budget", budget)->required();
  cd->add_flag("--exact", exact, "rational arithmetic (accepts p/q inputs)");

  auto* cs = app.add_subcommand("second-best", "second-best admissible label");
  cs->add_option("--w", w_str, "comma separated weights")->required();
  cs->add_option("--prices", prices)->required();
  cs->add_option("--budget", budget);
  cs->add_flag("--ordering", ordering, "rank goods instead of allocating");

  auto* cl = app.add_subcommand("learn-stat", "train the linear SVM on one draw");
  cl->add_option("--d", d);
  cl->add_option("--n-bits", n_bits);
  cl->add_option("--m", m, "training sample size");
  cl->add_option("--test-size", test_size);
  cl->add_option("--seed", seed);

  auto* cq = app.add_subcommand("learn-query", "exact revealed-preference learner");
  cq->add_option("--class", klass)->required();
  cq->add_option("--d", d);
  cq->add_option("--kappa", kappa);
  cq->add_option("--n-bits", n_bits);
  cq->add_option("--seed", seed);

  auto* cv = app.add_subcommand("learn-value", "learn from utility values");
  cv->add_option("--mode", mode, "stat|query")->required();
  cv->add_option("--class", klass)->required();
  cv->add_option("--d", d);
  cv->add_option("--kappa", kappa);
  cv->add_option("--n-bits", n_bits);
  cv->add_option("--m", m);
  cv->add_option("--seed", seed);

  auto* ce = app.add_subcommand("experiment", "run a configured sweep");
  ce->add_option("--config", config_path, "experiment config JSON")->required();

  auto* cf = app.add_subcommand("verify", "cross-oracle verification table");
  cf->add_option("--seed", seed);
  cf->add_flag("--quick", quick);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cd->parsed())
      return cmd_demand(utility_file, klass, d, kappa, n_bits, seed, prices, budget,
                        exact);
    if (cs->parsed()) return cmd_second_best(w_str, prices, budget, ordering);
    if (cl->parsed()) return cmd_learn_stat(d, n_bits, m, test_size, seed);
    if (cq->parsed()) return cmd_learn_query(klass, d, kappa, n_bits, seed);
    if (cv->parsed()) return cmd_learn_value(mode, klass, d, kappa, n_bits, m, seed);
    if (ce->parsed()) return cmd_experiment(config_path);
    if (cf->parsed()) return cmd_verify(seed, quick);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
