#pragma once

// Cross-oracle verification: exhaustive reference enumerations (independent
// of the O(d) routines they check) and the named checks the CLI `verify`
// subcommand and the acceptance suite run.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "revpref/feature_map.hpp"
#include "revpref/types.hpp"
#include "revpref/utility.hpp"

namespace revpref::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // counterexample (seed + instance) on failure
};

struct Enumerated {
  Bundle best;
  double best_value = 0;
  Bundle second;
  double second_value = 0;
  bool has_second = false;
};

// Every admissible bundle, by construction: subsets of fully bought goods
// plus at most one partial coordinate pinned by the budget.
Enumerated enumerate_admissible_linear(const std::vector<double>& w,
                                       const PriceBudget& pb);

// Segment-boundary analogue for SPLC with known lengths.
Enumerated enumerate_admissible_splc(const std::vector<std::vector<double>>& w,
                                     const std::vector<std::vector<double>>& lengths,
                                     const PriceBudget& pb);

struct EnumeratedRankings {
  Ranking best;
  double best_value = 0;
  Ranking second;
  double second_value = 0;
};

// Brute force over S_d; the psi implementation is injectable so a mutated map
// can be shown to fail.
EnumeratedRankings enumerate_rankings(
    const std::vector<double>& w, const std::vector<double>& prices,
    const std::function<std::vector<double>(const std::vector<double>&,
                                            const Ranking&)>& psi_fn = {});

// Independent hard-margin solve of min ||w|| s.t. <w,z> >= 1 for all z in Z:
// active-set enumeration over subsets up to the ambient dimension. Returns an
// empty vector when no feasible subset exists.
std::vector<double> max_margin_enumerate(const std::vector<std::vector<double>>& Z);

// Ratio gap between strictly ordered size-n slope values, exhaustively:
// y < x implies (1 + 2^-(2n+1)) * y < x.
bool claim1_holds(int n_bits);

CheckResult check_demand_vs_bruteforce(UtilityClass klass, int instances, int max_d,
                                       double grid_step, std::uint64_t seed);
CheckResult check_second_best_linear(int instances, int max_d, std::uint64_t seed);
CheckResult check_second_best_splc(int instances, int max_d, int max_kappa,
                                   std::uint64_t seed);
CheckResult check_svm_equals_mnp(int instances, int max_dim, int max_z,
                                 double tol, std::uint64_t seed);
CheckResult check_shattering(int d_max);
CheckResult check_claim1(int n_max);
CheckResult check_ordering_argmax(int instances, int max_d, std::uint64_t seed);

// The full table; quick mode trims the instance counts for CLI use.
std::vector<CheckResult> run_suite(std::uint64_t seed, bool quick);

}  // namespace revpref::verify
