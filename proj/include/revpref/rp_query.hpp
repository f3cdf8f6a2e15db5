#pragma once

// Exact learning from revealed-preference queries. The binary searches run on
// exact rationals end to end; the budget in every probe is kept so small that
// the oracle's answer pins the comparison the search needs.

#include <optional>

#include "revpref/demand.hpp"
#include "revpref/types.hpp"
#include "revpref/utility.hpp"

namespace revpref {

// Wraps a hidden utility; every query returns the exact optimal bundle and
// bumps the counter.
class RPOracle {
 public:
  RPOracle(Utility u, Domain dom) : u_(std::move(u)), dom_(dom) {}

  BundleQ query(const PriceBudgetQ& pb) {
    ++count_;
    return demand_exact(u_, pb, dom_).bundle;
  }
  Bundle query_real(const PriceBudget& pb) {
    ++count_;
    return demand(u_, pb, dom_).bundle;
  }

  int query_count() const { return count_; }
  int dim() const { return utility_dim(u_); }
  Domain domain() const { return dom_; }

 private:
  Utility u_;
  Domain dom_;
  int count_ = 0;
};

// Binary search on p_j for the price making the buyer indifferent between
// good `good` and the reference good; returns the bang-per-buck ratio target
// exactly once rounded to denominator <= max_den. shrink scales the probe
// budget (1 for linear; 2^-(n+1) for the SPLC induction so no segment can be
// exhausted), x_extra is the amount of `good` the buyer consumes on already
// learned segments before the probe.
Rational alg1_ratio(RPOracle& oracle, int good, const Rational& upper,
                    const Rational& shrink, const Rational& x_extra, int n_bits,
                    const mpz_class& max_den, int reference = 0,
                    const Rational& ref_price = Rational(1));

// Binary search on the budget for the length of the segment currently priced
// at its own slope (p_good = a_jk); watches whether the reference good gets
// bought. nullopt = the segment is infinite (last).
std::optional<Rational> alg2_length(RPOracle& oracle, int good, const Rational& p_good,
                                    const Rational& x_extra, int n_bits,
                                    const mpz_class& max_den, int reference,
                                    const Rational& ref_price);

// One full-budget query reveals the support {j : a_j > 0}.
std::vector<int> find_support_linear(RPOracle& oracle, int d);

// Support query plus one ratio search per good; <= 1 + (d-1)(4n+2) queries.
LinearUtility learn_linear_rp(RPOracle& oracle, int d, int n_bits);

// Alternating slope/length searches per good, segment by segment; good 1 is
// learned last against good 2 as reference. Needs d >= 2 and the R_+ domain.
SPLCUtility learn_splc_rp(RPOracle& oracle, int d, int kappa, int n_bits);

// Two queries with budget below every price; solves for rho from the pair of
// interior bundles, then for the coefficient ratios.
CESUtility learn_ces_rp(RPOracle& oracle, int d);

// One query at unit prices and budget 1/2: a = 2x exactly.
LeontiefUtility learn_leontief_rp_query(RPOracle& oracle, int d);

}  // namespace revpref
