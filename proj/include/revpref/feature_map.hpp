#pragma once

// Feature maps that turn demand prediction into a D-dimensional linear
// argmax, the admissibility predicates defining their support, and the O(d)
// second-best routines used as SVM separation oracles.

#include <vector>

#include "revpref/types.hpp"
#include "revpref/utility.hpp"

namespace revpref {

struct FeatureMapSpec {
  enum class Kind { linear, splc_known_lengths, ces_rho, ordering };
  Kind kind = Kind::linear;
  int d = 0;
  int kappa = 1;                             // splc only
  std::vector<std::vector<double>> lengths;  // splc: d x kappa, inf for last
  double rho = 0.5;                          // ces only

  int dimension() const;  // D = d (linear, ces, ordering) or kappa*d (splc)

  static FeatureMapSpec linear(int d);
  static FeatureMapSpec splc(std::vector<std::vector<double>> lengths);
  static FeatureMapSpec ces(int d, double rho);
  static FeatureMapSpec ordering(int d);
};

// A permutation as a ranking: perm[r] is the good placed at rank r.
using Ranking = std::vector<int>;

inline constexpr double kAdmissibleTol = 1e-9;

// Admissible bundles spend the budget exactly with at most one coordinate
// off the boundary grid ({0,1} for linear, segment prefix sums for SPLC), or
// equal the full bundle when everything is affordable. For the CES map the
// support is just affordability.
bool is_admissible(const FeatureMapSpec& map, const PriceBudget& pb,
                   const Bundle& x, double tol = kAdmissibleTol);

// Psi((p,B), x): x / its split / x^rho on the admissible set, zero elsewhere.
std::vector<double> psi(const FeatureMapSpec& map, const PriceBudget& pb,
                        const Bundle& x, double tol = kAdmissibleTol);

// Psi(p, pi) = sum_{i<j} pi_ij ((1/p_i) e_i - (1/p_j) e_j), pi_ij = +1 when i
// is ranked before j. Sign chosen so the argmax ranking sorts by w_i/p_i.
std::vector<double> psi_ordering(const std::vector<double>& prices,
                                 const Ranking& pi);

// Split of x along the segment lengths (kappa entries per good).
std::vector<double> splc_split(const std::vector<std::vector<double>>& lengths,
                               const Bundle& x);

// argmax over admissible bundles of <w, Psi>: spend the whole budget greedily
// by decreasing w_j/p_j (zero-weight goods last, lower index first); returns
// the full bundle when sum(p) <= B.
Bundle admissible_argmax_linear(const std::vector<double>& w, const PriceBudget& pb);
Bundle admissible_argmax_splc(const std::vector<std::vector<double>>& w,
                              const std::vector<std::vector<double>>& lengths,
                              const PriceBudget& pb);

struct SecondBest {
  Bundle bundle;
  bool degenerate = false;  // sum(p) <= B: every bundle != 1_d ties for second
};

// Best admissible bundle other than the optimum, via the single-transfer
// candidate scan. Requires w >= 0.
SecondBest second_best_linear(const std::vector<double>& w, const PriceBudget& pb);

// SPLC analogue at segment granularity; w holds per-good slope vectors
// (non-increasing within a good), lengths the known segment lengths.
SecondBest second_best_splc(const std::vector<std::vector<double>>& w,
                            const std::vector<std::vector<double>>& lengths,
                            const PriceBudget& pb);

// Ranking by decreasing w_i/p_i; exact ratio ties are perturbed
// deterministically by index before sorting.
Ranking best_ordering(const std::vector<double>& w, const std::vector<double>& prices);

// The adjacent transposition with the smallest ratio gap; gap ties resolve to
// the lexicographically earliest resulting ranking.
Ranking second_best_ordering(const std::vector<double>& w,
                             const std::vector<double>& prices);

bool bundles_close(const Bundle& a, const Bundle& b, double tol = kAdmissibleTol);

}  // namespace revpref
