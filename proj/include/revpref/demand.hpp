#pragma once

// Demand oracles: the cheapest, lexicographically-first optimal bundle for
// each utility class, the KKT-based optimality checker, and a grid-search
// reference oracle. Linear/SPLC/Leontief run on exact rationals or doubles;
// CES is float-only.

#include <cstddef>
#include <optional>
#include <span>

#include "revpref/types.hpp"
#include "revpref/utility.hpp"

namespace revpref {

template <class S>
struct DemandResultT {
  BundleT<S> bundle;
  S spent{0};
  bool tie_broken = false;  // a bang-per-buck tie was resolved lexicographically
};

using DemandResult = DemandResultT<double>;

// Greedy by decreasing a_j/p_j; zero-value goods are never bought; ties go to
// the lower index. At most one coordinate ends up fractional.
template <class S>
DemandResultT<S> demand_linear(std::span<const S> coeffs, const PriceBudgetT<S>& pb,
                               Domain dom = Domain::unit_cube);

template <class S>
DemandResultT<S> demand_linear(const LinearUtility& u, const PriceBudgetT<S>& pb,
                               Domain dom = Domain::unit_cube);

// SPLC demand spec: per-good segment lists over an arbitrary scalar; a
// missing length means the segment extends forever.
template <class S>
struct SegmentSpecT {
  S slope;
  std::optional<S> length;
};

template <class S>
using SPLCSpec = std::vector<std::vector<SegmentSpecT<S>>>;

template <class S>
SPLCSpec<S> splc_spec(const SPLCUtility& u);

// Greedy over segments by decreasing slope/price; within a good the slope
// monotonicity keeps segments in order. Tie-break: lower good, lower segment.
template <class S>
DemandResultT<S> demand_splc(const SPLCSpec<S>& segments, const PriceBudgetT<S>& pb,
                             Domain dom = Domain::unit_cube);

template <class S>
DemandResultT<S> demand_splc(const SPLCUtility& u, const PriceBudgetT<S>& pb,
                             Domain dom = Domain::unit_cube);

// x_j = beta * a_j with beta = min(B / <a,p>, 1/max_j a_j) (unit cube).
template <class S>
DemandResultT<S> demand_leontief(const LeontiefUtility& u, const PriceBudgetT<S>& pb,
                                 Domain dom = Domain::unit_cube);

// Water-filling on x_j proportional to (a_j/p_j)^{1/(1-rho)}, re-solved after
// clipping saturated goods at 1 (at most d rounds).
DemandResult demand_ces(const CESUtility& u, const PriceBudget& pb);

// Variant dispatchers.
DemandResult demand(const Utility& u, const PriceBudget& pb,
                    Domain dom = Domain::unit_cube);
DemandResultT<Rational> demand_exact(const Utility& u, const PriceBudgetQ& pb,
                                     Domain dom = Domain::unit_cube);

// Exhaustive search over the grid {0, s, 2s, ...}^d within the budget set;
// ties broken by cost, then lexicographically. Reference oracle for tests.
// With exploit_monotone the innermost coordinate is solved in closed form
// (valid because every implemented class is monotone); the argmax and the
// tie-breaking are unchanged. Throws if the node count exceeds node_cap.
DemandResult demand_bruteforce(const Utility& u, const PriceBudget& pb,
                               double grid_step,
                               std::size_t node_cap = 50'000'000,
                               bool exploit_monotone = true);

// KKT-based characterization checks (Eq.-of-class plus feasibility and
// budget slackness). tol = 0 gives the exact test for rational scalars.
template <class S>
bool kkt_check(const LinearUtility& u, const PriceBudgetT<S>& pb,
               const BundleT<S>& x, const S& tol, Domain dom = Domain::unit_cube);

template <class S>
bool kkt_check(const SPLCUtility& u, const PriceBudgetT<S>& pb,
               const BundleT<S>& x, const S& tol, Domain dom = Domain::unit_cube);

template <class S>
bool kkt_check(const LeontiefUtility& u, const PriceBudgetT<S>& pb,
               const BundleT<S>& x, const S& tol, Domain dom = Domain::unit_cube);

bool kkt_check(const CESUtility& u, const PriceBudget& pb, const Bundle& x,
               double tol);

bool kkt_check(const Utility& u, const PriceBudget& pb, const Bundle& x,
               double tol, Domain dom = Domain::unit_cube);
bool kkt_check_exact(const Utility& u, const PriceBudgetQ& pb, const BundleQ& x,
                     Domain dom = Domain::unit_cube);

}  // namespace revpref
