#pragma once

// Learning utility functions from utility values: statistical consistency
// learners (span solver, running-minimum Leontief estimates) and the exact
// value-query procedures.

#include <optional>
#include <utility>
#include <vector>

#include "revpref/types.hpp"
#include "revpref/utility.hpp"

namespace revpref {

class ValueOracle {
 public:
  explicit ValueOracle(Utility u) : u_(std::move(u)) {}

  Rational query(const BundleQ& x) {
    ++count_;
    return eval_exact(u_, x);
  }
  double query_real(const Bundle& x) {
    ++count_;
    return eval(u_, x);
  }
  int query_count() const { return count_; }
  int dim() const { return utility_dim(u_); }

 private:
  Utility u_;
  int count_ = 0;
};

// Incremental linear-system learner: keeps a maximal linearly independent
// subset of the sample rows (Gaussian elimination, exact for Rational,
// pivot-tolerance 1e-11 for double). Predicts inside the span, abstains
// outside, and rejects labels inconsistent with the span.
template <class S>
class SpanSolver {
 public:
  void add(const std::vector<S>& x, const S& y);
  std::optional<S> predict(const std::vector<S>& x) const;
  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  struct Row {
    std::vector<S> x;  // pivot coefficient normalized to 1
    S y{0};
    std::size_t pivot = 0;
  };
  bool reduce(std::vector<S>& x, S& y) const;  // true if x vanished
  std::vector<Row> rows_;
};

using SpanSolverQ = SpanSolver<Rational>;
using SpanSolverD = SpanSolver<double>;

struct LinearValueHypothesis {
  SpanSolverQ solver;
  int d = 0;
  std::optional<Rational> predict(const BundleQ& x) const { return solver.predict(x); }
  // exact coefficients once the sample spans R^d
  std::optional<std::vector<Rational>> recovered() const;
};

LinearValueHypothesis learn_linear_values(
    const std::vector<std::pair<BundleQ, Rational>>& sample);

// Split of an exact bundle along known segment lengths (kappa slots per good,
// nullopt length = infinite last segment).
std::vector<Rational> splc_split_exact(
    const std::vector<std::vector<std::optional<Rational>>>& lengths,
    const BundleQ& x);

struct SPLCValueHypothesis {
  std::vector<std::vector<std::optional<Rational>>> lengths;
  SpanSolverQ solver;
  std::optional<Rational> predict(const BundleQ& x) const {
    return solver.predict(splc_split_exact(lengths, x));
  }
};

SPLCValueHypothesis learn_splc_values_known_lengths(
    const std::vector<std::pair<BundleQ, Rational>>& sample,
    std::vector<std::vector<std::optional<Rational>>> lengths);

struct CESValueHypothesis {
  double rho = 0.5;
  SpanSolverD solver;
  std::optional<double> predict(const Bundle& x) const;
};

CESValueHypothesis learn_ces_values_rho(
    const std::vector<std::pair<Bundle, double>>& sample, double rho);

// Running coordinate-wise minimum of x_j / y over the sample; b_j starts at
// +infinity (nullopt) and only shrinks. Zero labels carry no information and
// are skipped (counted).
struct LeontiefEstimate {
  std::vector<std::optional<Rational>> b;
  int skipped_zero_labels = 0;

  explicit LeontiefEstimate(int d) : b(d) {}
  void update(const BundleQ& x, const Rational& y);
  Rational predict(const BundleQ& x) const;  // min over finite positive b_j
};

LeontiefEstimate learn_leontief_values(
    const std::vector<std::pair<BundleQ, Rational>>& sample, int d);

// Exact value-query learners.
LinearUtility vq_linear(ValueOracle& oracle, int d);
CESUtility vq_ces(ValueOracle& oracle, int d, double rho);
LeontiefUtility vq_leontief(ValueOracle& oracle, int d, int n_bits);
SPLCUtility vq_splc(ValueOracle& oracle, int d, int n_bits, int kappa_guard = 64);

}  // namespace revpref
