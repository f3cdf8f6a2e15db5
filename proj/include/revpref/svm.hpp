#pragma once

// Hard-margin multiclass SVM for D-dimensional linear classes: cutting-plane
// outer loop, Wolfe min-norm-point inner solver, prediction via the greedy
// admissible argmax, and the shattering-construction verifier.

#include <functional>
#include <utility>
#include <vector>

#include "revpref/demand.hpp"
#include "revpref/feature_map.hpp"
#include "revpref/types.hpp"
#include "revpref/utility.hpp"

namespace revpref {

struct Hypothesis {
  std::vector<double> w;  // >= 0 for linear/splc kinds
  FeatureMapSpec map;
};

struct TrainReport {
  int iterations = 0;
  int active_constraints = 0;
  double min_margin = 0.0;
  bool converged = false;
  int tie_events = 0;  // label ties perturbed deterministically
};

struct SvmConfig {
  double tol = 1e-8;
  int max_rounds = 0;  // 0: use 10 * |sample| * D
};

// Smallest-norm point of conv(Z); Wolfe's active-set method, deterministic
// for a fixed input order.
std::vector<double> min_norm_point(const std::vector<std::vector<double>>& Z,
                                   double tol = 1e-10);

struct LabeledDemand {
  PriceBudget pb;
  Bundle bundle;
};

struct LabeledOrdering {
  std::vector<double> prices;
  Ranking pi;
};

// Generic cutting-plane driver. rival(w, i) must return the feature vector of
// the strongest competitor label y' != y_i under w; project restricts the
// hypothesis after each solve (orthant / monotone slopes) and may be empty.
std::pair<std::vector<double>, TrainReport> svm_train_core(
    const std::vector<std::vector<double>>& label_psi,
    const std::function<std::vector<double>(const std::vector<double>&, int)>& rival,
    const std::function<void(std::vector<double>&)>& project, const SvmConfig& cfg);

// Demand-labeled training for the linear and splc_known_lengths maps (the
// second-best routines are the separation oracle).
std::pair<Hypothesis, TrainReport> svm_train(const std::vector<LabeledDemand>& sample,
                                             const FeatureMapSpec& map,
                                             const SvmConfig& cfg = {});

std::pair<Hypothesis, TrainReport> svm_train_ordering(
    const std::vector<LabeledOrdering>& sample, const SvmConfig& cfg = {});

// argmax_y <w, Psi(pb, y)> for kinds with a demand-style argmax.
Bundle predict(const Hypothesis& h, const PriceBudget& pb);
Ranking predict_ordering(const Hypothesis& h, const std::vector<double>& prices);

struct RPError {
  double value_rate = 0.0;   // utility-value mismatches (Definition-of-error metric)
  double bundle_rate = 0.0;  // stricter: predicted bundle differs anywhere
};

RPError rp_error(const Utility& true_u, const Hypothesis& h,
                 const std::vector<PriceBudget>& test, double tol);

// Appendix-style one-observation Leontief learner: any nonzero optimal bundle
// is proportional to a.
LeontiefUtility learn_leontief_rp(const std::vector<LabeledDemand>& sample);

// Builds the d-1 price vectors and 2^{d-1} utility patterns of the Natarajan
// lower-bound construction and confirms demand realizes every pattern.
// w1_override deliberately corrupts the construction (tests force a failure).
bool shattering_check(int d, long w1_override = 1);

}  // namespace revpref
