#include "revpref/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace revpref {

namespace {

constexpr double kEps = 1e-11;

// Solve min ||sum_i alpha_i s_i||^2 subject to sum alpha = 1 over the affine
// hull of S: KKT system [G 1; 1^T 0] [alpha; mu] = [0; 1].
std::vector<double> affine_min_norm(const std::vector<const std::vector<double>*>& S) {
  const int k = static_cast<int>(S.size());
  const int n = k + 1;
  std::vector<double> M(n * n, 0.0), rhs(n, 0.0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double g = 0;
      for (std::size_t t = 0; t < S[i]->size(); ++t) g += (*S[i])[t] * (*S[j])[t];
      M[i * n + j] = g;
    }
    M[i * n + k] = 1.0;
    M[k * n + i] = 1.0;
  }
  rhs[k] = 1.0;

  // partial-pivot Gaussian elimination; a tiny ridge rescues near-singular
  // Gram matrices (affinely dependent working sets)
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<double> A(M), b(rhs);
    if (attempt == 1)
      for (int i = 0; i < k; ++i) A[i * n + i] += 1e-10;
    bool ok = true;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n && ok; ++col) {
      int piv = col;
      for (int r = col + 1; r < n; ++r)
        if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
      if (std::abs(A[piv * n + col]) < 1e-13) {
        ok = false;
        break;
      }
      if (piv != col) {
        for (int c = 0; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
        std::swap(b[piv], b[col]);
      }
      for (int r = col + 1; r < n; ++r) {
        double f = A[r * n + col] / A[col * n + col];
        if (f == 0) continue;
        for (int c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
        b[r] -= f * b[col];
      }
    }
    if (!ok) continue;
    std::vector<double> sol(n);
    for (int r = n - 1; r >= 0; --r) {
      double acc = b[r];
      for (int c = r + 1; c < n; ++c) acc -= A[r * n + c] * sol[c];
      sol[r] = acc / A[r * n + r];
    }
    sol.resize(k);
    return sol;
  }
  // fully degenerate: keep the current barycentre
  return std::vector<double>(k, 1.0 / k);
}

}  // namespace

std::vector<double> min_norm_point(const std::vector<std::vector<double>>& Z,
                                   double tol) {
  if (Z.empty()) throw std::invalid_argument("min_norm_point: empty set");
  const int D = static_cast<int>(Z[0].size());

  auto norm2 = [&](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return s;
  };
  auto dotv = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  int first = 0;
  for (std::size_t i = 1; i < Z.size(); ++i)
    if (norm2(Z[i]) < norm2(Z[first])) first = static_cast<int>(i);

  std::vector<int> support{first};
  std::vector<double> lambda{1.0};
  std::vector<double> x = Z[first];

  const int major_cap = 200 + 4 * static_cast<int>(Z.size());
  for (int major = 0; major < major_cap; ++major) {
    double xx = norm2(x);
    int imin = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < Z.size(); ++i) {
      double v = dotv(x, Z[i]);
      if (v < best - 1e-15) {
        best = v;
        imin = static_cast<int>(i);
      }
    }
    if (best > xx - tol * std::max(1.0, xx)) break;  // optimal
    if (std::find(support.begin(), support.end(), imin) != support.end()) break;
    support.push_back(imin);
    lambda.push_back(0.0);

    for (int minor = 0; minor < 200; ++minor) {
      std::vector<const std::vector<double>*> S;
      S.reserve(support.size());
      for (int idx : support) S.push_back(&Z[idx]);
      std::vector<double> alpha = affine_min_norm(S);

      bool interior = true;
      for (double a : alpha)
        if (a < -kEps) {
          interior = false;
          break;
        }
      if (interior) {
        lambda = alpha;
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] < kEps && lambda[i] > alpha[i])
          theta = std::min(theta, lambda[i] / (lambda[i] - alpha[i]));
      }
      for (std::size_t i = 0; i < alpha.size(); ++i)
        lambda[i] = (1 - theta) * lambda[i] + theta * alpha[i];
      for (int i = static_cast<int>(lambda.size()) - 1; i >= 0; --i) {
        if (lambda[i] <= kEps) {
          lambda.erase(lambda.begin() + i);
          support.erase(support.begin() + i);
        }
      }
    }

    x.assign(D, 0.0);
    for (std::size_t i = 0; i < support.size(); ++i)
      for (int t = 0; t < D; ++t) x[t] += lambda[i] * Z[support[i]][t];
  }
  return x;
}

std::pair<std::vector<double>, TrainReport> svm_train_core(
    const std::vector<std::vector<double>>& label_psi,
    const std::function<std::vector<double>(const std::vector<double>&, int)>& rival,
    const std::function<void(std::vector<double>&)>& project, const SvmConfig& cfg) {
  const int m = static_cast<int>(label_psi.size());
  if (m == 0) throw std::invalid_argument("svm_train: empty sample");
  const int D = static_cast<int>(label_psi[0].size());
  const int round_cap = cfg.max_rounds > 0 ? cfg.max_rounds : std::max(50, 10 * m * D);

  std::vector<std::vector<double>> W;
  std::vector<double> w(D, 0.0);
  TrainReport report;

  auto dotv = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  auto contains = [&](const std::vector<double>& z) {
    for (const auto& v : W) {
      double diff = 0;
      for (int t = 0; t < D; ++t) diff = std::max(diff, std::abs(v[t] - z[t]));
      if (diff <= 1e-12) return true;
    }
    return false;
  };

  for (int round = 0; round < round_cap; ++round) {
    report.iterations = round + 1;
    int added = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      std::vector<double> rv = rival(w, i);
      std::vector<double> z(D);
      for (int t = 0; t < D; ++t) z[t] = label_psi[i][t] - rv[t];
      double margin = dotv(w, z);
      worst = std::min(worst, margin);
      if (margin < 1.0 - cfg.tol && !contains(z)) {
        W.push_back(std::move(z));
        ++added;
      }
    }
    report.min_margin = worst;
    report.active_constraints = static_cast<int>(W.size());
    if (worst >= 1.0 - cfg.tol) {
      report.converged = true;
      break;
    }
    if (added == 0) break;  // stalled: every violated constraint already known

    std::vector<double> wp = min_norm_point(W);
    double mu0 = std::numeric_limits<double>::infinity();
    for (const auto& z : W) mu0 = std::min(mu0, dotv(wp, z));
    if (!(mu0 > 1e-13)) break;  // origin in the hull: sample not realizable
    for (double& v : wp) v /= mu0;
    if (project) {
      project(wp);
      double mu = std::numeric_limits<double>::infinity();
      for (const auto& z : W) mu = std::min(mu, dotv(wp, z));
      if (mu > 1e-13)
        for (double& v : wp) v /= mu;
    }
    w = std::move(wp);
  }
  return {std::move(w), report};
}

namespace {

std::vector<std::vector<double>> reshape_rows(const std::vector<double>& w, int d,
                                              int kappa) {
  std::vector<std::vector<double>> rows(d);
  for (int j = 0; j < d; ++j)
    rows[j].assign(w.begin() + j * kappa, w.begin() + (j + 1) * kappa);
  return rows;
}

void project_nonneg(std::vector<double>& w) {
  for (double& v : w) v = std::max(v, 0.0);
}

// projection onto {per-good non-increasing, >= 0}: pool adjacent violators,
// then clip
void project_splc(std::vector<double>& w, int d, int kappa) {
  for (int j = 0; j < d; ++j) {
    double* seg = w.data() + j * kappa;
    std::vector<double> level;
    std::vector<int> count;
    for (int k = 0; k < kappa; ++k) {
      level.push_back(seg[k]);
      count.push_back(1);
      while (level.size() > 1 && level[level.size() - 2] < level.back()) {
        double merged = (level[level.size() - 2] * count[count.size() - 2] +
                         level.back() * count.back()) /
                        (count[count.size() - 2] + count.back());
        count[count.size() - 2] += count.back();
        level[level.size() - 2] = merged;
        level.pop_back();
        count.pop_back();
      }
    }
    int k = 0;
    for (std::size_t b = 0; b < level.size(); ++b)
      for (int c = 0; c < count[b]; ++c) seg[k++] = std::max(level[b], 0.0);
  }
}

}  // namespace

std::pair<Hypothesis, TrainReport> svm_train(const std::vector<LabeledDemand>& sample,
                                             const FeatureMapSpec& map,
                                             const SvmConfig& cfg) {
  if (map.kind != FeatureMapSpec::Kind::linear &&
      map.kind != FeatureMapSpec::Kind::splc_known_lengths)
    throw std::invalid_argument("svm_train: oracle available for linear/splc maps only");

  std::vector<std::vector<double>> label_psi;
  label_psi.reserve(sample.size());
  for (const auto& s : sample) label_psi.push_back(psi(map, s.pb, s.bundle));

  auto rival = [&, map](const std::vector<double>& w, int i) -> std::vector<double> {
    const auto& pb = sample[i].pb;
    if (map.kind == FeatureMapSpec::Kind::linear) {
      Bundle best = admissible_argmax_linear(w, pb);
      if (!bundles_close(best, sample[i].bundle)) return psi(map, pb, best);
      SecondBest sb = second_best_linear(w, pb);
      if (sb.degenerate) return std::vector<double>(map.dimension(), 0.0);
      return psi(map, pb, sb.bundle);
    }
    auto rows = reshape_rows(w, map.d, map.kappa);
    Bundle best = admissible_argmax_splc(rows, map.lengths, pb);
    if (!bundles_close(best, sample[i].bundle)) return psi(map, pb, best);
    SecondBest sb = second_best_splc(rows, map.lengths, pb);
    if (sb.degenerate) return std::vector<double>(map.dimension(), 0.0);
    return psi(map, pb, sb.bundle);
  };

  std::function<void(std::vector<double>&)> project;
  if (map.kind == FeatureMapSpec::Kind::linear) {
    project = project_nonneg;
  } else {
    int d = map.d, kappa = map.kappa;
    project = [d, kappa](std::vector<double>& w) { project_splc(w, d, kappa); };
  }

  auto [w, report] = svm_train_core(label_psi, rival, project, cfg);
  return {Hypothesis{std::move(w), map}, report};
}

std::pair<Hypothesis, TrainReport> svm_train_ordering(
    const std::vector<LabeledOrdering>& sample, const SvmConfig& cfg) {
  if (sample.empty()) throw std::invalid_argument("svm_train_ordering: empty sample");
  const int d = static_cast<int>(sample[0].prices.size());

  std::vector<std::vector<double>> label_psi;
  label_psi.reserve(sample.size());
  for (const auto& s : sample) label_psi.push_back(psi_ordering(s.prices, s.pi));

  auto rival = [&](const std::vector<double>& w, int i) -> std::vector<double> {
    const auto& p = sample[i].prices;
    Ranking best = best_ordering(w, p);
    if (best != sample[i].pi) return psi_ordering(p, best);
    return psi_ordering(p, second_best_ordering(w, p));
  };

  auto [w, report] = svm_train_core(label_psi, rival, nullptr, cfg);
  return {Hypothesis{std::move(w), FeatureMapSpec::ordering(d)}, report};
}

Bundle predict(const Hypothesis& h, const PriceBudget& pb) {
  switch (h.map.kind) {
    case FeatureMapSpec::Kind::linear:
      return admissible_argmax_linear(h.w, pb);
    case FeatureMapSpec::Kind::splc_known_lengths:
      return admissible_argmax_splc(reshape_rows(h.w, h.map.d, h.map.kappa),
                                    h.map.lengths, pb);
    default:
      throw std::invalid_argument("predict: unsupported map kind");
  }
}

Ranking predict_ordering(const Hypothesis& h, const std::vector<double>& prices) {
  if (h.map.kind != FeatureMapSpec::Kind::ordering)
    throw std::invalid_argument("predict_ordering: wrong map kind");
  return best_ordering(h.w, prices);
}

RPError rp_error(const Utility& true_u, const Hypothesis& h,
                 const std::vector<PriceBudget>& test, double tol) {
  if (test.empty()) throw std::invalid_argument("rp_error: empty test set");
  RPError err;
  for (const auto& pb : test) {
    Bundle truth = demand(true_u, pb).bundle;
    Bundle pred = predict(h, pb);
    double vt = eval(true_u, truth);
    double vp = eval(true_u, pred);
    if (std::abs(vt - vp) > tol) err.value_rate += 1;
    if (!bundles_close(truth, pred, std::max(tol, 1e-9))) err.bundle_rate += 1;
  }
  err.value_rate /= static_cast<double>(test.size());
  err.bundle_rate /= static_cast<double>(test.size());
  return err;
}

LeontiefUtility learn_leontief_rp(const std::vector<LabeledDemand>& sample) {
  for (const auto& s : sample) {
    double total = 0;
    for (double x : s.bundle) total += x;
    if (total <= 0) continue;
    LeontiefUtility u;
    Rational sum(0);
    for (double x : s.bundle) {
      u.a.push_back(Rational::from_double(x));
      sum += u.a.back();
    }
    for (auto& a : u.a) a /= sum;
    return u;
  }
  throw std::invalid_argument("learn_leontief_rp: every observed bundle is zero");
}

bool shattering_check(int d, long w1_override) {
  if (d < 2 || d > 8) throw std::invalid_argument("shattering_check: need 2 <= d <= 8");

  for (std::uint32_t v = 0; v < (1u << (d - 1)); ++v) {
    std::vector<Rational> w(d);
    w[0] = Rational(w1_override);
    for (int i = 1; i < d; ++i) w[i] = (v >> (i - 1)) & 1 ? Rational(2) : Rational(1);

    for (int j = 1; j < d; ++j) {  // price vector p^j: cheap goods 1 and j
      PriceBudgetQ pb;
      pb.prices.assign(d, Rational(10));
      pb.prices[0] = Rational(1);
      pb.prices[j] = Rational(1);
      pb.budget = Rational(1);
      BundleQ x =
          demand_linear(std::span<const Rational>(w), pb, Domain::unit_cube).bundle;

      BundleQ expect(d, Rational(0));
      bool bit = (v >> (j - 1)) & 1;
      expect[bit ? j : 0] = Rational(1);
      if (x != expect) return false;
    }
  }
  return true;
}

}  // namespace revpref
