#include "revpref/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "revpref/demand.hpp"
#include "revpref/rng.hpp"
#include "revpref/svm.hpp"

namespace revpref::verify {

namespace {

constexpr double kTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool lex_greater(const Bundle& a, const Bundle& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i] + kTol) return true;
    if (a[i] < b[i] - kTol) return false;
  }
  return false;
}

struct CandidateTracker {
  Bundle best, second;
  double best_value = -kInf, second_value = -kInf;
  bool has_best = false, has_second = false;

  void offer(const Bundle& y, double v) {
    if (!has_best) {
      best = y;
      best_value = v;
      has_best = true;
      return;
    }
    bool beats_best =
        v > best_value + kTol || (v > best_value - kTol && lex_greater(y, best));
    if (beats_best) {
      if (!bundles_close(best, y, kTol)) {
        second = best;
        second_value = best_value;
        has_second = has_best;
      }
      best = y;
      best_value = v;
      return;
    }
    if (bundles_close(y, best, kTol)) return;
    if (!has_second || v > second_value + kTol ||
        (v > second_value - kTol && lex_greater(y, second))) {
      second = y;
      second_value = v;
      has_second = true;
    }
  }
};

}  // namespace

Enumerated enumerate_admissible_linear(const std::vector<double>& w,
                                       const PriceBudget& pb) {
  const int d = static_cast<int>(w.size());
  if (d > 20) throw std::invalid_argument("enumerate_admissible_linear: d too large");
  double ps = 0;
  for (double p : pb.prices) ps += p;

  CandidateTracker tr;
  if (ps <= pb.budget + kTol) {
    Bundle ones(d, 1.0);
    tr.offer(ones, dot(w, ones));
  } else {
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
      double cost = 0;
      Bundle y(d, 0.0);
      for (int j = 0; j < d; ++j)
        if (mask >> j & 1) {
          y[j] = 1.0;
          cost += pb.prices[j];
        }
      if (std::abs(cost - pb.budget) <= kTol * (1 + pb.budget)) {
        tr.offer(y, dot(w, y));
      }
      if (cost < pb.budget) {
        for (int g = 0; g < d; ++g) {
          if (mask >> g & 1) continue;
          double xg = (pb.budget - cost) / pb.prices[g];
          if (xg <= kTol || xg >= 1 - kTol) continue;
          Bundle z = y;
          z[g] = xg;
          tr.offer(z, dot(w, z));
        }
      }
    }
  }
  return Enumerated{tr.best, tr.best_value, tr.second, tr.second_value, tr.has_second};
}

Enumerated enumerate_admissible_splc(const std::vector<std::vector<double>>& w,
                                     const std::vector<std::vector<double>>& lengths,
                                     const PriceBudget& pb) {
  const int d = static_cast<int>(w.size());
  double ps = 0;
  for (double p : pb.prices) ps += p;

  std::size_t kappa = 0;
  for (const auto& row : lengths) kappa = std::max(kappa, row.size());
  std::vector<double> wflat(d * kappa, 0.0);
  for (int j = 0; j < d; ++j)
    for (std::size_t k = 0; k < w[j].size(); ++k) wflat[j * kappa + k] = w[j][k];
  auto value = [&](const Bundle& y) { return dot(splc_split(lengths, y), wflat); };

  CandidateTracker tr;
  if (ps <= pb.budget + kTol) {
    Bundle ones(d, 1.0);
    tr.offer(ones, value(ones));
    return Enumerated{tr.best, tr.best_value, tr.second, tr.second_value,
                      tr.has_second};
  }

  // per-good boundary values: 0, clipped prefix sums, 1
  std::vector<std::vector<double>> bnd(d);
  for (int j = 0; j < d; ++j) {
    bnd[j].push_back(0.0);
    double acc = 0;
    for (double len : lengths[j]) {
      if (std::isinf(len)) break;
      acc += len;
      if (acc >= 1 - kTol) break;
      bnd[j].push_back(acc);
    }
    bnd[j].push_back(1.0);
  }

  Bundle y(d, 0.0);
  // partial == -1: every coordinate on a boundary
  for (int partial = -1; partial < d; ++partial) {
    std::vector<int> pick(d, 0);
    auto rec = [&](auto&& self, int j, double cost) -> void {
      if (cost > pb.budget + kTol) return;
      if (j == d) {
        if (partial == -1) {
          if (std::abs(cost - pb.budget) <= kTol * (1 + pb.budget))
            tr.offer(y, value(y));
        } else {
          double xg = (pb.budget - cost) / pb.prices[partial];
          if (xg >= -kTol && xg <= 1 + kTol) {
            Bundle z = y;
            z[partial] = std::clamp(xg, 0.0, 1.0);
            tr.offer(z, value(z));
          }
        }
        return;
      }
      if (j == partial) {
        y[j] = 0;
        self(self, j + 1, cost);
        return;
      }
      for (double b : bnd[j]) {
        y[j] = b;
        self(self, j + 1, cost + b * pb.prices[j]);
      }
      y[j] = 0;
    };
    rec(rec, 0, 0.0);
  }
  return Enumerated{tr.best, tr.best_value, tr.second, tr.second_value, tr.has_second};
}

EnumeratedRankings enumerate_rankings(
    const std::vector<double>& w, const std::vector<double>& prices,
    const std::function<std::vector<double>(const std::vector<double>&,
                                            const Ranking&)>& psi_fn) {
  const int d = static_cast<int>(w.size());
  auto map = psi_fn ? psi_fn : psi_ordering;

  Ranking pi(d);
  std::iota(pi.begin(), pi.end(), 0);

  EnumeratedRankings out;
  bool has_best = false, has_second = false;
  do {
    double v = dot(w, map(prices, pi));
    if (!has_best || v > out.best_value + kTol ||
        (v > out.best_value - kTol && pi < out.best)) {
      if (has_best && pi != out.best) {
        out.second = out.best;
        out.second_value = out.best_value;
        has_second = true;
      }
      out.best = pi;
      out.best_value = v;
      has_best = true;
      continue;
    }
    if (pi == out.best) continue;
    if (!has_second || v > out.second_value + kTol ||
        (v > out.second_value - kTol && pi < out.second)) {
      out.second = pi;
      out.second_value = v;
      has_second = true;
    }
  } while (std::next_permutation(pi.begin(), pi.end()));
  return out;
}

std::vector<double> max_margin_enumerate(const std::vector<std::vector<double>>& Z) {
  if (Z.empty()) return {};
  const int D = static_cast<int>(Z[0].size());
  const int n = static_cast<int>(Z.size());

  auto dotv = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  std::vector<double> best_w;
  double best_norm2 = kInf;

  std::vector<int> combo;
  auto try_combo = [&]() {
    const int k = static_cast<int>(combo.size());
    std::vector<double> G(k * k), rhs(k, 1.0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) G[i * k + j] = dotv(Z[combo[i]], Z[combo[j]]);
    // Gaussian elimination with partial pivoting
    for (int col = 0; col < k; ++col) {
      int piv = col;
      for (int r = col + 1; r < k; ++r)
        if (std::abs(G[r * k + col]) > std::abs(G[piv * k + col])) piv = r;
      if (std::abs(G[piv * k + col]) < 1e-12) return;
      if (piv != col) {
        for (int c = 0; c < k; ++c) std::swap(G[piv * k + c], G[col * k + c]);
        std::swap(rhs[piv], rhs[col]);
      }
      for (int r = col + 1; r < k; ++r) {
        double f = G[r * k + col] / G[col * k + col];
        if (f == 0) continue;
        for (int c = col; c < k; ++c) G[r * k + c] -= f * G[col * k + c];
        rhs[r] -= f * rhs[col];
      }
    }
    std::vector<double> lam(k);
    for (int r = k - 1; r >= 0; --r) {
      double acc = rhs[r];
      for (int c = r + 1; c < k; ++c) acc -= G[r * k + c] * lam[c];
      lam[r] = acc / G[r * k + r];
    }
    double norm2 = 0;
    for (int i = 0; i < k; ++i) {
      if (lam[i] < -1e-9) return;  // not a KKT multiplier vector
      norm2 += lam[i];
    }
    if (norm2 >= best_norm2) return;
    std::vector<double> w(D, 0.0);
    for (int i = 0; i < k; ++i)
      for (int t = 0; t < D; ++t) w[t] += lam[i] * Z[combo[i]][t];
    for (const auto& z : Z)
      if (dotv(w, z) < 1 - 1e-7) return;  // infeasible elsewhere
    best_norm2 = norm2;
    best_w = std::move(w);
  };

  auto rec = [&](auto&& self, int start, int remaining) -> void {
    if (remaining == 0) {
      try_combo();
      return;
    }
    for (int i = start; i <= n - remaining; ++i) {
      combo.push_back(i);
      self(self, i + 1, remaining - 1);
      combo.pop_back();
    }
  };
  for (int k = 1; k <= std::min(D, n); ++k) rec(rec, 0, k);
  return best_w;
}

bool claim1_holds(int n_bits) {
  const long hi = 1L << n_bits;
  std::set<Rational> vals;
  for (long p = 1; p <= hi; ++p)
    for (long q = 1; q <= hi; ++q) vals.insert(Rational(p, q));

  const Rational one_plus = Rational(1) + Rational::pow2(-(2L * n_bits + 1));
  for (auto xi = vals.begin(); xi != vals.end(); ++xi) {
    for (auto yi = vals.begin(); yi != xi; ++yi) {
      // *yi < *xi by set ordering
      if (!(one_plus * *yi < *xi)) return false;
    }
  }
  return true;
}

namespace {

std::string seed_detail(std::uint64_t seed, int i, const std::string& extra) {
  std::ostringstream os;
  os << "seed=" << seed << " instance=" << i;
  if (!extra.empty()) os << " " << extra;
  return os.str();
}

PriceBudget random_pb(int d, std::mt19937_64& rng, double budget_frac_lo,
                      double budget_frac_hi) {
  PriceBudget pb;
  pb.prices.resize(d);
  for (int j = 0; j < d; ++j)
    pb.prices[j] = std::exp(uniform_real(rng, std::log(0.5), std::log(2.0)));
  double ps = 0;
  for (double p : pb.prices) ps += p;
  pb.budget = ps * uniform_real(rng, budget_frac_lo, budget_frac_hi);
  return pb;
}

}  // namespace

CheckResult check_demand_vs_bruteforce(UtilityClass klass, int instances, int max_d,
                                       double grid_step, std::uint64_t seed) {
  CheckResult res{"demand vs brute force (" + class_name(klass) + ")", true, ""};
  for (int i = 0; i < instances; ++i) {
    std::mt19937_64 rng(seed + 7919 * i);
    int d = static_cast<int>(uniform_int(rng, 1, max_d));
    Utility u = random_utility(klass, d, 2, 4, rng());
    PriceBudget pb = random_pb(d, rng, 0.05, 1.2);

    DemandResult fast = demand(u, pb);
    DemandResult brute = demand_bruteforce(u, pb, grid_step);

    double lip = 1.0;
    if (std::holds_alternative<SPLCUtility>(u)) {
      lip = 0;
      for (const auto& segs : std::get<SPLCUtility>(u).goods)
        lip += segs.front().slope.to_double();
    } else if (std::holds_alternative<LeontiefUtility>(u)) {
      double amin = kInf;
      for (const auto& a : std::get<LeontiefUtility>(u).a)
        if (a.sign() > 0) amin = std::min(amin, a.to_double());
      lip = 1.0 / amin;
    }
    double slack = lip * grid_step + 1e-7;
    double vf = eval(u, fast.bundle), vb = eval(u, brute.bundle);
    bool ok = vf >= vb - slack && kkt_check(u, pb, fast.bundle, 1e-7);
    ok = ok && fast.spent <= pb.budget + 1e-9 * (1 + pb.budget);
    if (!ok) {
      res.pass = false;
      res.detail = seed_detail(seed, i,
                               "class=" + class_name(klass) + " d=" + std::to_string(d));
      return res;
    }
  }
  return res;
}

CheckResult check_second_best_linear(int instances, int max_d, std::uint64_t seed) {
  CheckResult res{"second-best linear vs enumeration", true, ""};
  for (int i = 0; i < instances; ++i) {
    std::mt19937_64 rng(seed + 104729 * i);
    int d = static_cast<int>(uniform_int(rng, 2, max_d));
    std::vector<double> w(d);
    for (auto& v : w) v = uniform_real(rng, 0.0, 1.0);
    PriceBudget pb = random_pb(d, rng, 0.05, 0.95);

    SecondBest sb = second_best_linear(w, pb);
    Enumerated en = enumerate_admissible_linear(w, pb);
    double lib_val = dot(w, sb.bundle);
    bool ok = en.has_second &&
              std::abs(lib_val - en.second_value) <= 1e-7 * (1 + std::abs(en.second_value));
    if (!ok) {
      res.pass = false;
      res.detail = seed_detail(seed, i, "d=" + std::to_string(d));
      return res;
    }
  }
  return res;
}

CheckResult check_second_best_splc(int instances, int max_d, int max_kappa,
                                   std::uint64_t seed) {
  CheckResult res{"second-best splc vs enumeration", true, ""};
  for (int i = 0; i < instances; ++i) {
    std::mt19937_64 rng(seed + 15485863ull * i);
    int d = static_cast<int>(uniform_int(rng, 2, max_d));
    std::vector<std::vector<double>> w(d), lengths(d);
    for (int j = 0; j < d; ++j) {
      int segs = static_cast<int>(uniform_int(rng, 1, max_kappa));
      std::vector<double> s(segs);
      for (auto& v : s) v = uniform_real(rng, 0.05, 1.0);
      std::sort(s.rbegin(), s.rend());
      w[j] = s;
      for (int k = 0; k + 1 < segs; ++k)
        lengths[j].push_back(uniform_real(rng, 0.1, 0.5));
      lengths[j].push_back(kInf);
    }
    PriceBudget pb = random_pb(d, rng, 0.05, 0.95);

    SecondBest sb = second_best_splc(w, lengths, pb);
    Enumerated en = enumerate_admissible_splc(w, lengths, pb);

    std::size_t kappa = 0;
    for (const auto& row : lengths) kappa = std::max(kappa, row.size());
    std::vector<double> wflat(d * kappa, 0.0);
    for (int j = 0; j < d; ++j)
      for (std::size_t k = 0; k < w[j].size(); ++k) wflat[j * kappa + k] = w[j][k];
    double lib_val = dot(splc_split(lengths, sb.bundle), wflat);

    bool ok = en.has_second &&
              std::abs(lib_val - en.second_value) <= 1e-7 * (1 + std::abs(en.second_value));
    if (!ok) {
      res.pass = false;
      res.detail = seed_detail(seed, i, "d=" + std::to_string(d));
      return res;
    }
  }
  return res;
}

CheckResult check_svm_equals_mnp(int instances, int max_dim, int max_z, double tol,
                                 std::uint64_t seed) {
  CheckResult res{"min-norm point vs independent max-margin solve", true, ""};
  for (int i = 0; i < instances; ++i) {
    std::mt19937_64 rng(seed + 32452843ull * i);
    int D = static_cast<int>(uniform_int(rng, 2, max_dim));
    int nz = static_cast<int>(uniform_int(rng, 2, max_z));

    std::vector<double> wstar(D);
    double norm = 0;
    for (auto& v : wstar) {
      v = uniform_real(rng, 0.1, 1.0);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : wstar) v /= norm;

    std::vector<std::vector<double>> Z;
    while (static_cast<int>(Z.size()) < nz) {
      std::vector<double> z(D);
      double margin = 0;
      for (auto& v : z) v = uniform_real(rng, -1.0, 1.0);
      for (int t = 0; t < D; ++t) margin += z[t] * wstar[t];
      if (margin >= 0.1) Z.push_back(std::move(z));  // keep the set realizable
    }

    std::vector<double> mnp = min_norm_point(Z);
    std::vector<double> qp = max_margin_enumerate(Z);
    bool ok = !qp.empty();
    if (ok) {
      double na = 0, nb = 0;
      for (double v : mnp) na += v * v;
      for (double v : qp) nb += v * v;
      na = std::sqrt(na);
      nb = std::sqrt(nb);
      ok = na > 0 && nb > 0;
      for (int t = 0; ok && t < D; ++t)
        if (std::abs(mnp[t] / na - qp[t] / nb) > tol) ok = false;
    }
    if (!ok) {
      res.pass = false;
      res.detail = seed_detail(seed, i, "D=" + std::to_string(D) +
                                            " |Z|=" + std::to_string(nz));
      return res;
    }
  }
  return res;
}

CheckResult check_shattering(int d_max) {
  CheckResult res{"shattering construction d=2.." + std::to_string(d_max), true, ""};
  for (int d = 2; d <= d_max; ++d) {
    if (!shattering_check(d)) {
      res.pass = false;
      res.detail = "d=" + std::to_string(d);
      return res;
    }
  }
  if (shattering_check(3, 3)) {  // corrupted construction must fail
    res.pass = false;
    res.detail = "mutated w_1=3 unexpectedly shattered";
  }
  return res;
}

CheckResult check_claim1(int n_max) {
  CheckResult res{"slope-gap claim, exhaustive n=1.." + std::to_string(n_max), true, ""};
  for (int n = 1; n <= n_max; ++n) {
    if (!claim1_holds(n)) {
      res.pass = false;
      res.detail = "n=" + std::to_string(n);
      return res;
    }
  }
  return res;
}

CheckResult check_ordering_argmax(int instances, int max_d, std::uint64_t seed) {
  CheckResult res{"ordering argmax equals bang-per-buck sort", true, ""};
  for (int i = 0; i < instances; ++i) {
    std::mt19937_64 rng(seed + 49979687ull * i);
    int d = static_cast<int>(uniform_int(rng, 2, max_d));
    std::vector<double> w(d), p(d);
    for (auto& v : w) v = uniform_real(rng, 0.05, 1.0);
    for (auto& v : p) v = std::exp(uniform_real(rng, std::log(0.5), std::log(2.0)));

    EnumeratedRankings en = enumerate_rankings(w, p);
    if (en.best != best_ordering(w, p)) {
      res.pass = false;
      res.detail = seed_detail(seed, i, "d=" + std::to_string(d));
      return res;
    }
  }
  return res;
}

std::vector<CheckResult> run_suite(std::uint64_t seed, bool quick) {
  std::vector<CheckResult> out;
  const int n1 = quick ? 50 : 150;
  const double step = quick ? 1.0 / 40 : 1.0 / 100;
  for (UtilityClass c : {UtilityClass::linear, UtilityClass::splc, UtilityClass::ces,
                         UtilityClass::leontief})
    out.push_back(check_demand_vs_bruteforce(c, n1, 3, step, seed));
  out.push_back(check_second_best_linear(quick ? 150 : 500, quick ? 6 : 8, seed));
  out.push_back(check_second_best_splc(quick ? 40 : 150, 4, 3, seed));
  out.push_back(check_svm_equals_mnp(quick ? 40 : 120, 5, 20, 1e-6, seed));
  out.push_back(check_shattering(6));
  out.push_back(check_claim1(quick ? 3 : 4));
  out.push_back(check_ordering_argmax(quick ? 100 : 300, 5, seed));
  return out;
}

}  // namespace revpref::verify
