#include "revpref/value_query.hpp"

#include <cmath>
#include <stdexcept>

#include "revpref/rational.hpp"

namespace revpref {

namespace {

bool negligible(const Rational& v, const Rational&) { return v.is_zero(); }
bool negligible(double v, double scale) { return std::abs(v) <= 1e-11 * (1 + scale); }

template <class S>
S row_scale(const std::vector<S>& x) {
  S m{0};
  for (const auto& v : x) {
    S a = v < S{0} ? S{0} - v : v;
    if (a > m) m = a;
  }
  return m;
}

}  // namespace

template <class S>
bool SpanSolver<S>::reduce(std::vector<S>& x, S& y) const {
  for (const auto& row : rows_) {
    S c = x[row.pivot];
    if (negligible(c, row_scale(x))) continue;
    for (std::size_t t = 0; t < x.size(); ++t) x[t] -= c * row.x[t];
    x[row.pivot] = S{0};
    y -= c * row.y;
  }
  S scale = row_scale(x);
  for (const auto& v : x)
    if (!negligible(v, scale)) return false;
  return true;
}

template <class S>
void SpanSolver<S>::add(const std::vector<S>& x, const S& y) {
  if (!rows_.empty() && x.size() != rows_.front().x.size())
    throw std::invalid_argument("SpanSolver: dimension mismatch");
  std::vector<S> r = x;
  S ry = y;
  if (reduce(r, ry)) {
    if (!negligible(ry, S{1}))
      throw std::invalid_argument("SpanSolver: label inconsistent with the sample span");
    return;
  }
  std::size_t pivot = 0;
  S scale = row_scale(r);
  while (negligible(r[pivot], scale)) ++pivot;
  S c = r[pivot];
  for (auto& v : r) v /= c;
  ry /= c;
  r[pivot] = S{1};
  rows_.push_back(Row{std::move(r), std::move(ry), pivot});
}

template <class S>
std::optional<S> SpanSolver<S>::predict(const std::vector<S>& x) const {
  std::vector<S> r = x;
  S y{0};
  if (!rows_.empty() && x.size() != rows_.front().x.size())
    throw std::invalid_argument("SpanSolver: dimension mismatch");
  if (!reduce(r, y)) return std::nullopt;  // outside the span: abstain
  return S{0} - y;
}

template class SpanSolver<Rational>;
template class SpanSolver<double>;

std::optional<std::vector<Rational>> LinearValueHypothesis::recovered() const {
  std::vector<Rational> a(d);
  for (int k = 0; k < d; ++k) {
    BundleQ e(d, Rational(0));
    e[k] = Rational(1);
    auto v = solver.predict(e);
    if (!v) return std::nullopt;
    a[k] = *v;
  }
  return a;
}

LinearValueHypothesis learn_linear_values(
    const std::vector<std::pair<BundleQ, Rational>>& sample) {
  if (sample.empty()) throw std::invalid_argument("learn_linear_values: empty sample");
  LinearValueHypothesis h;
  h.d = static_cast<int>(sample.front().first.size());
  for (const auto& [x, y] : sample) h.solver.add(x, y);
  return h;
}

std::vector<Rational> splc_split_exact(
    const std::vector<std::vector<std::optional<Rational>>>& lengths,
    const BundleQ& x) {
  std::size_t kappa = 0;
  for (const auto& row : lengths) kappa = std::max(kappa, row.size());
  std::vector<Rational> out(lengths.size() * kappa, Rational(0));
  for (std::size_t j = 0; j < lengths.size(); ++j) {
    Rational rem = x[j];
    for (std::size_t k = 0; k < lengths[j].size() && rem > Rational(0); ++k) {
      Rational take = rem;
      if (lengths[j][k] && *lengths[j][k] < take) take = *lengths[j][k];
      out[j * kappa + k] = take;
      rem -= take;
    }
  }
  return out;
}

SPLCValueHypothesis learn_splc_values_known_lengths(
    const std::vector<std::pair<BundleQ, Rational>>& sample,
    std::vector<std::vector<std::optional<Rational>>> lengths) {
  SPLCValueHypothesis h;
  h.lengths = std::move(lengths);
  for (const auto& [x, y] : sample) h.solver.add(splc_split_exact(h.lengths, x), y);
  return h;
}

std::optional<double> CESValueHypothesis::predict(const Bundle& x) const {
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::pow(x[i], rho);
  auto v = solver.predict(z);
  if (!v) return std::nullopt;
  return *v <= 0 ? 0.0 : std::pow(*v, 1.0 / rho);
}

CESValueHypothesis learn_ces_values_rho(
    const std::vector<std::pair<Bundle, double>>& sample, double rho) {
  if (rho == 0) throw std::invalid_argument("learn_ces_values_rho: rho = 0");
  CESValueHypothesis h;
  h.rho = rho;
  for (const auto& [x, y] : sample) {
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::pow(x[i], rho);
    h.solver.add(z, std::pow(y, rho));
  }
  return h;
}

void LeontiefEstimate::update(const BundleQ& x, const Rational& y) {
  if (x.size() != b.size())
    throw std::invalid_argument("LeontiefEstimate: dimension mismatch");
  if (y.is_zero()) {  // division by zero carries no bound
    ++skipped_zero_labels;
    return;
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    Rational bound = x[j] / y;
    if (!b[j] || bound < *b[j]) b[j] = bound;
  }
}

Rational LeontiefEstimate::predict(const BundleQ& x) const {
  bool seen = false;
  Rational best(0);
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!b[j] || b[j]->sign() <= 0) continue;  // unbounded or irrelevant good
    Rational ratio = x[j] / *b[j];
    if (!seen || ratio < best) {
      best = ratio;
      seen = true;
    }
  }
  if (!seen)
    throw std::invalid_argument("LeontiefEstimate: no informative samples yet");
  return best;
}

LeontiefEstimate learn_leontief_values(
    const std::vector<std::pair<BundleQ, Rational>>& sample, int d) {
  LeontiefEstimate est(d);
  for (const auto& [x, y] : sample) est.update(x, y);
  return est;
}

LinearUtility vq_linear(ValueOracle& oracle, int d) {
  LinearUtility u;
  u.a.resize(d);
  for (int k = 0; k < d; ++k) {
    BundleQ e(d, Rational(0));
    e[k] = Rational(1);
    u.a[k] = oracle.query(e);  // a_k = U(e_k)
  }
  return u;
}

CESUtility vq_ces(ValueOracle& oracle, int d, double rho) {
  if (rho == 0) throw std::invalid_argument("vq_ces: rho = 0");
  // forward evaluation gives U(e_k) = a_k^{1/rho}, so inversion raises to rho
  std::vector<double> a(d);
  for (int k = 0; k < d; ++k) {
    Bundle e(d, 0.0);
    e[k] = 1.0;
    a[k] = std::pow(oracle.query_real(e), rho);
  }
  CESUtility u;
  u.rho = rho;
  Rational sum(0);
  u.a.resize(d);
  for (int k = 0; k < d; ++k) {
    u.a[k] = Rational::from_double(a[k]);
    sum += u.a[k];
  }
  for (auto& v : u.a) v /= sum;
  return u;
}

LeontiefUtility vq_leontief(ValueOracle& oracle, int d, int n_bits) {
  LeontiefUtility u;
  u.a.assign(d, Rational(0));
  u.n_bits = n_bits;
  std::vector<int> nonzero;
  for (int j = 0; j < d; ++j) {  // zero test: drop coordinate j entirely
    BundleQ x(d, Rational(1));
    x[j] = Rational(0);
    if (oracle.query(x).is_zero()) nonzero.push_back(j);
  }
  const Rational probe = Rational::pow2(-(2L * n_bits + 1));
  for (int k : nonzero) {
    BundleQ x(d, Rational(1));
    x[k] = probe;
    Rational v = oracle.query(x);
    u.a[k] = probe / v;  // the probe coordinate is the unique minimizer
  }
  return u;
}

SPLCUtility vq_splc(ValueOracle& oracle, int d, int n_bits, int kappa_guard) {
  const Rational eps = Rational::pow2(-(n_bits + 1));
  const Rational big = Rational::pow2(n_bits + 1);
  const mpz_class max_den = mpz_class(1) << n_bits;

  SPLCUtility u;
  u.n_bits = n_bits;
  u.goods.resize(d);
  for (int j = 0; j < d; ++j) {
    Rational start(0), value_at_start(0);
    for (int k = 0;; ++k) {
      if (k >= kappa_guard)
        throw std::runtime_error("vq_splc: more segments than the guard allows");
      auto probe_at = [&](const Rational& xj) {
        BundleQ x(d, Rational(0));
        x[j] = xj;
        return oracle.query(x);
      };
      Rational slope = (probe_at(start + eps) - value_at_start) / eps;
      if (probe_at(start + big) == value_at_start + slope * big) {
        u.goods[j].push_back({slope, std::nullopt});  // linear to infinity: last
        break;
      }
      Rational lo(0), hi = big;
      Rational mid;
      SearchFlag flag = SearchFlag::last_move_lowered_hi;
      const int iters = bisection_iterations(hi, max_den);
      for (int i = 0; i < iters; ++i) {
        mid = (lo + hi) / Rational(2);
        if (probe_at(start + mid) < value_at_start + slope * mid) {
          hi = mid;  // overshot the segment: concavity bends the value down
          flag = SearchFlag::last_move_lowered_hi;
        } else {
          lo = mid;
          flag = SearchFlag::last_move_raised_lo;
        }
      }
      Rational len = rational_from_binary_search(mid, mid, max_den, flag);
      u.goods[j].push_back({slope, len});
      start += len;
      value_at_start += slope * len;
    }
  }
  return u;
}

}  // namespace revpref
