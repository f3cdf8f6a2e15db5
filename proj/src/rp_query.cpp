#include "revpref/rp_query.hpp"

#include <cmath>
#include <stdexcept>

namespace revpref {

namespace {

// Other goods are priced out of every probe.
PriceBudgetQ base_prices(int d, int n_bits) {
  PriceBudgetQ pb;
  pb.prices.assign(d, Rational::pow2(10L * n_bits));
  pb.budget = Rational(0);
  return pb;
}

Rational rational_min(const Rational& a, const Rational& b) { return a < b ? a : b; }

}  // namespace

Rational alg1_ratio(RPOracle& oracle, int good, const Rational& upper,
                    const Rational& shrink, const Rational& x_extra, int n_bits,
                    const mpz_class& max_den, int reference,
                    const Rational& ref_price) {
  const int d = oracle.dim();
  if (good == reference || good < 0 || good >= d || reference < 0 || reference >= d)
    throw std::invalid_argument("alg1_ratio: bad good/reference pair");

  PriceBudgetQ pb = base_prices(d, n_bits);
  pb.prices[reference] = ref_price;

  Rational lo(0), hi = upper;
  const int iters = bisection_iterations(upper, max_den);
  Rational p_good;
  SearchFlag flag = SearchFlag::last_move_lowered_hi;
  for (int i = 0; i < iters; ++i) {
    p_good = (lo + hi) / Rational(2);
    pb.prices[good] = p_good;
    pb.budget = x_extra * p_good + rational_min(ref_price, p_good) * shrink;
    BundleQ x = oracle.query(pb);
    bool bought_good = x[good] > x_extra;
    bool bought_ref = x[reference] > Rational(0);
    if (bought_good && bought_ref) return p_good;  // exact indifference hit
    if (bought_good) {
      lo = p_good;
      flag = SearchFlag::last_move_raised_lo;
    } else {
      hi = p_good;
      flag = SearchFlag::last_move_lowered_hi;
    }
  }
  // p_good is the endpoint the last move produced; round it toward the target
  return rational_from_binary_search(p_good, p_good, max_den, flag);
}

std::optional<Rational> alg2_length(RPOracle& oracle, int good, const Rational& p_good,
                                    const Rational& x_extra, int n_bits,
                                    const mpz_class& max_den, int reference,
                                    const Rational& ref_price) {
  const int d = oracle.dim();
  if (good == reference || good < 0 || good >= d || reference < 0 || reference >= d)
    throw std::invalid_argument("alg2_length: bad good/reference pair");
  if (!(p_good > Rational(0)))
    throw std::invalid_argument("alg2_length: segment slope must be positive");

  PriceBudgetQ pb = base_prices(d, n_bits);
  pb.prices[reference] = ref_price;
  pb.prices[good] = p_good;

  Rational hi = Rational::pow2(n_bits + 1);
  Rational lo(0);

  // budget that would overfill any finite segment: untouched reference good
  // means the segment is the infinite last one
  pb.budget = (hi + x_extra) * p_good;
  if (oracle.query(pb)[reference] == Rational(0)) return std::nullopt;

  const int iters = bisection_iterations(hi, max_den);
  Rational t;
  SearchFlag flag = SearchFlag::last_move_lowered_hi;
  for (int i = 0; i < iters; ++i) {
    t = (lo + hi) / Rational(2);
    pb.budget = (t + x_extra) * p_good;
    BundleQ x = oracle.query(pb);
    if (x[reference] == Rational(0)) {  // t <= length: nothing spilled over
      lo = t;
      flag = SearchFlag::last_move_raised_lo;
    } else {
      hi = t;
      flag = SearchFlag::last_move_lowered_hi;
    }
  }
  return rational_from_binary_search(t, t, max_den, flag);
}

std::vector<int> find_support_linear(RPOracle& oracle, int d) {
  PriceBudgetQ pb;
  pb.prices.assign(d, Rational(1));
  pb.budget = Rational(d);  // enough to buy every good completely
  BundleQ x = oracle.query(pb);
  std::vector<int> support;
  for (int j = 0; j < d; ++j)
    if (x[j] > Rational(0)) support.push_back(j);
  return support;
}

LinearUtility learn_linear_rp(RPOracle& oracle, int d, int n_bits) {
  std::vector<int> support = find_support_linear(oracle, d);
  if (support.empty())
    throw std::runtime_error("learn_linear_rp: oracle bought nothing at full budget");

  const int ref = support.front();
  const mpz_class max_den = mpz_class(1) << n_bits;
  std::vector<Rational> ratio(d, Rational(0));
  ratio[ref] = Rational(1);
  for (int j : support) {
    if (j == ref) continue;
    ratio[j] = alg1_ratio(oracle, j, Rational::pow2(2L * n_bits), Rational(1),
                          Rational(0), n_bits, max_den, ref, Rational(1));
  }
  Rational sum(0);
  for (const auto& r : ratio) sum += r;
  LinearUtility u;
  u.n_bits = n_bits;
  u.a.resize(d);
  for (int j = 0; j < d; ++j) u.a[j] = ratio[j] / sum;
  return u;
}

namespace {

std::vector<SPLCUtility::Segment> learn_splc_good(RPOracle& oracle, int good,
                                                  int reference,
                                                  const Rational& ref_first_slope,
                                                  int kappa, int n_bits) {
  const mpz_class max_den = mpz_class(1) << n_bits;
  const Rational shrink = Rational::pow2(-(n_bits + 1));
  const Rational eps = Rational::pow2(-(2L * n_bits + 1));

  std::vector<SPLCUtility::Segment> segs;
  Rational prev_slope = Rational::pow2(n_bits + 1);  // hypothetical segment 0
  Rational x_extra(0);
  for (int k = 0; k < kappa; ++k) {
    Rational slope = alg1_ratio(oracle, good, prev_slope, shrink, x_extra, n_bits,
                                max_den, reference, ref_first_slope);
    if (slope.is_zero()) {  // worthless tail; the good ends here
      segs.push_back({Rational(0), std::nullopt});
      return segs;
    }
    std::optional<Rational> len =
        alg2_length(oracle, good, slope, x_extra, n_bits, max_den, reference,
                    ref_first_slope * (Rational(1) + eps));
    segs.push_back({slope, len});
    if (!len) return segs;
    x_extra += *len;
    prev_slope = slope;
  }
  throw std::runtime_error("learn_splc_rp: more segments than kappa allows");
}

}  // namespace

SPLCUtility learn_splc_rp(RPOracle& oracle, int d, int kappa, int n_bits) {
  if (d < 2)
    throw std::invalid_argument("learn_splc_rp: needs a reference good (d >= 2)");
  if (oracle.domain() != Domain::nonnegative)
    throw std::invalid_argument("learn_splc_rp: oracle must run on the R_+ domain");

  SPLCUtility u;
  u.n_bits = n_bits;
  u.goods.resize(d);
  for (int j = 1; j < d; ++j)
    u.goods[j] = learn_splc_good(oracle, j, 0, Rational(1), kappa, n_bits);
  // good 1 swaps identity with good 2: its segments are probed against the
  // now-known first slope of good 2
  u.goods[0] =
      learn_splc_good(oracle, 0, 1, u.goods[1][0].slope, kappa, n_bits);
  return u;
}

CESUtility learn_ces_rp(RPOracle& oracle, int d) {
  if (d < 2) throw std::invalid_argument("learn_ces_rp: rho unidentifiable for d < 2");

  PriceBudget q1{std::vector<double>(d, 1.0), 0.5};
  PriceBudget q2;
  q2.prices.resize(d);
  for (int j = 0; j < d; ++j) q2.prices[j] = static_cast<double>(j + 1);
  q2.budget = 0.5;

  Bundle x1 = oracle.query_real(q1);
  Bundle x2 = oracle.query_real(q2);
  for (int j = 0; j < d; ++j)
    if (x1[j] <= 0 || x2[j] <= 0)
      throw std::runtime_error("learn_ces_rp: boundary bundle contradicts the interior property");

  // (1-rho) [log(x1_j/x1_1) - log(x2_j/x2_1)] = log j, solved at j = 2
  double denom = std::log(x1[1] / x1[0]) - std::log(x2[1] / x2[0]);
  if (denom == 0) throw std::runtime_error("learn_ces_rp: degenerate responses");
  double one_minus_rho = std::log(2.0) / denom;

  std::vector<Rational> a(d);
  Rational sum(0);
  for (int j = 0; j < d; ++j) {
    a[j] = Rational::from_double(std::pow(x1[j] / x1[0], one_minus_rho));
    sum += a[j];
  }
  for (auto& v : a) v /= sum;

  CESUtility u;
  u.a = std::move(a);
  u.rho = 1.0 - one_minus_rho;
  return u;
}

LeontiefUtility learn_leontief_rp_query(RPOracle& oracle, int d) {
  PriceBudgetQ pb;
  pb.prices.assign(d, Rational(1));
  pb.budget = Rational(1, 2);  // below min price: beta = B exactly
  BundleQ x = oracle.query(pb);
  LeontiefUtility u;
  u.a.resize(d);
  for (int j = 0; j < d; ++j) u.a[j] = Rational(2) * x[j];
  return u;
}

}  // namespace revpref
