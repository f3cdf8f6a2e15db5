#include "revpref/utility.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "revpref/rng.hpp"

namespace revpref {

namespace {

void check_dim(std::size_t have, std::size_t want, const char* who) {
  if (have != want)
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

void check_normalized(const std::vector<Rational>& a, const char* who) {
  if (a.empty()) throw std::invalid_argument(std::string(who) + ": empty");
  Rational sum(0);
  for (const auto& v : a) {
    if (v.sign() < 0) throw std::invalid_argument(std::string(who) + ": negative coefficient");
    sum += v;
  }
  if (!(sum == Rational(1)))
    throw std::invalid_argument(std::string(who) + ": coefficients must sum to 1");
}

// num, den uniform in [1, 2^n - 1]; value lands in the size-n range.
Rational draw_size_n(std::mt19937_64& rng, int n_bits) {
  std::int64_t hi = (std::int64_t{1} << n_bits) - 1;
  return Rational(uniform_int(rng, 1, hi), uniform_int(rng, 1, hi));
}

std::vector<Rational> normalized_integer_weights(int d, int n_bits,
                                                 std::mt19937_64& rng) {
  std::int64_t hi = (std::int64_t{1} << n_bits) - 1;
  std::vector<Rational> u(d);
  Rational sum(0);
  for (auto& v : u) {
    v = Rational(uniform_int(rng, 1, hi));
    sum += v;
  }
  for (auto& v : u) v /= sum;
  return u;
}

}  // namespace

int SPLCUtility::max_segments() const {
  int m = 0;
  for (const auto& g : goods) m = std::max(m, static_cast<int>(g.size()));
  return m;
}

std::string class_name(UtilityClass c) {
  switch (c) {
    case UtilityClass::linear: return "linear";
    case UtilityClass::splc: return "splc";
    case UtilityClass::ces: return "ces";
    case UtilityClass::leontief: return "leontief";
  }
  throw std::logic_error("class_name: bad enum");
}

UtilityClass class_from_name(const std::string& name) {
  if (name == "linear") return UtilityClass::linear;
  if (name == "splc") return UtilityClass::splc;
  if (name == "ces") return UtilityClass::ces;
  if (name == "leontief") return UtilityClass::leontief;
  throw std::invalid_argument("unknown utility class '" + name + "'");
}

UtilityClass class_of(const Utility& u) {
  return std::visit(
      [](const auto& v) -> UtilityClass {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LinearUtility>) return UtilityClass::linear;
        else if constexpr (std::is_same_v<T, SPLCUtility>) return UtilityClass::splc;
        else if constexpr (std::is_same_v<T, CESUtility>) return UtilityClass::ces;
        else return UtilityClass::leontief;
      },
      u);
}

int utility_dim(const Utility& u) {
  return std::visit([](const auto& v) { return v.dim(); }, u);
}

void validate(const LinearUtility& u) { check_normalized(u.a, "LinearUtility"); }

void validate(const SPLCUtility& u) {
  if (u.goods.empty()) throw std::invalid_argument("SPLCUtility: empty");
  for (const auto& segs : u.goods) {
    if (segs.empty()) throw std::invalid_argument("SPLCUtility: good with no segments");
    for (std::size_t k = 0; k < segs.size(); ++k) {
      if (segs[k].slope.sign() < 0)
        throw std::invalid_argument("SPLCUtility: negative slope");
      if (k + 1 < segs.size()) {
        if (!segs[k].length)
          throw std::invalid_argument("SPLCUtility: only the last segment may be infinite");
        if (segs[k].length->sign() <= 0)
          throw std::invalid_argument("SPLCUtility: segment length must be positive");
        if (!(segs[k].slope > segs[k + 1].slope))
          throw std::invalid_argument("SPLCUtility: slopes must strictly decrease");
      } else if (segs[k].length) {
        throw std::invalid_argument("SPLCUtility: last segment must be infinite");
      }
    }
  }
}

void validate(const CESUtility& u) {
  check_normalized(u.a, "CESUtility");
  if (u.rho == 0.0) throw std::invalid_argument("CESUtility: rho = 0 is excluded");
  if (u.rho > 1.0) throw std::invalid_argument("CESUtility: rho must be <= 1");
}

void validate(const LeontiefUtility& u) { check_normalized(u.a, "LeontiefUtility"); }

void validate(const Utility& u) {
  std::visit([](const auto& v) { validate(v); }, u);
}

template <class S>
S eval(const LinearUtility& u, const BundleT<S>& x) {
  check_dim(x.size(), u.a.size(), "eval(linear)");
  S total{0};
  for (std::size_t j = 0; j < x.size(); ++j) total += to_scalar<S>(u.a[j]) * x[j];
  return total;
}

template <class S>
S eval(const SPLCUtility& u, const BundleT<S>& x) {
  check_dim(x.size(), u.goods.size(), "eval(splc)");
  S total{0};
  for (std::size_t j = 0; j < x.size(); ++j) {
    S rem = x[j];
    for (const auto& seg : u.goods[j]) {
      if (!(rem > S{0})) break;
      S take = rem;
      if (seg.length) take = std::min(take, to_scalar<S>(*seg.length));
      total += to_scalar<S>(seg.slope) * take;
      rem -= take;
    }
  }
  return total;
}

template <class S>
S eval(const LeontiefUtility& u, const BundleT<S>& x) {
  check_dim(x.size(), u.a.size(), "eval(leontief)");
  bool seen = false;
  S best{0};
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (u.a[j].sign() <= 0) continue;  // 0/0 treated as +inf, excluded from min
    S ratio = x[j] / to_scalar<S>(u.a[j]);
    if (!seen || ratio < best) {
      best = ratio;
      seen = true;
    }
  }
  if (!seen) throw std::invalid_argument("eval(leontief): all-zero proportions");
  return best;
}

template double eval<double>(const LinearUtility&, const Bundle&);
template Rational eval<Rational>(const LinearUtility&, const BundleQ&);
template double eval<double>(const SPLCUtility&, const Bundle&);
template Rational eval<Rational>(const SPLCUtility&, const BundleQ&);
template double eval<double>(const LeontiefUtility&, const Bundle&);
template Rational eval<Rational>(const LeontiefUtility&, const BundleQ&);

double eval(const CESUtility& u, const Bundle& x) {
  check_dim(x.size(), u.a.size(), "eval(ces)");
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double aj = u.a[j].to_double();
    if (aj == 0.0) continue;
    if (x[j] == 0.0) {
      if (u.rho < 0.0) return 0.0;  // complements: a missing good kills the value
      continue;
    }
    sum += aj * std::pow(x[j], u.rho);
  }
  if (sum <= 0.0) return 0.0;
  return std::pow(sum, 1.0 / u.rho);
}

double eval(const Utility& u, const Bundle& x) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CESUtility>) return eval(v, x);
        else return eval<double>(v, x);
      },
      u);
}

Rational eval_exact(const Utility& u, const BundleQ& x) {
  return std::visit(
      [&](const auto& v) -> Rational {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CESUtility>)
          throw std::invalid_argument("eval_exact: CES is float-only");
        else
          return eval<Rational>(v, x);
      },
      u);
}

LinearUtility random_linear(int d, int n_bits, std::mt19937_64& rng) {
  if (d < 1 || n_bits < 1) throw std::invalid_argument("random_linear: bad d or n");
  LinearUtility u{normalized_integer_weights(d, n_bits, rng), n_bits};
  validate(u);
  return u;
}

SPLCUtility random_splc(int d, int kappa, int n_bits, std::mt19937_64& rng) {
  if (d < 1 || kappa < 1 || n_bits < 1)
    throw std::invalid_argument("random_splc: bad d, kappa, or n");
  SPLCUtility u;
  u.n_bits = n_bits;
  u.goods.resize(d);
  for (int j = 0; j < d; ++j) {
    int count = static_cast<int>(uniform_int(rng, 1, kappa));
    // good 1 carries the a_11 = 1 normalization; its remaining slopes sit
    // strictly below 1.
    std::set<Rational, std::greater<>> slopes;
    if (j == 0) slopes.insert(Rational(1));
    int attempts = 0;
    while (static_cast<int>(slopes.size()) < count) {
      if (++attempts > 4000)
        throw std::invalid_argument("random_splc: infeasible (d, kappa, n)");
      Rational s = draw_size_n(rng, n_bits);
      if (j == 0 && !(s < Rational(1))) continue;
      slopes.insert(s);
    }
    auto it = slopes.begin();
    for (int k = 0; k < count; ++k, ++it) {
      SPLCUtility::Segment seg;
      seg.slope = *it;
      if (k + 1 < count) seg.length = draw_size_n(rng, n_bits);
      u.goods[j].push_back(std::move(seg));
    }
  }
  validate(u);
  return u;
}

CESUtility random_ces(int d, int n_bits, std::mt19937_64& rng) {
  if (d < 1 || n_bits < 1) throw std::invalid_argument("random_ces: bad d or n");
  CESUtility u;
  u.a = normalized_integer_weights(d, n_bits, rng);
  u.n_bits = n_bits;
  // keep clear of the excluded rho = 0 and of the linear corner rho = 1
  do {
    u.rho = uniform_real(rng, -3.0, 0.9);
  } while (std::abs(u.rho) < 0.05);
  validate(u);
  return u;
}

LeontiefUtility random_leontief(int d, int n_bits, std::mt19937_64& rng) {
  if (d < 1 || n_bits < 1) throw std::invalid_argument("random_leontief: bad d or n");
  LeontiefUtility u{normalized_integer_weights(d, n_bits, rng), n_bits};
  validate(u);
  return u;
}

Utility random_utility(UtilityClass c, int d, int kappa, int n_bits,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  switch (c) {
    case UtilityClass::linear: return random_linear(d, n_bits, rng);
    case UtilityClass::splc: return random_splc(d, kappa, n_bits, rng);
    case UtilityClass::ces: return random_ces(d, n_bits, rng);
    case UtilityClass::leontief: return random_leontief(d, n_bits, rng);
  }
  throw std::logic_error("random_utility: bad enum");
}

}  // namespace revpref
