#include "revpref/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace revpref {

namespace {

template <class S>
void check_pb(std::size_t d, const PriceBudgetT<S>& pb, const char* who) {
  if (pb.prices.size() != d)
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  for (const auto& p : pb.prices)
    if (!(p > S{0})) throw std::invalid_argument(std::string(who) + ": prices must be positive");
  if (pb.budget < S{0})
    throw std::invalid_argument(std::string(who) + ": negative budget");
}

// Sort indices by ratio descending; stability gives the lower index on ties.
template <class S>
std::vector<int> ratio_order(const std::vector<S>& ratios) {
  std::vector<int> order(ratios.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return ratios[i] > ratios[j]; });
  return order;
}

}  // namespace

template <class S>
DemandResultT<S> demand_linear(std::span<const S> coeffs, const PriceBudgetT<S>& pb,
                               Domain dom) {
  check_pb(coeffs.size(), pb, "demand_linear");
  const std::size_t d = coeffs.size();
  std::vector<S> ratios(d);
  for (std::size_t j = 0; j < d; ++j) ratios[j] = coeffs[j] / pb.prices[j];
  auto order = ratio_order(ratios);

  DemandResultT<S> res;
  res.bundle.assign(d, S{0});
  S rem = pb.budget;
  for (int idx : order) {
    if (!(coeffs[idx] > S{0})) break;  // zero marginal value: never bought
    if (!(rem > S{0})) break;
    S afford = rem / pb.prices[idx];
    S take = afford;
    if (dom == Domain::unit_cube && take > S{1}) take = S{1};
    res.bundle[idx] = take;
    if (take == afford) {
      rem = S{0};
    } else {
      rem -= take * pb.prices[idx];
    }
  }
  for (std::size_t i = 0; i + 1 < d; ++i) {
    int a = order[i], b = order[i + 1];
    if (ratios[a] == ratios[b] && ratios[a] > S{0} && res.bundle[a] > S{0}) {
      res.tie_broken = true;
      break;
    }
  }
  res.spent = dot(pb.prices, res.bundle);
  return res;
}

template <class S>
DemandResultT<S> demand_linear(const LinearUtility& u, const PriceBudgetT<S>& pb,
                               Domain dom) {
  std::vector<S> coeffs(u.a.size());
  for (std::size_t j = 0; j < coeffs.size(); ++j) coeffs[j] = to_scalar<S>(u.a[j]);
  return demand_linear(std::span<const S>(coeffs), pb, dom);
}

template <class S>
SPLCSpec<S> splc_spec(const SPLCUtility& u) {
  SPLCSpec<S> spec(u.goods.size());
  for (std::size_t j = 0; j < u.goods.size(); ++j) {
    for (const auto& seg : u.goods[j]) {
      SegmentSpecT<S> s;
      s.slope = to_scalar<S>(seg.slope);
      if (seg.length) s.length = to_scalar<S>(*seg.length);
      spec[j].push_back(std::move(s));
    }
  }
  return spec;
}

template <class S>
DemandResultT<S> demand_splc(const SPLCSpec<S>& segments, const PriceBudgetT<S>& pb,
                             Domain dom) {
  check_pb(segments.size(), pb, "demand_splc");
  const std::size_t d = segments.size();

  struct Flat {
    int good;
    int seg;
    S ratio;
  };
  std::vector<Flat> flat;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < segments[j].size(); ++k)
      flat.push_back({static_cast<int>(j), static_cast<int>(k),
                      segments[j][k].slope / pb.prices[j]});
  // stable: flatten order is (good, segment), which is the tie-break rule
  std::stable_sort(flat.begin(), flat.end(),
                   [](const Flat& a, const Flat& b) { return a.ratio > b.ratio; });

  DemandResultT<S> res;
  res.bundle.assign(d, S{0});
  S rem = pb.budget;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const Flat& f = flat[i];
    if (!(f.ratio > S{0})) break;
    if (!(rem > S{0})) break;
    const auto& seg = segments[f.good][f.seg];
    S afford = rem / pb.prices[f.good];
    S take = afford;
    if (seg.length && *seg.length < take) take = *seg.length;
    if (dom == Domain::unit_cube) {
      S room = S{1} - res.bundle[f.good];
      if (room < take) take = room;
    }
    if (!(take > S{0})) continue;
    if (i > 0 && flat[i - 1].ratio == f.ratio) res.tie_broken = true;
    res.bundle[f.good] += take;
    if (take == afford) {
      rem = S{0};
    } else {
      rem -= take * pb.prices[f.good];
    }
  }
  res.spent = dot(pb.prices, res.bundle);
  return res;
}

template <class S>
DemandResultT<S> demand_splc(const SPLCUtility& u, const PriceBudgetT<S>& pb,
                             Domain dom) {
  return demand_splc(splc_spec<S>(u), pb, dom);
}

template <class S>
DemandResultT<S> demand_leontief(const LeontiefUtility& u, const PriceBudgetT<S>& pb,
                                 Domain dom) {
  check_pb(u.a.size(), pb, "demand_leontief");
  const std::size_t d = u.a.size();
  DemandResultT<S> res;
  res.bundle.assign(d, S{0});
  S ap{0};
  S amax{0};
  for (std::size_t j = 0; j < d; ++j) {
    S aj = to_scalar<S>(u.a[j]);
    ap += aj * pb.prices[j];
    if (aj > amax) amax = aj;
  }
  if (!(ap > S{0})) {  // zero utility everywhere: cheapest optimum is empty
    res.spent = S{0};
    return res;
  }
  S beta = pb.budget / ap;
  if (dom == Domain::unit_cube) {
    S cap = S{1} / amax;
    if (cap < beta) beta = cap;
  }
  for (std::size_t j = 0; j < d; ++j) res.bundle[j] = beta * to_scalar<S>(u.a[j]);
  res.spent = dot(pb.prices, res.bundle);
  return res;
}

template DemandResultT<double> demand_linear<double>(std::span<const double>,
                                                     const PriceBudget&, Domain);
template DemandResultT<Rational> demand_linear<Rational>(std::span<const Rational>,
                                                         const PriceBudgetQ&, Domain);
template DemandResultT<double> demand_linear<double>(const LinearUtility&,
                                                     const PriceBudget&, Domain);
template DemandResultT<Rational> demand_linear<Rational>(const LinearUtility&,
                                                         const PriceBudgetQ&, Domain);
template SPLCSpec<double> splc_spec<double>(const SPLCUtility&);
template SPLCSpec<Rational> splc_spec<Rational>(const SPLCUtility&);
template DemandResultT<double> demand_splc<double>(const SPLCSpec<double>&,
                                                   const PriceBudget&, Domain);
template DemandResultT<Rational> demand_splc<Rational>(const SPLCSpec<Rational>&,
                                                       const PriceBudgetQ&, Domain);
template DemandResultT<double> demand_splc<double>(const SPLCUtility&,
                                                   const PriceBudget&, Domain);
template DemandResultT<Rational> demand_splc<Rational>(const SPLCUtility&,
                                                       const PriceBudgetQ&, Domain);
template DemandResultT<double> demand_leontief<double>(const LeontiefUtility&,
                                                       const PriceBudget&, Domain);
template DemandResultT<Rational> demand_leontief<Rational>(const LeontiefUtility&,
                                                           const PriceBudgetQ&, Domain);

DemandResult demand_ces(const CESUtility& u, const PriceBudget& pb) {
  check_pb(u.a.size(), pb, "demand_ces");
  const std::size_t d = u.a.size();
  const double sigma = 1.0 / (1.0 - u.rho);

  DemandResult res;
  res.bundle.assign(d, 0.0);
  std::vector<int> active;
  for (std::size_t j = 0; j < d; ++j)
    if (u.a[j].sign() > 0) active.push_back(static_cast<int>(j));

  double rem = pb.budget;
  // each round either finishes or saturates at least one good at 1
  for (std::size_t round = 0; round <= d && !active.empty() && rem > 0; ++round) {
    double denom = 0.0;
    std::vector<double> w(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
      int j = active[i];
      w[i] = std::pow(u.a[j].to_double() / pb.prices[j], sigma);
      denom += pb.prices[j] * w[i];
    }
    if (denom <= 0) break;
    double t = rem / denom;
    std::vector<int> still;
    bool clipped = false;
    for (std::size_t i = 0; i < active.size(); ++i) {
      int j = active[i];
      if (t * w[i] >= 1.0) {
        res.bundle[j] = 1.0;
        rem -= pb.prices[j];
        clipped = true;
      } else {
        still.push_back(j);
      }
    }
    if (!clipped) {
      for (std::size_t i = 0; i < active.size(); ++i)
        res.bundle[active[i]] = t * w[i];
      rem = 0;
      break;
    }
    active.swap(still);
  }
  res.spent = dot(pb.prices, res.bundle);
  return res;
}

DemandResult demand(const Utility& u, const PriceBudget& pb, Domain dom) {
  return std::visit(
      [&](const auto& v) -> DemandResult {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LinearUtility>)
          return demand_linear<double>(v, pb, dom);
        else if constexpr (std::is_same_v<T, SPLCUtility>)
          return demand_splc<double>(v, pb, dom);
        else if constexpr (std::is_same_v<T, CESUtility>)
          return demand_ces(v, pb);
        else
          return demand_leontief<double>(v, pb, dom);
      },
      u);
}

DemandResultT<Rational> demand_exact(const Utility& u, const PriceBudgetQ& pb,
                                     Domain dom) {
  return std::visit(
      [&](const auto& v) -> DemandResultT<Rational> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LinearUtility>)
          return demand_linear<Rational>(v, pb, dom);
        else if constexpr (std::is_same_v<T, SPLCUtility>)
          return demand_splc<Rational>(v, pb, dom);
        else if constexpr (std::is_same_v<T, CESUtility>)
          throw std::invalid_argument("demand_exact: CES demand is float-only");
        else
          return demand_leontief<Rational>(v, pb, dom);
      },
      u);
}

namespace {

constexpr double kGridEps = 1e-12;

struct BruteBest {
  Bundle x;
  double value = -std::numeric_limits<double>::infinity();
  double cost = 0.0;
  bool tie = false;
};

bool lex_greater(const Bundle& a, const Bundle& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i] + kGridEps) return true;
    if (a[i] < b[i] - kGridEps) return false;
  }
  return false;
}

void consider(BruteBest& best, const Bundle& cand, double value, double cost) {
  if (value > best.value + kGridEps) {
    best = {cand, value, cost, false};
    return;
  }
  if (value < best.value - kGridEps) return;
  best.tie = true;
  if (cost < best.cost - kGridEps ||
      (cost < best.cost + kGridEps && lex_greater(cand, best.x))) {
    best.x = cand;
    best.value = value;
    best.cost = cost;
    best.tie = true;
  }
}

// Cheapest utility-maximizing last coordinate given the prefix; closed form
// per class, restricted to grid multiples of step.
double best_last_coordinate(const Utility& u, const Bundle& prefix, int last,
                            double step, double max_afford_levels) {
  double top = max_afford_levels * step;
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LinearUtility>) {
          return v.a[last].sign() > 0 ? top : 0.0;
        } else if constexpr (std::is_same_v<T, CESUtility>) {
          return v.a[last].sign() > 0 ? top : 0.0;
        } else if constexpr (std::is_same_v<T, SPLCUtility>) {
          double useful = 0.0;
          bool unbounded = false;
          for (const auto& seg : v.goods[last]) {
            if (seg.slope.sign() <= 0) break;
            if (!seg.length) {
              unbounded = true;
              break;
            }
            useful += seg.length->to_double();
          }
          if (unbounded) return top;
          double lvl = std::ceil(useful / step - kGridEps) * step;
          return std::min(top, lvl);
        } else {  // Leontief
          if (v.a[last].sign() <= 0) return 0.0;
          double a = v.a[last].to_double();
          double others = std::numeric_limits<double>::infinity();
          for (int j = 0; j < v.dim(); ++j) {
            if (j == last || v.a[j].sign() <= 0) continue;
            others = std::min(others, prefix[j] / v.a[j].to_double());
          }
          double target = std::min(others * a, top);
          double lvl = std::ceil(target / step - kGridEps) * step;
          return std::min(top, std::max(0.0, lvl));
        }
      },
      u);
}

}  // namespace

DemandResult demand_bruteforce(const Utility& u, const PriceBudget& pb,
                               double grid_step, std::size_t node_cap,
                               bool exploit_monotone) {
  const int d = utility_dim(u);
  check_pb(static_cast<std::size_t>(d), pb, "demand_bruteforce");
  if (!(grid_step > 0)) throw std::invalid_argument("demand_bruteforce: bad grid step");

  const int levels = static_cast<int>(std::floor(1.0 / grid_step + kGridEps));
  const int loop_dims = exploit_monotone ? d - 1 : d;
  double est = std::pow(static_cast<double>(levels + 1), loop_dims);
  if (est > static_cast<double>(node_cap))
    throw std::invalid_argument("demand_bruteforce: grid too large");

  BruteBest best;
  best.x.assign(d, 0.0);
  best.value = eval(u, best.x);  // the zero bundle is always feasible
  best.cost = 0.0;

  Bundle cur(d, 0.0);
  const double btol = pb.budget + kGridEps * (1.0 + pb.budget);

  auto finish = [&](double cost) {
    if (exploit_monotone) {
      int last = d - 1;
      double afford = (pb.budget - cost) / pb.prices[last];
      double max_lvls =
          std::min(static_cast<double>(levels), std::floor(afford / grid_step + kGridEps));
      if (max_lvls < 0) return;
      cur[last] = best_last_coordinate(u, cur, last, grid_step, max_lvls);
      consider(best, cur, eval(u, cur), cost + cur[last] * pb.prices[last]);
      cur[last] = 0.0;
    } else {
      consider(best, cur, eval(u, cur), cost);
    }
  };

  auto rec = [&](auto&& self, int j, double cost) -> void {
    if (j == loop_dims) {
      finish(cost);
      return;
    }
    for (int i = 0; i <= levels; ++i) {
      double xv = i * grid_step;
      double c = cost + xv * pb.prices[j];
      if (c > btol) break;
      cur[j] = xv;
      self(self, j + 1, c);
    }
    cur[j] = 0.0;
  };
  rec(rec, 0, 0.0);

  return DemandResult{best.x, best.cost, best.tie};
}

namespace {

template <class S>
struct Cls {  // classification helpers shared by the KKT checkers
  static bool le(const S& a, const S& b, const S& tol) { return a <= b + tol; }
  static bool eq(const S& a, const S& b, const S& tol) {
    return le(a, b, tol) && le(b, a, tol);
  }
};

}  // namespace

template <class S>
bool kkt_check(const LinearUtility& u, const PriceBudgetT<S>& pb,
               const BundleT<S>& x, const S& tol, Domain dom) {
  const std::size_t d = u.a.size();
  if (x.size() != d || pb.prices.size() != d)
    throw std::invalid_argument("kkt_check(linear): dimension mismatch");
  using C = Cls<S>;

  for (const auto& xi : x) {
    if (!C::le(S{0}, xi, tol)) return false;
    if (dom == Domain::unit_cube && !C::le(xi, S{1}, tol)) return false;
  }
  S spent = dot(pb.prices, x);
  if (!C::le(spent, pb.budget, tol)) return false;

  std::vector<S> r(d);
  std::vector<bool> zero(d), full(d);
  for (std::size_t j = 0; j < d; ++j) {
    r[j] = to_scalar<S>(u.a[j]) / pb.prices[j];
    zero[j] = C::le(x[j], S{0}, tol);
    full[j] = dom == Domain::unit_cube && C::le(S{1}, x[j], tol);
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      if (j == k) continue;
      if (!zero[j] && zero[k] && !C::le(r[k], r[j], tol)) return false;
      if (full[j] && !full[k] && !C::le(r[k], r[j], tol)) return false;
      if (!zero[j] && !full[j] && !zero[k] && !full[k] && !C::eq(r[j], r[k], tol))
        return false;
    }
  }
  // complementary slackness: leftover budget means no good has marginal value
  if (!C::le(pb.budget, spent, tol)) {
    for (std::size_t j = 0; j < d; ++j)
      if (!full[j] && !C::le(to_scalar<S>(u.a[j]), S{0}, tol)) return false;
  }
  return true;
}

template <class S>
bool kkt_check(const SPLCUtility& u, const PriceBudgetT<S>& pb,
               const BundleT<S>& x, const S& tol, Domain dom) {
  const std::size_t d = u.goods.size();
  if (x.size() != d || pb.prices.size() != d)
    throw std::invalid_argument("kkt_check(splc): dimension mismatch");
  using C = Cls<S>;

  for (const auto& xi : x)
    if (!C::le(S{0}, xi, tol)) return false;
  S spent = dot(pb.prices, x);
  if (!C::le(spent, pb.budget, tol)) return false;

  // Effective segments: the unit-cube cap truncates per-good length to 1.
  struct Seg {
    std::size_t good;
    S slope;
    std::optional<S> length;  // nullopt = unbounded
    S amount{0};
    bool full = false;
    bool zero = true;
  };
  std::vector<Seg> segs;
  for (std::size_t j = 0; j < d; ++j) {
    S acc{0};
    for (const auto& seg : u.goods[j]) {
      Seg e;
      e.good = j;
      e.slope = to_scalar<S>(seg.slope);
      if (dom == Domain::unit_cube) {
        S room = S{1} - acc;
        if (!(room > S{0})) break;
        S len = seg.length ? std::min(to_scalar<S>(*seg.length), room) : room;
        e.length = len;
        acc += len;
      } else if (seg.length) {
        e.length = to_scalar<S>(*seg.length);
      }
      segs.push_back(std::move(e));
    }
  }

  // split x along the effective boundaries
  for (std::size_t j = 0; j < d; ++j) {
    S rem = x[j];
    for (auto& e : segs) {
      if (e.good != j) continue;
      S amt = rem;
      if (e.length && *e.length < amt) amt = *e.length;
      if (amt < S{0}) amt = S{0};
      e.amount = amt;
      e.zero = C::le(amt, S{0}, tol);
      e.full = e.length.has_value() && C::le(*e.length, amt, tol);
      rem -= amt;
    }
    if (!C::le(rem, S{0}, tol)) return false;  // exceeds the domain capacity
  }

  for (const auto& a : segs) {
    for (const auto& b : segs) {
      if (&a == &b) continue;
      S ra = a.slope / pb.prices[a.good];
      S rb = b.slope / pb.prices[b.good];
      if (!a.zero && b.zero && !C::le(rb, ra, tol)) return false;
      if (a.full && !b.full && !C::le(rb, ra, tol)) return false;
      if (!a.zero && !a.full && !b.zero && !b.full && !C::eq(ra, rb, tol))
        return false;
    }
  }
  if (!C::le(pb.budget, spent, tol)) {
    for (const auto& e : segs)
      if (!e.full && !C::le(e.slope, S{0}, tol)) return false;
  }
  return true;
}

template <class S>
bool kkt_check(const LeontiefUtility& u, const PriceBudgetT<S>& pb,
               const BundleT<S>& x, const S& tol, Domain dom) {
  const std::size_t d = u.a.size();
  if (x.size() != d || pb.prices.size() != d)
    throw std::invalid_argument("kkt_check(leontief): dimension mismatch");
  using C = Cls<S>;

  S ap{0};
  S amax{0};
  for (std::size_t j = 0; j < d; ++j) {
    S aj = to_scalar<S>(u.a[j]);
    ap += aj * pb.prices[j];
    if (aj > amax) amax = aj;
  }
  if (!(ap > S{0})) {
    for (const auto& xi : x)
      if (!C::eq(xi, S{0}, tol)) return false;
    return true;
  }
  S beta = pb.budget / ap;
  if (dom == Domain::unit_cube) {
    S cap = S{1} / amax;
    if (cap < beta) beta = cap;
  }
  for (std::size_t j = 0; j < d; ++j)
    if (!C::eq(x[j], beta * to_scalar<S>(u.a[j]), tol)) return false;
  return true;
}

template bool kkt_check<double>(const LinearUtility&, const PriceBudget&,
                                const Bundle&, const double&, Domain);
template bool kkt_check<Rational>(const LinearUtility&, const PriceBudgetQ&,
                                  const BundleQ&, const Rational&, Domain);
template bool kkt_check<double>(const SPLCUtility&, const PriceBudget&,
                                const Bundle&, const double&, Domain);
template bool kkt_check<Rational>(const SPLCUtility&, const PriceBudgetQ&,
                                  const BundleQ&, const Rational&, Domain);
template bool kkt_check<double>(const LeontiefUtility&, const PriceBudget&,
                                const Bundle&, const double&, Domain);
template bool kkt_check<Rational>(const LeontiefUtility&, const PriceBudgetQ&,
                                  const BundleQ&, const Rational&, Domain);

bool kkt_check(const CESUtility& u, const PriceBudget& pb, const Bundle& x,
               double tol) {
  const std::size_t d = u.a.size();
  if (x.size() != d || pb.prices.size() != d)
    throw std::invalid_argument("kkt_check(ces): dimension mismatch");

  double spent = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    if (x[j] < -tol || x[j] > 1 + tol) return false;
    spent += x[j] * pb.prices[j];
  }
  if (spent > pb.budget + tol) return false;

  std::vector<int> active;
  for (std::size_t j = 0; j < d; ++j) {
    if (u.a[j].sign() <= 0) {
      if (x[j] > tol) return false;  // cheapest optimum skips worthless goods
    } else {
      if (pb.budget > tol && x[j] <= tol) return false;  // infinite marginal at 0
      active.push_back(static_cast<int>(j));
    }
  }

  // marginal utility per unit money of the transformed objective
  auto marg = [&](int j) {
    return u.a[j].to_double() * std::pow(x[j], u.rho - 1.0) / pb.prices[j];
  };
  for (int j : active) {
    for (int k : active) {
      if (j == k) continue;
      bool fj = x[j] >= 1 - tol, fk = x[k] >= 1 - tol;
      double mj = marg(j), mk = marg(k);
      double rel = tol * std::max({std::abs(mj), std::abs(mk), 1.0});
      if (fj && !fk && mj < mk - rel) return false;
      if (!fj && !fk && std::abs(mj - mk) > rel) return false;
    }
  }
  if (spent < pb.budget - tol) {
    for (int j : active)
      if (x[j] < 1 - tol) return false;
  }
  return true;
}

bool kkt_check(const Utility& u, const PriceBudget& pb, const Bundle& x,
               double tol, Domain dom) {
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CESUtility>) return kkt_check(v, pb, x, tol);
        else return kkt_check<double>(v, pb, x, tol, dom);
      },
      u);
}

bool kkt_check_exact(const Utility& u, const PriceBudgetQ& pb, const BundleQ& x,
                     Domain dom) {
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CESUtility>)
          throw std::invalid_argument("kkt_check_exact: CES is float-only");
        else
          return kkt_check<Rational>(v, pb, x, Rational(0), dom);
      },
      u);
}

}  // namespace revpref
