#include "revpref/serialize.hpp"

#include <limits>
#include <stdexcept>

namespace revpref {

using nlohmann::json;

json to_json(const Rational& r) { return r.str(); }

Rational rational_from_json(const json& j) {
  if (j.is_string()) return Rational::from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw std::invalid_argument("rational_from_json: expected \"p/q\"");
}

namespace {

json rationals_to_json(const std::vector<Rational>& v) {
  json arr = json::array();
  for (const auto& r : v) arr.push_back(to_json(r));
  return arr;
}

std::vector<Rational> rationals_from_json(const json& arr) {
  std::vector<Rational> v;
  for (const auto& e : arr) v.push_back(rational_from_json(e));
  return v;
}

}  // namespace

json to_json(const Utility& u) {
  json j;
  j["class"] = class_name(class_of(u));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        j["n_bits"] = v.n_bits;
        if constexpr (std::is_same_v<T, LinearUtility> ||
                      std::is_same_v<T, LeontiefUtility>) {
          j["a"] = rationals_to_json(v.a);
        } else if constexpr (std::is_same_v<T, CESUtility>) {
          j["a"] = rationals_to_json(v.a);
          j["rho"] = v.rho;
        } else {
          json A = json::array(), L = json::array();
          for (const auto& segs : v.goods) {
            json arow = json::array(), lrow = json::array();
            for (const auto& seg : segs) {
              arow.push_back(to_json(seg.slope));
              lrow.push_back(seg.length ? to_json(*seg.length) : json("inf"));
            }
            A.push_back(arow);
            L.push_back(lrow);
          }
          j["A"] = A;
          j["L"] = L;
        }
      },
      u);
  return j;
}

Utility utility_from_json(const json& j) {
  UtilityClass c = class_from_name(j.at("class").get<std::string>());
  int n_bits = j.value("n_bits", 0);
  switch (c) {
    case UtilityClass::linear: {
      LinearUtility u{rationals_from_json(j.at("a")), n_bits};
      validate(u);
      return u;
    }
    case UtilityClass::leontief: {
      LeontiefUtility u{rationals_from_json(j.at("a")), n_bits};
      validate(u);
      return u;
    }
    case UtilityClass::ces: {
      CESUtility u;
      u.a = rationals_from_json(j.at("a"));
      u.rho = j.at("rho").get<double>();
      u.n_bits = n_bits;
      validate(u);
      return u;
    }
    case UtilityClass::splc: {
      SPLCUtility u;
      u.n_bits = n_bits;
      const json& A = j.at("A");
      const json& L = j.at("L");
      if (A.size() != L.size())
        throw std::invalid_argument("utility_from_json: A/L shape mismatch");
      for (std::size_t g = 0; g < A.size(); ++g) {
        std::vector<SPLCUtility::Segment> segs;
        if (A[g].size() != L[g].size())
          throw std::invalid_argument("utility_from_json: A/L row mismatch");
        for (std::size_t k = 0; k < A[g].size(); ++k) {
          SPLCUtility::Segment seg;
          seg.slope = rational_from_json(A[g][k]);
          if (!(L[g][k].is_string() && L[g][k].get<std::string>() == "inf"))
            seg.length = rational_from_json(L[g][k]);
          segs.push_back(std::move(seg));
        }
        u.goods.push_back(std::move(segs));
      }
      validate(u);
      return u;
    }
  }
  throw std::logic_error("utility_from_json: bad class");
}

json to_json(const Hypothesis& h) {
  json j;
  j["w"] = h.w;
  json params = json::object();
  switch (h.map.kind) {
    case FeatureMapSpec::Kind::linear:
      j["kind"] = "linear";
      break;
    case FeatureMapSpec::Kind::splc_known_lengths: {
      j["kind"] = "splc_known_lengths";
      json L = json::array();
      for (const auto& row : h.map.lengths) {
        json r = json::array();
        for (double len : row)
          r.push_back(std::isinf(len) ? json("inf") : json(len));
        L.push_back(r);
      }
      params["L"] = L;
      break;
    }
    case FeatureMapSpec::Kind::ces_rho:
      j["kind"] = "ces_rho";
      params["rho"] = h.map.rho;
      break;
    case FeatureMapSpec::Kind::ordering:
      j["kind"] = "ordering";
      break;
  }
  params["d"] = h.map.d;
  j["params"] = params;
  return j;
}

Hypothesis hypothesis_from_json(const json& j) {
  Hypothesis h;
  h.w = j.at("w").get<std::vector<double>>();
  std::string kind = j.at("kind").get<std::string>();
  const json& params = j.at("params");
  int d = params.at("d").get<int>();
  if (kind == "linear") {
    h.map = FeatureMapSpec::linear(d);
  } else if (kind == "ordering") {
    h.map = FeatureMapSpec::ordering(d);
  } else if (kind == "ces_rho") {
    h.map = FeatureMapSpec::ces(d, params.at("rho").get<double>());
  } else if (kind == "splc_known_lengths") {
    std::vector<std::vector<double>> L;
    for (const auto& row : params.at("L")) {
      std::vector<double> r;
      for (const auto& e : row)
        r.push_back(e.is_string() ? std::numeric_limits<double>::infinity()
                                  : e.get<double>());
      L.push_back(std::move(r));
    }
    h.map = FeatureMapSpec::splc(std::move(L));
  } else {
    throw std::invalid_argument("hypothesis_from_json: unknown kind '" + kind + "'");
  }
  return h;
}

}  // namespace revpref
