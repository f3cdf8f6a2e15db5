#pragma once

// JSON (de)serialization. Rationals travel as "p/q" strings in every format.

#include <json.hpp>

#include "revpref/feature_map.hpp"
#include "revpref/svm.hpp"
#include "revpref/utility.hpp"

namespace revpref {

nlohmann::json to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);

// {"class": "...", "a": ["p/q", ...], "rho": float?, "A": [[...]], "L":
// [[..., "inf"]], "n_bits": int}
nlohmann::json to_json(const Utility& u);
Utility utility_from_json(const nlohmann::json& j);

// {"kind": "...", "w": [...], "params": {...}}
nlohmann::json to_json(const Hypothesis& h);
Hypothesis hypothesis_from_json(const nlohmann::json& j);

}  // namespace revpref
