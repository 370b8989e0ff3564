#pragma once

#include <json.hpp>

#include "mgale/dilated_series.hpp"
#include "mgale/riesz_product.hpp"
#include "mgale/symbolic.hpp"

namespace mgale {

// Complex numbers are a number or [re, im].
cplx complex_from_json(const nlohmann::json& j);
nlohmann::ordered_json complex_to_json(cplx z);

// Generators:
//   {"type": "sine", "m": 1, "amplitude": 1}
//   {"type": "fourier", "terms": [[m, c], ...]}
//   {"type": "lacunary", "base": 2, "first_exponent": 0, "amplitudes": [...]}
//   {"type": "davenport", "lambda": 0.75, "M": 4096}
//   {"type": "gaposhkin", "m": 1, "terms": 16}
Generator generator_from_json(const nlohmann::json& j);
nlohmann::ordered_json generator_to_json(const Generator& g);

// {"coeffs": [...] | {"formula": "power", "exponent": s, "count": K}    a_k = (k+1)^-s
//                  | {"formula": "geometric", "ratio": r, "count": K}   a_k = r^k
//                  | {"formula": "gaposhkin", "m": 1, "count": K},
//  "freqs": [n_0, ...] | "pow:q:K" | "pow:q:e0:count",
//  "generator": {...} | "generators": [{...}, ...]}
// or {"gaposhkin": {"m": 1, "K": 4096, "terms": 0}} for the sharpness example.
// Errors throw std::invalid_argument.
SeriesSpec series_from_json(const nlohmann::json& j);
nlohmann::ordered_json series_to_json(const SeriesSpec& s);

// {"lambdas": [...] | "pow:q:K", "cs": [...] | "c": c, "strict": false}
RieszProductSpec riesz_from_json(const nlohmann::json& j);
nlohmann::ordered_json riesz_to_json(const RieszProductSpec& s);

// {"alphabet": [...], "incidence": [[[0/1, ...], ...], ...], "transitivity": M}
SymbolicSpace symbolic_from_json(const nlohmann::json& j);
nlohmann::ordered_json symbolic_to_json(const SymbolicSpace& s);

}  // namespace mgale
