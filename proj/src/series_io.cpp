#include "mgale/series_io.hpp"

#include <cmath>
#include <stdexcept>

#include "mgale/davenport.hpp"

namespace mgale {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) fail(std::string(what) + " must be a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const char* what) {
  if (!j.is_number_integer()) fail(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

std::size_t count(const json& j, const char* what) {
  const auto v = integer(j, what);
  if (v < 0) fail(std::string(what) + " must be >= 0");
  return static_cast<std::size_t>(v);
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON field: ") + e.what());
  }
}

std::vector<cplx> coeffs_from_json(const json& j) {
  if (j.is_array()) {
    std::vector<cplx> out;
    for (const auto& v : j) out.push_back(complex_from_json(v));
    return out;
  }
  const std::string formula = need(j, "formula").get<std::string>();
  const std::size_t K = count(need(j, "count"), "count");
  std::vector<cplx> out;
  if (formula == "power") {
    const double s = number(need(j, "exponent"), "exponent");
    for (std::size_t k = 0; k < K; ++k) out.emplace_back(std::pow(static_cast<double>(k + 1), -s));
  } else if (formula == "geometric") {
    const double r = number(need(j, "ratio"), "ratio");
    for (std::size_t k = 0; k < K; ++k) out.emplace_back(std::pow(r, static_cast<double>(k)));
  } else if (formula == "gaposhkin") {
    out = gaposhkin_example(static_cast<int>(integer(need(j, "m"), "m")), K).coeffs;
  } else {
    fail("unknown coefficient formula \"" + formula + "\"");
  }
  return out;
}

}  // namespace

cplx complex_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail("complex value must be a number or [re, im]");
}

ojson complex_to_json(cplx z) {
  if (z.imag() == 0.0) return z.real();
  return ojson::array({z.real(), z.imag()});
}

Generator generator_from_json(const json& j) {
  return guarded([&]() -> Generator {
    const std::string type = need(j, "type").get<std::string>();
    if (type == "sine") {
      const double amp = j.contains("amplitude") ? number(j.at("amplitude"), "amplitude") : 1.0;
      return FourierFunction::sine(integer(need(j, "m"), "m"), amp);
    }
    if (type == "fourier") {
      FourierFunction f;
      for (const auto& t : need(j, "terms")) {
        if (!t.is_array() || t.size() != 2) fail("fourier terms are [m, c]");
        f.add(integer(t[0], "frequency"), complex_from_json(t[1]));
      }
      return f;
    }
    if (type == "lacunary") {
      LacunarySeries s;
      s.base = count(need(j, "base"), "base");
      s.first_exponent = static_cast<int>(j.contains("first_exponent") ? integer(j.at("first_exponent"), "first_exponent") : 0);
      for (const auto& a : need(j, "amplitudes")) s.amplitudes.push_back(number(a, "amplitude"));
      if (s.base < 2) fail("lacunary base must be >= 2");
      return s;
    }
    if (type == "davenport") {
      DavenportSpec d;
      d.lambda = number(need(j, "lambda"), "lambda");
      d.M = integer(need(j, "M"), "M");
      d.validate();
      return davenport_function(d);
    }
    if (type == "gaposhkin") {
      const auto terms = count(need(j, "terms"), "terms");
      return gaposhkin_example(static_cast<int>(integer(need(j, "m"), "m")), std::max<std::size_t>(terms, 2), terms)
          .generators.front();
    }
    fail("unknown generator type \"" + type + "\"");
  });
}

ojson generator_to_json(const Generator& g) {
  ojson out;
  if (const auto* f = std::get_if<FourierFunction>(&g)) {
    out["type"] = "fourier";
    out["terms"] = ojson::array();
    for (const auto& [m, c] : f->coefficients()) out["terms"].push_back(ojson::array({m, complex_to_json(c)}));
  } else {
    const auto& s = std::get<LacunarySeries>(g);
    out["type"] = "lacunary";
    out["base"] = s.base;
    out["first_exponent"] = s.first_exponent;
    out["amplitudes"] = s.amplitudes;
  }
  return out;
}

SeriesSpec series_from_json(const json& j) {
  return guarded([&] {
    if (!j.is_object()) fail("series spec must be a JSON object");
    if (j.contains("gaposhkin")) {
      const auto& g = j.at("gaposhkin");
      const auto terms = g.contains("terms") ? count(g.at("terms"), "terms") : 0;
      return gaposhkin_example(static_cast<int>(integer(need(g, "m"), "m")), count(need(g, "K"), "K"), terms);
    }
    SeriesSpec s;
    s.coeffs = coeffs_from_json(need(j, "coeffs"));
    const auto& f = need(j, "freqs");
    if (f.is_string()) {
      s.freqs = FrequencySequence::parse(f.get<std::string>());
    } else if (f.is_array()) {
      std::vector<std::int64_t> v;
      for (const auto& n : f) v.push_back(integer(n, "frequency"));
      s.freqs = FrequencySequence::list(v);
    } else {
      fail("freqs must be a list or a rule string");
    }
    if (j.contains("generator")) s.generators.push_back(generator_from_json(j.at("generator")));
    if (j.contains("generators"))
      for (const auto& g : j.at("generators")) s.generators.push_back(generator_from_json(g));
    s.validate();
    return s;
  });
}

ojson series_to_json(const SeriesSpec& s) {
  ojson out;
  out["coeffs"] = ojson::array();
  for (const auto& c : s.coeffs) out["coeffs"].push_back(complex_to_json(c));
  out["freqs"] = s.freqs.describe();
  if (s.generators.size() == 1) {
    out["generator"] = generator_to_json(s.generators.front());
  } else {
    out["generators"] = ojson::array();
    for (const auto& g : s.generators) out["generators"].push_back(generator_to_json(g));
  }
  return out;
}

RieszProductSpec riesz_from_json(const json& j) {
  return guarded([&] {
    RieszProductSpec s;
    const auto& l = need(j, "lambdas");
    if (l.is_string()) {
      s.lambdas = FrequencySequence::parse(l.get<std::string>()).as_int64();
    } else {
      for (const auto& v : l) s.lambdas.push_back(integer(v, "lambda"));
    }
    if (j.contains("cs")) {
      for (const auto& c : j.at("cs")) s.cs.push_back(complex_from_json(c));
    } else {
      s.cs.assign(s.lambdas.size(), complex_from_json(need(j, "c")));
    }
    s.strict = j.contains("strict") && j.at("strict").get<bool>();
    s.validate();
    return s;
  });
}

ojson riesz_to_json(const RieszProductSpec& s) {
  ojson out;
  out["lambdas"] = s.lambdas;
  out["cs"] = ojson::array();
  for (const auto& c : s.cs) out["cs"].push_back(complex_to_json(c));
  out["strict"] = s.strict;
  return out;
}

SymbolicSpace symbolic_from_json(const json& j) {
  return guarded([&] {
    SymbolicSpace s;
    s.alphabet = need(j, "alphabet").get<std::vector<int>>();
    if (j.contains("incidence")) s.incidence = j.at("incidence").get<std::vector<std::vector<std::vector<int>>>>();
    if (j.contains("transitivity")) s.transitivity = static_cast<int>(integer(j.at("transitivity"), "transitivity"));
    s.validate();
    return s;
  });
}

ojson symbolic_to_json(const SymbolicSpace& s) {
  ojson out;
  out["alphabet"] = s.alphabet;
  if (!s.incidence.empty()) out["incidence"] = s.incidence;
  out["transitivity"] = s.transitivity;
  return out;
}

}  // namespace mgale
