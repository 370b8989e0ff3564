#include "mgale/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "mgale/davenport.hpp"
#include "mgale/dilated_series.hpp"
#include "mgale/dyadic_martingale.hpp"
#include "mgale/ergodic_transfer.hpp"
#include "mgale/modulus.hpp"
#include "mgale/numfmt.hpp"
#include "mgale/riesz_product.hpp"
#include "mgale/series_io.hpp"
#include "mgale/symbolic.hpp"

namespace mgale {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Typed access to the parameter map; every failure is a configuration error.
class Params {
 public:
  explicit Params(const json& j) : j_(j) {}

  bool has(const char* key) const { return j_.contains(key); }
  const json& raw(const char* key) const {
    if (!has(key)) throw ConfigError(std::string("missing parameter \"") + key + "\"");
    return j_.at(key);
  }
  double num(const char* key, double fallback) const { return has(key) ? num(key) : fallback; }
  double num(const char* key) const {
    const auto& v = raw(key);
    if (v.is_string() && v.get<std::string>() == "inf") return kInf;
    if (!v.is_number()) throw ConfigError(std::string("parameter \"") + key + "\" must be a number");
    return v.get<double>();
  }
  long long integer(const char* key, long long fallback, long long lo, long long hi) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(std::string("parameter \"") + key + "\" must be an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi)
      throw ConfigError(std::string("parameter \"") + key + "\" out of range [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    return x;
  }
  std::vector<double> nums(const char* key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_array() || v.empty()) throw ConfigError(std::string("parameter \"") + key + "\" must be a nonempty list");
    std::vector<double> out;
    for (const auto& x : v) {
      if (x.is_string() && x.get<std::string>() == "inf") out.push_back(kInf);
      else if (x.is_number()) out.push_back(x.get<double>());
      else throw ConfigError(std::string("parameter \"") + key + "\" must hold numbers");
    }
    return out;
  }
  std::vector<std::size_t> sizes(const char* key, std::vector<std::size_t> fallback) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_array() || v.empty()) throw ConfigError(std::string("parameter \"") + key + "\" must be a nonempty list");
    std::vector<std::size_t> out;
    for (const auto& x : v) {
      if (!x.is_number_integer() || x.get<long long>() < 0)
        throw ConfigError(std::string("parameter \"") + key + "\" must hold nonnegative integers");
      out.push_back(x.get<std::size_t>());
    }
    return out;
  }

 private:
  const json& j_;
};

struct SuiteOutput {
  std::vector<AuditReport> reports;
  std::string csv;  // suite table; empty means the reports as rows
  ojson summary = ojson::object();
  bool failed = false;  // a diagnostic claim that did not hold
};

using SuiteFn = std::function<void(const Params&, std::uint64_t, SuiteOutput&)>;

// ---- shared generators -------------------------------------------------

GridFunction random_centered(std::mt19937_64& rng, int J) {
  std::normal_distribution<double> nd;
  std::vector<double> v(std::size_t{1} << J);
  const int law = static_cast<int>(rng() % 3);
  for (auto& x : v) {
    const double g = nd(rng);
    x = law == 0 ? g : law == 1 ? g * g * g : (rng() % 16 == 0 ? g : 0.0);
  }
  const double m = GridFunction::from_real(J, v).mean().real();
  for (auto& x : v) x -= m;
  return GridFunction::from_real(J, v);
}

FourierFunction random_trig_poly(std::mt19937_64& rng, int deg) {
  std::normal_distribution<double> nd;
  FourierFunction f;
  const int terms = 1 + static_cast<int>(rng() % 6);
  for (int t = 0; t < terms; ++t) {
    const std::int64_t m = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(deg));
    const cplx c(nd(rng), nd(rng));
    f.add(m, c);
    f.add(-m, std::conj(c));
  }
  return f;
}

std::optional<TailModel> tail_from(const Params& P, const char* key) {
  if (!P.has(key)) return std::nullopt;
  const auto& j = P.raw(key);
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(std::string(key) + " needs a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  auto val = [&](const char* k, double d) { return j.contains(k) ? j.at(k).get<double>() : d; };
  if (kind == "vanishing") return TailModel::vanishing();
  if (kind == "geometric") return TailModel::geometric(val("r", 0.5));
  if (kind == "power_log") return TailModel::power_log(val("a", 1.0), val("b", 0.0), val("c", 0.0));
  throw ConfigError("unknown tail model \"" + kind + "\"");
}

template <class F>
auto as_config(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

SeriesSpec series_param(const Params& P) {
  return as_config([&] { return series_from_json(P.raw("series")); });
}
Generator generator_param(const Params& P) {
  return as_config([&] { return generator_from_json(P.raw("generator")); });
}
FourierFunction fourier_generator_param(const Params& P) {
  auto g = generator_param(P);
  if (const auto* f = std::get_if<FourierFunction>(&g)) return *f;
  return std::get<LacunarySeries>(g).truncated(std::int64_t{1} << 40);
}
std::vector<cplx> coeffs_param(const Params& P) {
  return as_config([&] {
    json s{{"coeffs", P.raw("coeffs")}, {"freqs", "1"}, {"generator", {{"type", "sine"}, {"m", 1}}}};
    std::vector<cplx> out;
    const auto& c = P.raw("coeffs");
    if (c.is_array()) {
      for (const auto& v : c) out.push_back(complex_from_json(v));
    } else {
      // formula descriptors go through the series reader
      json t = s;
      t["freqs"] = "pow:2:0:" + std::to_string(c.value("count", 0));
      out = series_from_json(t).coeffs;
    }
    if (out.empty()) throw ConfigError("coeffs must not be empty");
    return out;
  });
}
RieszProductSpec riesz_param(const Params& P) {
  return as_config([&] { return riesz_from_json(P.raw("riesz")); });
}

ojson num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

ojson criterion_json(const SeriesCriterion& c) {
  return ojson{{"partial_sum", num(c.partial_sum)}, {"tail", num(c.tail)}, {"value", num(c.value())},
               {"finite", c.finite()}, {"model", c.model.describe()}};
}

ojson diagnostic_json(const OscillationDiagnostic& d) {
  return ojson{{"verdict", to_string(d.verdict)}, {"trend_slope", num(d.trend_slope)},
               {"sample_size", d.sample_size}, {"method", d.method}};
}

std::vector<std::size_t> pow2_range(int a, int b) {
  std::vector<std::size_t> v;
  for (int e = a; e <= b; ++e) v.push_back(std::size_t{1} << e);
  return v;
}

// ---- audit suites ------------------------------------------------------

void suite_telescope(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto cases = P.integer("cases", 100, 1, 1000000);
  const int J = static_cast<int>(P.integer("J", 10, 1, 20));
  std::mt19937_64 rng(seed);
  for (long long c = 0; c < cases; ++c) {
    auto f = random_centered(rng, J);
    if (c % 2) f = f + GridFunction::constant(J, 0.5);
    out.reports.push_back(telescope_check(f, 0, J - 1));
  }
}

void suite_rio(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto cases = P.integer("cases", 100, 1, 1000000);
  const int J = static_cast<int>(P.integer("J", 10, 1, 20));
  const auto ps = P.nums("p", {1.5, 2.0, 3.0, 4.0, 8.0});
  std::mt19937_64 rng(seed);
  for (long long c = 0; c < cases; ++c)
    out.reports.push_back(rio_audit(random_centered(rng, J), ps[static_cast<std::size_t>(c) % ps.size()]));
}

void suite_doob(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto cases = P.integer("cases", 100, 1, 1000000);
  const int J = static_cast<int>(P.integer("J", 10, 1, 20));
  const auto ps = P.nums("p", {1.5, 2.0, 3.0, 4.0, 8.0});
  std::vector<int> levels(static_cast<std::size_t>(J));
  for (int n = 0; n < J; ++n) levels[n] = n;
  std::mt19937_64 rng(seed);
  for (long long c = 0; c < cases; ++c) {
    const auto d = decompose(random_centered(rng, J));
    out.reports.push_back(doob_maximal_audit(d.details, levels, ps[static_cast<std::size_t>(c) % ps.size()]));
  }
}

void suite_general_maximal(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto cases = P.integer("cases", 100, 1, 1000000);
  const int J = static_cast<int>(P.integer("J", 8, 1, 16));
  const auto ps = P.nums("p", {1.5, 2.0, 3.0, 8.0});
  const auto terms = P.integer("terms", 6, 1, 64);
  std::mt19937_64 rng(seed);
  for (long long c = 0; c < cases; ++c) {
    std::vector<GridFunction> Z;
    const auto N = 1 + static_cast<long long>(rng() % static_cast<std::uint64_t>(terms));
    for (long long n = 0; n < N; ++n) Z.push_back(random_centered(rng, J));
    out.reports.push_back(theo_gen_criteria(Z, {}, ps[static_cast<std::size_t>(c) % ps.size()]).maximal);
  }
}

void suite_bounded_moments(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto cases = P.integer("cases", 50, 1, 100000);
  const int J = static_cast<int>(P.integer("J", 8, 1, 16));
  const auto ps = P.nums("p", {2.0, 4.0, 8.0});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (long long c = 0; c < cases; ++c) {
    std::vector<GridFunction> Z;
    const int N = 1 + static_cast<int>(rng() % 8);
    for (int n = 0; n < N; ++n) {
      std::vector<double> v(std::size_t{1} << J);
      for (auto& x : v) x = u(rng);
      const double m = GridFunction::from_real(J, v).mean().real();
      for (auto& x : v) x -= m;
      Z.push_back(GridFunction::from_real(J, v));
    }
    const auto d = bounded_deltas(Z);
    for (auto& r : theo_bounded_moments(Z, d.delta1, d.delta2, ps)) out.reports.push_back(r);
  }
}

void suite_burkholder(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto cases = P.integer("cases", 100, 1, 1000000);
  const int J = static_cast<int>(P.integer("J", 10, 1, 20));
  const auto ps = P.nums("p", {1.5, 2.0, 3.0, 4.0});
  std::mt19937_64 rng(seed);
  for (long long c = 0; c < cases; ++c) {
    const double p = ps[static_cast<std::size_t>(c) % ps.size()];
    const double pstar = std::max(p, p / (p - 1.0)) - 1.0;
    const double ratio = burkholder_ratio(random_centered(rng, J), p);
    out.reports.push_back(inequality_report(ratio, pstar, pstar, "square function p=" + format_double(p)));
  }
}

void suite_paley_zygmund(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto cases = P.integer("cases", 200, 1, 1000000);
  const auto qs = P.nums("q", {1.5, 2.0, 3.0});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::exponential_distribution<double> ex;
  for (long long c = 0; c < cases; ++c) {
    const int atoms = 1 + static_cast<int>(rng() % 8);
    std::vector<WeightedValue> Z(static_cast<std::size_t>(atoms));
    double total = 0.0;
    for (auto& z : Z) {
      z.value = rng() % 4 == 0 ? 0.0 : ex(rng);
      z.probability = 0.05 + u(rng);
      total += z.probability;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < Z.size(); ++i) acc += Z[i].probability /= total;
    Z.back().probability = 1.0 - acc;
    if (std::all_of(Z.begin(), Z.end(), [](const WeightedValue& z) { return z.value == 0.0; })) Z.back().value = 1.0;
    const double lambda = 0.05 + 0.9 * u(rng);
    out.reports.push_back(paley_zygmund_audit(Z, lambda, qs[static_cast<std::size_t>(c) % qs.size()]));
  }
}

void suite_dyadic_approx(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto cases = P.integer("cases", 50, 1, 100000);
  const int J = static_cast<int>(P.integer("J", 12, 2, 16));
  const auto ps = P.nums("p", {1.5, 2.0, 4.0, kInf});
  const auto deg = P.integer("degree", 200, 1, 1 << 14);
  std::mt19937_64 rng(seed);
  for (long long c = 0; c < cases; ++c) {
    const auto f = render(random_trig_poly(rng, static_cast<int>(deg)), J);
    const auto prof = modulus_profile(f, ps[static_cast<std::size_t>(c) % ps.size()]);
    for (int n = 0; n <= J; ++n) out.reports.push_back(dyadic_approx_audit(f, prof, n));
  }
}

void suite_contraction(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto cases = P.integer("cases", 100, 1, 100000);
  const int J = static_cast<int>(P.integer("J", 12, 4, 16));
  const auto ps = P.nums("p", {1.5, 2.0, 4.0});
  std::mt19937_64 rng(seed);
  for (long long c = 0; c < cases; ++c) {
    const auto f = random_trig_poly(rng, 40);
    const int n = static_cast<int>(rng() % 8);
    const auto m = static_cast<std::int64_t>(1 + rng() % 4096);
    const auto a = contraction_audit(f, m, n, ps[static_cast<std::size_t>(c) % ps.size()], J);
    out.reports.push_back(a.basic);
    if (a.refined) out.reports.push_back(*a.refined);
  }
}

// ---- dilated series ----------------------------------------------------

void suite_dilated_criteria(const Params& P, std::uint64_t, SuiteOutput& out) {
  const auto spec = series_param(P);
  const double p = P.num("p", 2.0);
  const int J = static_cast<int>(P.integer("J", 14, 4, 20));
  const auto tail = tail_from(P, "tail");
  const auto c = as_config([&] { return theo_dilated_criteria(spec, p, J, tail); });
  out.reports.push_back(c.term_audit);
  out.summary = ojson{{"p", p},
                      {"series1", num(c.series1)},
                      {"series2", num(c.series2)},
                      {"series1_sup", num(c.series1_sup)},
                      {"series2_sup", num(c.series2_sup)},
                      {"condition", criterion_json(c.condition)},
                      {"finite", c.finite},
                      {"claim", c.claim}};
}

void suite_oscillation(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto spec = series_param(P);
  const auto cps = P.sizes("checkpoints", {});
  const auto samples = static_cast<std::size_t>(P.integer("samples", 200, 100, 1000000));
  if (cps.empty()) throw ConfigError("missing parameter \"checkpoints\"");
  const auto d = as_config([&] { return oscillation_diagnostic(spec, cps, samples, seed); });
  out.csv = d.csv();
  out.summary = diagnostic_json(d);
  if (P.has("expect")) {
    const auto want = P.raw("expect").get<std::string>();
    out.summary["expect"] = want;
    out.failed = want != to_string(d.verdict);
  }
}

void suite_gaposhkin(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const int m = static_cast<int>(P.integer("m", 1, 0, 3));
  const auto K = static_cast<std::size_t>(P.integer("K", 4096, 16, 1 << 20));
  const auto cps = P.sizes("checkpoints", pow2_range(4, 11));
  const auto samples = static_cast<std::size_t>(P.integer("samples", 200, 100, 100000));
  const int lo = static_cast<int>(P.integer("fit_from", 6, 2, 30)), hi = static_cast<int>(P.integer("fit_to", 12, 3, 30));
  if (lo >= hi) throw ConfigError("fit_from must be below fit_to");
  const auto spec = gaposhkin_example(m, K);
  const auto& lac = std::get<LacunarySeries>(spec.generators.front());
  const auto prof = spectral_modulus_profile(lac, hi, seed);
  std::vector<double> model, val;
  for (int n = lo; n <= hi; ++n) {
    double l = 1.0;
    for (int i = 1; i <= m; ++i) l *= iterated_log(i, n);
    model.push_back(1.0 / (std::sqrt(static_cast<double>(n)) * l));
    val.push_back(prof.at(n));
  }
  const auto fit = fit_loglog(model, val);
  const auto d = as_config([&] { return oscillation_diagnostic(spec, cps, samples, seed); });
  out.csv = d.csv();
  out.summary = diagnostic_json(d);
  out.summary["modulus_fit_slope"] = num(fit.slope);
  out.summary["modulus_fit_residual"] = num(fit.max_residual);
  out.reports.push_back(inequality_report(fit.max_residual, 0.1, 1.0, "modulus model log-log residual"));
}

// ---- Davenport ---------------------------------------------------------

void suite_davenport_gram(const Params& P, std::uint64_t, SuiteOutput& out) {
  const double lambda = P.num("lambda", 0.75);
  std::vector<std::int64_t> freqs;
  const auto& f = P.raw("freqs");
  as_config([&] {
    freqs = f.is_string() ? FrequencySequence::parse(f.get<std::string>()).as_int64() : f.get<std::vector<std::int64_t>>();
    return 0;
  });
  const auto G = as_config([&] { return gram_matrix(freqs, lambda); });
  out.csv = G.csv();
  out.summary = ojson{{"lambda", lambda}, {"size", freqs.size()}, {"min_eigenvalue", num(G.eigen_bounds.first)},
                      {"max_eigenvalue", num(G.eigen_bounds.second)}};
  try {
    const auto [A, B] = riesz_constants(G);
    out.summary["riesz_lower"] = num(A);
    out.summary["riesz_upper"] = num(B);
  } catch (const std::runtime_error& e) {
    out.summary["riesz_lower"] = e.what();
    out.failed = true;
  }
}

void suite_davenport_smoothness(const Params& P, std::uint64_t, SuiteOutput& out) {
  DavenportSpec spec;
  spec.lambda = P.num("lambda", 0.75);
  spec.M = P.integer("M", 1 << 14, 2, std::int64_t{1} << 22);
  const double p = P.num("p", 2.0);
  const int J = static_cast<int>(P.integer("J", 16, 8, 22));
  const double est = as_config([&] { return smoothness_estimate(spec, p, J); });
  const double expect = spec.lambda - (p - 1.0) / p;
  out.summary = ojson{{"lambda", spec.lambda}, {"M", spec.M}, {"p", p}, {"exponent", num(est)},
                      {"expected", num(expect)}};
  out.reports.push_back(equality_report(est, expect, "smoothness exponent lambda - (p-1)/p", 0.0, P.num("tolerance", 0.05)));
}

// ---- ergodic -----------------------------------------------------------

void suite_transfer(const Params& P, std::uint64_t, SuiteOutput& out) {
  const auto g = generator_param(P);
  const int N = static_cast<int>(P.integer("N", 32, 1, 4096));
  const auto d = as_config([&] { return transfer_decay(g, N, tail_from(P, "tail"), tail_from(P, "condensed_tail")); });
  out.csv = d.csv();
  out.summary = ojson{{"criterion", criterion_json(d.criterion)}};
  if (d.condensed) out.summary["condensed"] = criterion_json(*d.condensed);
  for (int n = 1; n <= N; ++n)
    out.reports.push_back(inequality_report(d.norms[n], d.norms[n - 1], 1.0, "||L^n f|| <= ||L^{n-1} f|| n=" + std::to_string(n)));
}

void suite_ergodic_series(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto g = generator_param(P);
  const auto a = coeffs_param(P);
  const auto cps = P.sizes("checkpoints", {});
  if (cps.empty()) throw ConfigError("missing parameter \"checkpoints\"");
  const auto samples = static_cast<std::size_t>(P.integer("samples", 200, 100, 1000000));
  const auto run = as_config([&] { return ergodic_series_run(g, a, cps, samples, seed, tail_from(P, "tail")); });
  out.csv = run.diagnostic.csv();
  out.summary = diagnostic_json(run.diagnostic);
  if (run.decay) out.summary["transfer_criterion"] = criterion_json(run.decay->criterion);
}

void suite_decreasing(const Params& P, std::uint64_t, SuiteOutput& out) {
  const auto f = fourier_generator_param(P);
  const auto a = coeffs_param(P);
  const double p = P.num("p", 2.0);
  std::vector<FourierFunction> Z;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (n >= 40) throw ConfigError("decreasing suite supports at most 40 terms");
    Z.push_back(a[n] * dilate(f, std::int64_t{1} << n));
  }
  const auto c = as_config([&] { return decreasing_criteria(Z, p, {}, tail_from(P, "tail")); });
  out.summary = ojson{{"p", p}, {"higher", num(c.higher)}, {"lower", criterion_json(c.lower)}};
}

// ---- Riesz products ----------------------------------------------------

void suite_riesz_coeff(const Params& P, std::uint64_t, SuiteOutput& out) {
  const auto spec = riesz_param(P);
  const auto N = static_cast<std::size_t>(P.integer("N", static_cast<long long>(spec.size()) - 1, 0, 1 << 20));
  std::vector<std::int64_t> ks;
  as_config([&] {
    ks = P.raw("k").get<std::vector<std::int64_t>>();
    return 0;
  });
  std::ostringstream os;
  os << "k,re,im\n";
  for (auto k : ks) {
    const auto c = as_config([&] { return riesz_fourier_coeff(spec, N, k); });
    os << k << ',' << format_double(c.real()) << ',' << format_double(c.imag()) << '\n';
  }
  out.csv = os.str();
  out.summary = ojson{{"depth", N}};
}

void suite_riesz_sample(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto spec = riesz_param(P);
  const auto N = static_cast<std::size_t>(P.integer("N", static_cast<long long>(spec.size()) - 1, 0, 1 << 20));
  const int J = static_cast<int>(P.integer("J", 16, 2, 26));
  const auto count = static_cast<std::size_t>(P.integer("count", 1000, 0, 10000000));
  const auto xs = as_config([&] { return sample_mu(spec, N, J, count, seed); });
  std::ostringstream os;
  os << "x\n";
  for (double x : xs) os << format_double(x) << '\n';
  out.csv = os.str();
  out.summary = ojson{{"depth", N}, {"J", J}, {"count", count}};
}

void suite_riesz_series(const Params& P, std::uint64_t seed, SuiteOutput& out) {
  const auto spec = riesz_param(P);
  const auto N = static_cast<std::size_t>(P.integer("N", 6, 0, 1 << 20));
  std::vector<FourierFunction> f{fourier_generator_param(P)};
  const auto a = coeffs_param(P);
  const auto cps = P.sizes("checkpoints", {});
  if (cps.empty()) throw ConfigError("missing parameter \"checkpoints\"");
  const auto samples = static_cast<std::size_t>(P.integer("samples", 200, 100, 1000000));
  const int J = static_cast<int>(P.integer("J", 20, 4, 26));
  const double eps = P.num("epsilon", 0.1);
  const auto run = as_config([&] { return riesz_series_run(spec, N, f, a, cps, samples, seed, J, eps); });
  out.csv = run.diagnostic.csv();
  out.summary = diagnostic_json(run.diagnostic);
  out.summary["depth"] = run.depth;
  out.summary["modulus_hypothesis"] = run.hypothesis.holds;
  out.summary["in_hypothesis"] = run.in_hypothesis;
}

// ---- symbolic ----------------------------------------------------------

void suite_symbolic(const Params& P, std::uint64_t, SuiteOutput& out) {
  const auto spec = riesz_param(P);
  const int D = static_cast<int>(P.integer("depth", 6, 1, 20));
  const double alpha = P.num("alpha", 1.0);
  const double A = P.num("A", 10.0);
  const double B = P.num("B", 2.0 * std::numbers::pi);
  const auto rs = as_config([&] { return riesz_potentials(spec, D); });
  const auto one = CylinderFunction::from(rs.space, 1, [](std::span<const int>) { return 1.0; });
  for (int n = 0; n <= D; ++n) {
    const auto p1 = pn_apply(rs.space, rs.potentials, one, n);
    double worst = 0.0;
    for (std::size_t i = 0; i < p1.size(); ++i) worst = std::max(worst, std::abs(p1[i] - 1.0));
    out.reports.push_back(equality_report(1.0 + worst, 1.0, "P_n 1 = 1 n=" + std::to_string(n), 0.0));
  }
  out.reports.push_back(as_config([&] { return cond_gn_check(rs.space, rs.potentials, alpha, A); }));
  const auto mu = equilibrium(rs.space, rs.potentials);
  std::vector<CylinderFunction> fam;
  const std::int64_t top = spec.lambdas[static_cast<std::size_t>(D)];
  for (int n = 1; n < D; ++n) {
    auto f = CylinderFunction::from(rs.space, n + 1, [&](std::span<const int> w) {
      std::int64_t r = 0;
      for (std::size_t i = 0; i < w.size(); ++i) r += w[i] * (top / spec.lambdas[static_cast<std::size_t>(n) + 1 + i]);
      return std::cos(2 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(top / spec.lambdas[static_cast<std::size_t>(n)]));
    });
    const double m = mu.integrate(f, rs.space);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] -= m;
    fam.push_back(f);
  }
  const auto est = as_config([&] { return est_pn_audit(rs.space, rs.potentials, fam, alpha, B); });
  out.reports.push_back(est.report);
  const auto sw = cylinder_sandwich(rs.space, rs.potentials, mu);
  out.summary = ojson{{"depth", D},
                      {"alpha", alpha},
                      {"equilibrium_iterations", mu.iterations},
                      {"est_pn_slope", num(est.slope)},
                      {"est_pn_C", num(est.fitted_C)},
                      {"sandwich_lower", *std::min_element(sw.lower.begin(), sw.lower.end())},
                      {"sandwich_upper", *std::max_element(sw.upper.begin(), sw.upper.end())},
                      {"majorant", num(decreasing_criterion_symbolic(std::max(est.fitted_C, 1.0), alpha,
                                                                     std::vector<cplx>{1.0}))}};
}

// ---- catalog -----------------------------------------------------------

struct Suite {
  SuiteInfo info;
  SuiteFn run;
};

const std::vector<Suite>& suites() {
  static const std::vector<Suite> all = {
      {{"telescope", "audit", "telescoping Parseval identity", "AuditReport per case", {"cases", "J"}}, suite_telescope},
      {{"rio", "audit", "martingale moment bound max(1, sqrt(p-1))", "AuditReport per case", {"cases", "J", "p"}}, suite_rio},
      {{"doob", "audit", "Doob maximal bound p/(p-1)", "AuditReport per case", {"cases", "J", "p"}}, suite_doob},
      {{"general-maximal", "audit", "theo-gen maximal K_p", "AuditReport per case", {"cases", "J", "p", "terms"}}, suite_general_maximal},
      {{"bounded-moments", "audit", "bounded increments moment chain", "AuditReport per case and p", {"cases", "J", "p"}},
       suite_bounded_moments},
      {{"burkholder", "audit", "Burkholder square function (p*-1)", "AuditReport per case", {"cases", "J", "p"}},
       suite_burkholder},
      {{"paley-zygmund", "audit", "Paley-Zygmund lower bound", "AuditReport per case", {"cases", "q"}}, suite_paley_zygmund},
      {{"dyadic-approx", "audit", "lemme-dyadic factor-2 bound", "AuditReport per case and level",
        {"cases", "J", "p", "degree"}},
       suite_dyadic_approx},
      {{"contraction", "audit", "contraction 2^n/m bound and sqrt(l 2^n)/m refinement", "AuditReport per case",
        {"cases", "J", "p"}},
       suite_contraction},
      {{"dilated-criteria", "dilated", "dilated series convergence criteria", "JSON summary and term audit",
        {"series", "p", "J", "tail"}},
       suite_dilated_criteria},
      {{"oscillation", "dilated", "dilated oscillation trend", "checkpoint,median_osc,q90_osc",
        {"series", "checkpoints", "samples", "expect"}},
       suite_oscillation},
      {{"gaposhkin", "dilated", "lacunary generator sharpness example", "checkpoint,median_osc,q90_osc",
        {"m", "K", "checkpoints", "samples", "fit_from", "fit_to"}},
       suite_gaposhkin},
      {{"davenport-gram", "davenport", "Davenport Gram matrix and Riesz constants", "n_j,n_k,entry",
        {"lambda", "freqs"}},
       suite_davenport_gram},
      {{"davenport-smoothness", "davenport", "Davenport smoothness exponent", "JSON summary",
        {"lambda", "M", "p", "J", "tolerance"}},
       suite_davenport_smoothness},
      {{"transfer", "ergodic", "transfer operator norm decay", "n,norm,criterion_partial",
        {"generator", "N", "tail", "condensed_tail"}},
       suite_transfer},
      {{"ergodic-series", "ergodic", "doubling map series oscillation", "checkpoint,median_osc,q90_osc",
        {"generator", "coeffs", "checkpoints", "samples", "tail"}},
       suite_ergodic_series},
      {{"decreasing", "ergodic", "decreasing-norm criteria", "JSON summary", {"generator", "coeffs", "p", "tail"}},
       suite_decreasing},
      {{"riesz-coeff", "riesz", "Riesz product Fourier coefficients", "k,re,im", {"riesz", "N", "k"}}, suite_riesz_coeff},
      {{"riesz-sample", "riesz", "Riesz product density sampling", "x", {"riesz", "N", "J", "count"}},
       suite_riesz_sample},
      {{"riesz-series", "riesz", "series under a Riesz product measure", "checkpoint,median_osc,q90_osc",
        {"riesz", "N", "generator", "coeffs", "checkpoints", "samples", "J", "epsilon"}},
       suite_riesz_series},
      {{"symbolic-audit", "symbolic", "potential regularity and transfer decay", "AuditReport list and JSON summary",
        {"riesz", "depth", "alpha", "A", "B"}},
       suite_symbolic},
  };
  return all;
}

const Suite& suite_entry(const std::string& name) {
  for (const auto& s : suites())
    if (s.info.name == name) return s;
  throw ConfigError("unknown suite \"" + name + "\"");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string reports_csv(const std::vector<AuditReport>& reports) {
  std::ostringstream os;
  os << "context,lhs,rhs,constant,margin,passed\n";
  for (const auto& r : reports)
    os << csv_field(r.context) << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
       << format_double(r.constant) << ',' << format_double(r.margin) << ',' << (r.passed ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace

const std::vector<SuiteInfo>& list_suites() {
  static const std::vector<SuiteInfo> infos = [] {
    std::vector<SuiteInfo> v;
    for (const auto& s : suites()) v.push_back(s.info);
    return v;
  }();
  return infos;
}

const SuiteInfo& find_suite(const std::string& name) { return suite_entry(name).info; }

ExperimentConfig ExperimentConfig::parse(const json& j) {
  if (!j.is_object() || j.empty()) throw ConfigError("empty configuration");
  static const std::set<std::string> keys{"schema", "kind", "suite", "seed", "parameters", "output"};
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw ConfigError("unknown configuration field \"" + k + "\"");
  ExperimentConfig c;
  try {
    if (j.contains("schema")) c.schema = j.at("schema").get<int>();
    if (c.schema != kConfigSchema) throw ConfigError("unsupported schema version " + std::to_string(c.schema));
    if (!j.contains("kind")) throw ConfigError("missing field \"kind\"");
    c.kind = j.at("kind").get<std::string>();
    static const std::set<std::string> kinds{"audit", "dilated", "davenport", "ergodic", "riesz", "symbolic"};
    if (!kinds.count(c.kind)) throw ConfigError("unknown kind \"" + c.kind + "\"");
    if (j.contains("suite")) {
      c.suite = j.at("suite").get<std::string>();
    } else {
      for (const auto& s : suites())
        if (s.info.kind == c.kind) {
          c.suite = s.info.name;
          break;
        }
    }
    const auto& info = find_suite(c.suite);
    if (info.kind != c.kind) throw ConfigError("suite \"" + c.suite + "\" belongs to kind \"" + info.kind + "\"");
    if (j.contains("seed")) {
      const auto& sd = j.at("seed");
      if (!sd.is_number_integer() || (!sd.is_number_unsigned() && sd.get<long long>() < 0)) throw ConfigError("seed must be a nonnegative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("parameters")) {
      c.parameters = j.at("parameters");
      if (!c.parameters.is_object()) throw ConfigError("parameters must be an object");
      for (const auto& [k, v] : c.parameters.items())
        if (std::find(info.parameters.begin(), info.parameters.end(), k) == info.parameters.end())
          throw ConfigError("suite \"" + c.suite + "\" has no parameter \"" + k + "\"");
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      if (!o.is_object()) throw ConfigError("output must be an object");
      if (o.contains("path")) c.output_path = o.at("path").get<std::string>();
      if (o.contains("format")) c.format = o.at("format").get<std::string>();
    }
    if (c.format != "csv" && c.format != "json") throw ConfigError("output format must be csv or json");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json j{{"schema", schema}, {"kind", kind}, {"suite", suite}, {"seed", seed}, {"parameters", parameters}};
  j["output"] = {{"path", output_path}, {"format", format}};
  return j;
}

std::uint64_t ExperimentConfig::hash() const {
  // json (not ordered_json) sorts keys, so the dump is canonical
  json j = to_json();
  j["output"].erase("path");
  return fnv1a(j.dump());
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult res;
  const auto& suite = suite_entry(config.suite);
  SuiteOutput out;
  std::string status = "passed";
  try {
    suite.run(Params(config.parameters), config.seed, out);
  } catch (const ConfigError& e) {
    res.exit_code = 2;
    res.error = e.what();
    status = "config-error";
  } catch (const std::invalid_argument& e) {
    res.exit_code = 2;
    res.error = e.what();
    status = "config-error";
  } catch (const std::exception& e) {
    res.exit_code = 1;
    res.error = e.what();
    status = "error";
  }
  for (auto& r : out.reports) {
    if (!r.seed) r.seed = config.seed;
    res.failures += !r.passed;
  }
  if (res.exit_code == 0 && (res.failures > 0 || out.failed)) {
    res.exit_code = 1;
    status = "failed";
  }

  const std::string hash = hex64(config.hash());
  if (config.format == "json") {
    ojson doc;
    doc["tool"] = "mgale";
    doc["version"] = kVersion;
    doc["suite"] = suite.info.name;
    doc["kind"] = suite.info.kind;
    doc["anchor"] = suite.info.anchor;
    doc["config_hash"] = hash;
    doc["seed"] = config.seed;
    doc["status"] = status;
    if (!res.error.empty()) doc["error"] = res.error;
    doc["failures"] = res.failures;
    doc["summary"] = out.summary;
    doc["reports"] = ojson::array();
    for (const auto& r : out.reports) doc["reports"].push_back(to_json(r));
    if (!out.csv.empty()) doc["table"] = out.csv;
    res.report = doc.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "# mgale " << kVersion << " suite=" << suite.info.name << " config_hash=" << hash << " seed=" << config.seed
       << " status=" << status << " failures=" << res.failures << '\n';
    if (!res.error.empty()) os << "# error: " << res.error << '\n';
    if (!out.summary.empty()) os << "# summary: " << out.summary.dump() << '\n';
    os << (out.csv.empty() ? reports_csv(out.reports) : out.csv);
    res.report = os.str();
  }
  return res;
}

}  // namespace mgale
