#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mgale/riesz_product.hpp"

using namespace mgale;

namespace {

RieszProductSpec geometric_spec(std::size_t n, std::int64_t ratio, cplx c) {
  RieszProductSpec s;
  std::int64_t lam = 1;
  for (std::size_t k = 0; k < n; ++k, lam *= ratio) {
    s.lambdas.push_back(lam);
    s.cs.push_back(c);
  }
  return s;
}

cplx grid_coeff(const GridFunction& g, std::int64_t k) {
  cplx s = 0.0;
  const double n = static_cast<double>(g.size());
  for (std::size_t j = 0; j < g.size(); ++j)
    s += g[j] * std::polar(1.0, -2 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(j) / n);
  return s / n;
}

}  // namespace

TEST_CASE("Riesz spec validation") {
  CHECK_NOTHROW(geometric_spec(5, 3, 0.5).validate());
  CHECK_THROWS(geometric_spec(5, 2, 0.5).validate());
  auto s = geometric_spec(3, 4, 0.5);
  s.lambdas[2] = 17;
  CHECK_THROWS(s.validate());
  CHECK_THROWS(geometric_spec(3, 4, 1.2).validate());
  auto u = geometric_spec(3, 4, 1.0);
  CHECK_NOTHROW(u.validate());
  u.strict = true;
  CHECK_THROWS(u.validate());
  RieszProductSpec bad;
  bad.lambdas = {1, 4};
  bad.cs = {0.5};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("partial densities are probability densities") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    auto s = geometric_spec(5, 3 + static_cast<std::int64_t>(rng() % 3), 0.0);
    double floor = 1.0;
    for (auto& c : s.cs) {
      c = cplx(u(rng), u(rng)) * 0.7;
      floor *= 1.0 - std::abs(c);
    }
    const auto P = riesz_partial_density(s, 4, 14);
    CHECK(std::abs(P.mean() - cplx(1.0)) < 1e-12);
    for (std::size_t k = 0; k < P.size(); ++k) CHECK(P[k].real() >= floor - 1e-12);
  }
  CHECK_THROWS(riesz_partial_density(geometric_spec(5, 4, 0.5), 4, 8));
  CHECK_THROWS(riesz_partial_density(geometric_spec(5, 4, 0.5), 5, 16));
}

TEST_CASE("Fourier coefficients against grid quadrature") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    auto s = geometric_spec(4, 4, 0.0);
    for (auto& c : s.cs) c = cplx(u(rng), u(rng)) * 0.7;
    const auto P = riesz_partial_density(s, 3, 10);
    const std::int64_t l0 = s.lambdas[0], l1 = s.lambdas[1], l3 = s.lambdas[3];
    CHECK(std::abs(riesz_fourier_coeff(s, 3, l0) - s.cs[0] / 2.0) < 1e-15);
    CHECK(std::abs(riesz_fourier_coeff(s, 3, -l0) - std::conj(s.cs[0]) / 2.0) < 1e-15);
    for (std::int64_t k : {std::int64_t{0}, l0, -l0, l0 + l1, l1 - l0, l3 - l1 + l0, std::int64_t{2}, l3 + 1})
      CHECK(std::abs(riesz_fourier_coeff(s, 3, k) - grid_coeff(P, k)) < 1e-10);
  }
  auto s = geometric_spec(3, 3, 0.5);
  CHECK(riesz_fourier_coeff(s, 2, 0) == cplx(1.0));
  CHECK(riesz_fourier_coeff(s, 2, 2) == cplx(0.0625));  // 2 = 3 - 1
  CHECK(riesz_fourier_coeff(s, 2, 14) == cplx(0.0));   // past 1 + 3 + 9
}

TEST_CASE("sampling from mu") {
  CHECK(sample_mu(geometric_spec(3, 4, 0.5), 2, 10, 0, 1).empty());
  // c = 0: uniform cells
  const int J = 6;
  auto flat = sample_mu(geometric_spec(3, 4, 0.0), 2, J, 64000, 7);
  std::vector<double> counts(std::size_t{1} << J, 0.0);
  for (double x : flat) {
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    counts[static_cast<std::size_t>(std::ldexp(x, J))] += 1.0;
  }
  double chi2 = 0.0;
  const double expect = 64000.0 / counts.size();
  for (double c : counts) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 63 + 5 * std::sqrt(2.0 * 63));

  // Monte Carlo means: E e^{-2 pi i lambda_0 x} = c_0/2
  auto s = geometric_spec(4, 4, cplx(0.6, -0.3));
  const std::size_t count = 40000;
  auto xs = sample_mu(s, 3, 12, count, 8);
  cplx m0 = 0.0, m01 = 0.0;
  for (double x : xs) {
    m0 += std::polar(1.0, -2 * std::numbers::pi * x);
    m01 += std::polar(1.0, -2 * std::numbers::pi * 5.0 * x);
  }
  m0 /= static_cast<double>(count);
  m01 /= static_cast<double>(count);
  const double tol = 3.0 / std::sqrt(static_cast<double>(count));
  CHECK(std::abs(m0 - riesz_fourier_coeff(s, 3, 1)) < tol);
  CHECK(std::abs(m01 - riesz_fourier_coeff(s, 3, 5)) < tol);
  CHECK(sample_mu(s, 3, 12, 50, 9) == sample_mu(s, 3, 12, 50, 9));
}

TEST_CASE("modulus hypothesis") {
  std::vector<FourierFunction> smooth{FourierFunction::exponential(1)};
  CHECK(riesz_modulus_hypothesis(smooth, 0.1, 12).holds);
  // sawtooth with a jump: omega_inf stays near the jump size at every scale
  FourierFunction saw;
  for (int k = 1; k < 1000; ++k) saw += FourierFunction::sine(k, 2.0 / (std::numbers::pi * k));
  std::vector<FourierFunction> rough{saw};
  auto h = riesz_modulus_hypothesis(rough, 0.1, 12);
  CHECK_FALSE(h.holds);
  CHECK(h.weighted.size() == 12);
  CHECK_THROWS(riesz_modulus_hypothesis(rough, 0.0, 12));
}

TEST_CASE("series runs under Riesz products") {
  auto s = geometric_spec(30, 4, 0.5);
  std::vector<FourierFunction> f{FourierFunction::exponential(1)};
  std::vector<cplx> a;
  for (int n = 0; n < 30; ++n) a.emplace_back(1.0 / ((n + 1.0) * (n + 1.0)));
  std::vector<std::size_t> cps{2, 4, 8, 14};
  auto run = riesz_series_run(s, 6, f, a, cps, 200, 3, 14);
  CHECK(run.depth == 6);
  REQUIRE(run.means.size() == 30);
  for (std::size_t n = 0; n <= 6; ++n) CHECK(std::abs(run.means[n] - cplx(0.25)) < 1e-15);  // conj(c_n)/2
  for (std::size_t n = 7; n < 30; ++n) CHECK(run.means[n] == cplx(0.0));
  CHECK(run.diagnostic.verdict == Verdict::converging);
  CHECK(run.diagnostic.method == "riesz");
  CHECK(run.hypothesis.holds);
  CHECK(run.in_hypothesis);
  s.cs[3] = 1.0;
  CHECK_FALSE(riesz_series_run(s, 6, f, a, cps, 100, 3, 14).in_hypothesis);
  std::vector<cplx> zero(30, 0.0);
  auto z = riesz_series_run(s, 6, f, zero, cps, 100, 3, 14);
  for (double m : z.diagnostic.median) CHECK(m == 0.0);
  CHECK_THROWS(riesz_series_run(s, 6, f, a, cps, 10, 3, 14));
}
