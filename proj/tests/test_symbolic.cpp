#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mgale/symbolic.hpp"

using namespace mgale;

namespace {

SymbolicSpace golden_mean(int D) {
  SymbolicSpace s;
  s.alphabet.assign(static_cast<std::size_t>(D), 2);
  s.incidence.assign(static_cast<std::size_t>(D - 1), {{1, 1}, {1, 0}});
  s.transitivity = 1;
  s.validate();
  return s;
}

// random positive g_n, normalized over y_n by division
PotentialSeq random_potentials(const SymbolicSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  PotentialSeq pot;
  for (int n = 1; n <= space.depth(); ++n) {
    auto g = CylinderFunction::from(space, n, [&](std::span<const int>) { return u(rng); });
    const CylinderFunction tails(space, n + 1);
    const std::size_t block = tails.size();
    std::vector<double> sums(block, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k)
      if (g.admissible(k)) sums[k % block] += g[k];
    for (std::size_t k = 0; k < g.size(); ++k)
      if (g.admissible(k)) g[k] /= sums[k % block];
    pot.g.push_back(g);
  }
  return pot;
}

PotentialSeq uniform_potentials(const SymbolicSpace& space) {
  PotentialSeq pot;
  for (int n = 1; n <= space.depth(); ++n)
    pot.g.push_back(CylinderFunction::from(space, n, [&](std::span<const int>) { return 1.0 / space.alphabet[n - 1]; }));
  return pot;
}

// P_n f by explicit enumeration of y_1..y_n
double brute_pn(const SymbolicSpace& space, const PotentialSeq& pot, const CylinderFunction& f, int n,
                const std::vector<int>& x) {
  const int D = space.depth();
  double total = 0.0;
  std::vector<int> w = x;
  std::size_t count = 1;
  for (int j = 0; j < n; ++j) count *= static_cast<std::size_t>(space.alphabet[j]);
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t r = c;
    for (int j = n; j-- > 0;) {
      w[j] = static_cast<int>(r % static_cast<std::size_t>(space.alphabet[j]));
      r /= static_cast<std::size_t>(space.alphabet[j]);
    }
    bool ok = true;
    for (int j = 1; j < D && ok; ++j) ok = space.allowed(j, w[j - 1], w[j]);
    if (!ok) continue;
    double G = 1.0;
    for (int j = 1; j <= n; ++j) G *= pot.g[j - 1].at(std::span<const int>(w).subspan(j - 1));
    total += G * f.at(std::span<const int>(w).subspan(f.start() - 1));
  }
  return total;
}

RieszProductSpec riesz_spec(int n, std::int64_t ratio, cplx c) {
  RieszProductSpec s;
  std::int64_t lam = 1;
  for (int k = 0; k < n; ++k, lam *= ratio) {
    s.lambdas.push_back(lam);
    s.cs.push_back(c);
  }
  return s;
}

}  // namespace

TEST_CASE("symbolic spaces") {
  CHECK_NOTHROW(SymbolicSpace::full({2, 3, 4}));
  CHECK_THROWS(SymbolicSpace::full({2, 1}));
  auto g = golden_mean(6);
  std::size_t admissible = 0;
  CylinderFunction shape(g, 1);
  for (std::size_t i = 0; i < shape.size(); ++i) admissible += shape.admissible(i);
  CHECK(admissible == 21);  // Fibonacci
  g.transitivity = 0;
  CHECK_THROWS(g.validate());
  SymbolicSpace bad = golden_mean(3);
  bad.incidence[0] = {{1, 1}, {0, 0}};
  CHECK_THROWS(bad.validate());
  bad.incidence[0] = {{1, 0}, {1, 0}};
  CHECK_THROWS(bad.validate());
  CHECK_THROWS(SymbolicSpace::full(std::vector<int>(21, 2)));
}

TEST_CASE("averaging operators") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const auto space = t % 2 ? golden_mean(6) : SymbolicSpace::full({2, 3, 2, 3, 2});
    const auto pot = random_potentials(space, rng);
    CHECK_NOTHROW(pot.validate(space));
    const int D = space.depth();
    CylinderFunction one = CylinderFunction::from(space, 1, [](std::span<const int>) { return 1.0; });
    const auto f = CylinderFunction::from(space, 1, [&](std::span<const int>) { return u(rng); });
    const auto pos = CylinderFunction::from(space, 1, [&](std::span<const int>) { return u(rng) + 1.0; });
    for (int n = 0; n <= D; ++n) {
      const auto p1 = pn_apply(space, pot, one, n);
      for (std::size_t i = 0; i < p1.size(); ++i)
        if (p1.admissible(i)) CHECK(p1[i] == 1.0);
      const auto pf = pn_apply(space, pot, f, n);
      CHECK(pf.start() == n + 1);
      std::vector<int> x;
      const CylinderFunction shape(space, 1);
      for (std::size_t i = 0; i < shape.size(); i += 3) {
        if (!shape.admissible(i)) continue;
        shape.decode(i, x);
        CHECK(pf.at(std::span<const int>(x).subspan(n)) == doctest::Approx(brute_pn(space, pot, f, n, x)).epsilon(1e-13));
      }
      const auto pp = pn_apply(space, pot, pos, n);
      for (std::size_t i = 0; i < pp.size(); ++i)
        if (pp.admissible(i)) CHECK(pp[i] >= 0.0);
      // projection consistency: P_k P_m f = P_m f for k <= m
      for (int k = 0; k <= n; ++k) {
        const auto twice = pn_apply(space, pot, pf, k);
        const auto same = pf.lift(space, k + 1);
        for (std::size_t i = 0; i < same.size(); ++i)
          if (same.admissible(i)) CHECK(std::abs(twice[i] - same[i]) < 1e-14);
      }
    }
  }
  // uniform potentials on the full shift: P_1 averages the first coordinate
  const auto full = SymbolicSpace::full({3, 2, 2});
  const auto f = CylinderFunction::from(full, 1, [](std::span<const int> w) { return w[0] * 1.0 + 10.0 * w[2]; });
  const auto p = pn_apply(full, uniform_potentials(full), f, 1);
  std::vector<int> tail{1, 1};
  CHECK(p.at(tail) == doctest::Approx(1.0 + 10.0));
  CHECK_THROWS(pn_apply(full, uniform_potentials(full), f, 4));
  PotentialSeq bad = uniform_potentials(full);
  bad.g[1][0] = 0.7;
  CHECK_THROWS(bad.validate(full));
}

TEST_CASE("variations") {
  const auto space = SymbolicSpace::full({2, 3, 2, 4, 2});
  for (int m = 1; m <= 5; ++m) {
    const auto f = CylinderFunction::from(space, 1, [&](std::span<const int> w) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += w[k] * std::pow(7.0, k);
      return s;
    });
    CHECK(var_m(space, f, m).value == 0.0);
    if (m < 5) {
      const auto ind = CylinderFunction::from(space, 1, [&](std::span<const int> w) {
        for (int k = 0; k <= m; ++k)
          if (w[k] != 1) return 0.0;
        return 1.0;
      });
      const auto v = var_m(space, ind, m);
      CHECK(v.value == 1.0);
      REQUIRE(v.x.size() == 5);
      for (int k = 0; k < m; ++k) CHECK(v.x[k] == v.y[k]);
    }
  }
  // the torus coordinate is 1-Lipschitz for d(x, y) = 1/(l_1...l_m)
  const auto pt = CylinderFunction::from(space, 1, [&](std::span<const int> w) {
    double x = 0.0, scale = 1.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      scale /= space.alphabet[k];
      x += w[k] * scale;
    }
    return x;
  });
  double scale = 1.0;
  for (int m = 0; m <= 5; ++m) {
    CHECK(var_m(space, pt, m).value <= scale);
    if (m < 5) scale /= space.alphabet[static_cast<std::size_t>(m)];
  }
  CHECK_THROWS(var_m(space, pt, 6));
}

TEST_CASE("condition on the potentials") {
  const auto full = SymbolicSpace::full({2, 2, 2, 2, 2});
  // one-coordinate potentials: nothing to vary
  auto local = uniform_potentials(full);
  auto r = cond_gn_check(full, local, 1.0, 1e-300);
  CHECK(r.passed);
  CHECK(r.constant == 0.0);

  // g_2 depends on x_5: the worst case sits at (n, m) = (2, 4)
  auto bad = uniform_potentials(full);
  bad.g[1] = CylinderFunction::from(full, 2, [](std::span<const int> w) {
    const double s = w[0] ? 1.0 : -1.0, t = w[3] ? 1.0 : -1.0;
    return 0.5 * (1.0 + 0.5 * s * t);
  });
  CHECK_NOTHROW(bad.validate(full));
  auto v = cond_gn_check(full, bad, 1.0, 1.0);
  CHECK_FALSE(v.passed);
  CHECK(v.constant == doctest::Approx(2.0 * std::log(3.0)));
  CHECK(v.context.find("n=2 m=4") != std::string::npos);
  CHECK(v.context.find("x=") != std::string::npos);
  CHECK(cond_gn_check(full, bad, 1.0, 2.2).passed);

  // Riesz potentials with sup |c| < 1: geometric variation, any polynomial rate
  auto rs = riesz_potentials(riesz_spec(7, 3, cplx(0.4, 0.3)), 6);
  for (double alpha : {0.5, 1.0, 3.0}) {
    auto c = cond_gn_check(rs.space, rs.potentials, alpha, 10.0);
    CHECK(c.passed);
    CHECK(c.constant > 0.0);
  }
  // zeros of g rule out the logarithm
  auto z = riesz_potentials(riesz_spec(5, 3, cplx(-1.0)), 4);
  CHECK_THROWS(cond_gn_check(z.space, z.potentials, 1.0, 1.0));
}

TEST_CASE("equilibrium states") {
  std::mt19937_64 rng(63);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const auto space = t % 2 ? golden_mean(6) : SymbolicSpace::full({2, 3, 2, 2});
    const auto pot = random_potentials(space, rng);
    const auto mu = equilibrium(space, pot);
    double total = 0.0;
    for (double w : mu.weights) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    // invariance under every P_n^*
    const auto f = CylinderFunction::from(space, 1, [&](std::span<const int>) { return u(rng); });
    for (int n = 1; n <= space.depth(); ++n)
      CHECK(mu.integrate(pn_apply(space, pot, f, n), space) == doctest::Approx(mu.integrate(f, space)).epsilon(1e-12));
    const auto sw = cylinder_sandwich(space, pot, mu);
    for (std::size_t n = 0; n < sw.lower.size(); ++n) {
      CHECK(sw.lower[n] > 0.0);
      CHECK(sw.lower[n] <= sw.upper[n]);
      CHECK(std::isfinite(sw.upper[n]));
    }
    CHECK(sw.lower.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sw.upper.back() == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto full = SymbolicSpace::full({2, 2, 2});
  const auto mu = equilibrium(full, uniform_potentials(full));
  for (double w : mu.weights) CHECK(w == doctest::Approx(0.125));
  std::vector<int> pre{1};
  CHECK(mu.cylinder(full, pre) == doctest::Approx(0.5));
}

TEST_CASE("Riesz products as equilibrium states") {
  const int D = 5;
  auto spec = riesz_spec(D + 1, 4, cplx(0.5, -0.4));
  spec.cs[2] = cplx(-0.7, 0.1);
  const auto rs = riesz_potentials(spec, D);
  const auto mu = equilibrium(rs.space, rs.potentials);
  const int J = 2 * D;  // lambda_D = 2^J: cylinders of depth D are the grid cells
  const auto P = riesz_partial_density(spec, D - 1, J);
  std::vector<int> word;
  const CylinderFunction shape(rs.space, 1);
  for (int n = 1; n <= D; ++n) {
    double err = 0.0;
    for (std::size_t i = 0; i < shape.size(); i += std::size_t{1} << (2 * (D - n))) {
      shape.decode(i, word);
      const std::int64_t k0 = riesz_word_index(spec, word);
      double integral = 0.0;
      for (std::int64_t k = k0; k < k0 + (std::int64_t{1} << (2 * (D - n))); ++k)
        integral += P[static_cast<std::size_t>(k)].real();
      integral = std::ldexp(integral, -J);
      err = std::max(err, std::abs(mu.cylinder(rs.space, std::span<const int>(word).first(n)) - integral));
    }
    CHECK(err < 1e-12);
  }
  // conditional expectation of a first-coordinate function against the torus density
  const auto f = CylinderFunction::from(rs.space, 1, [](std::span<const int> w) { return std::cos(1.0 + w[0]); });
  for (int n = 1; n < D; ++n) {
    const auto pf = pn_apply(rs.space, rs.potentials, f, n);
    for (std::size_t t = 0; t < pf.size(); ++t) {
      double num = 0.0, den = 0.0;
      const std::size_t prefixes = shape.size() / pf.size();
      for (std::size_t p = 0; p < prefixes; ++p) {
        shape.decode(p * pf.size() + t, word);
        const double w = P[static_cast<std::size_t>(riesz_word_index(spec, word))].real();
        num += w * std::cos(1.0 + word[0]);
        den += w;
      }
      CHECK(pf[t] == doctest::Approx(num / den).epsilon(1e-12));
    }
  }
  CHECK_THROWS(riesz_potentials(riesz_spec(4, 3, 0.5), 4));
  auto shifted = riesz_spec(4, 3, 0.5);
  for (auto& l : shifted.lambdas) l *= 2;
  CHECK_THROWS(riesz_potentials(shifted, 3));
}

TEST_CASE("decay of P_m f_n") {
  // centered functions of the next coordinate under uniform weights vanish after one step
  const auto full = SymbolicSpace::full({2, 2, 2, 2, 2, 2});
  std::vector<CylinderFunction> fam;
  for (int n = 1; n < 6; ++n)
    fam.push_back(CylinderFunction::from(full, n + 1, [](std::span<const int> w) { return w[0] ? 0.5 : -0.5; }));
  auto e = est_pn_audit(full, uniform_potentials(full), fam, 1.0, 1.0);
  CHECK(e.gaps.empty());
  CHECK(e.slope == -std::numeric_limits<double>::infinity());
  CHECK(e.report.passed);

  // Riesz potentials and f_n = Re e(lambda_n x) - mu(...)
  const int D = 6;
  const auto spec = riesz_spec(D + 1, 3, cplx(0.8));
  const auto rs = riesz_potentials(spec, D);
  const auto mu = equilibrium(rs.space, rs.potentials);
  std::vector<CylinderFunction> rf;
  for (int n = 1; n < D; ++n) {
    auto f = CylinderFunction::from(rs.space, n + 1, [&](std::span<const int> w) {
      std::int64_t r = 0;
      for (std::size_t i = 0; i < w.size(); ++i) r += w[i] * (spec.lambdas[D] / spec.lambdas[n + 1 + i]);
      return std::cos(2 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(spec.lambdas[D] / spec.lambdas[n]));
    });
    const double m = mu.integrate(f, rs.space);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] -= m;
    rf.push_back(f);
  }
  // one averaging step past n already returns the mean: nothing survives rounding
  auto a = est_pn_audit(rs.space, rs.potentials, rf, 1.0, 2 * std::numbers::pi);
  CHECK(a.report.passed);
  CHECK(a.gaps.empty());
  CHECK_THROWS_AS(est_pn_audit(rs.space, rs.potentials, rf, 1.0, 0.1), std::invalid_argument);

  // potentials and functions with geometrically fading dependence on far coordinates
  const int E = 8;
  const auto bin = SymbolicSpace::full(std::vector<int>(E, 2));
  std::mt19937_64 rng(64);
  PotentialSeq pot;
  for (int n = 1; n <= E; ++n) {
    std::vector<double> sign(E);
    for (auto& v : sign) v = rng() % 2 ? 1.0 : -1.0;
    pot.g.push_back(CylinderFunction::from(bin, n, [&](std::span<const int> w) {
      double theta = 0.0;
      for (std::size_t k = 1; k < w.size(); ++k) theta += 0.5 * std::ldexp(sign[k], -static_cast<int>(k)) * (w[k] - 0.5);
      return 0.5 * (1.0 + (w[0] ? theta : -theta));
    }));
  }
  const auto mb = equilibrium(bin, pot);
  std::vector<CylinderFunction> gf;
  for (int n = 1; n < E; ++n) {
    auto f = CylinderFunction::from(bin, n + 1, [](std::span<const int> w) {
      double s = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) s += std::ldexp(w[k] - 0.5, -static_cast<int>(k));
      return s;
    });
    const double m = mb.integrate(f, bin);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] -= m;
    gf.push_back(f);
  }
  auto b = est_pn_audit(bin, pot, gf, 1.0, 2.0);
  CHECK(b.gaps.size() >= 3);
  CHECK(b.report.passed);
  CHECK(b.slope <= -0.8);
  CHECK(b.fitted_C > 0.0);
  for (std::size_t i = 1; i < b.worst.size(); ++i) CHECK(b.worst[i] < b.worst[i - 1]);
}

TEST_CASE("symbolic decreasing criterion") {
  std::vector<cplx> a{1.0, 0.5, cplx(0.0, 0.25)};
  const double r = std::exp2(-0.5);
  const double closed = r * (1 + r) / std::pow(1 - r, 3);  // sum l^2 r^l
  CHECK(decreasing_criterion_symbolic(2.0, 1.0, a) ==
        doctest::Approx(2.0 * closed * std::sqrt(1.0 + 0.25 + 0.0625)).epsilon(1e-12));
  CHECK(decreasing_criterion_symbolic(2.0, 0.4, a) == std::numeric_limits<double>::infinity());
  std::vector<cplx> zero(3, 0.0);
  CHECK(decreasing_criterion_symbolic(2.0, 1.0, zero) == 0.0);
  CHECK_THROWS(decreasing_criterion_symbolic(2.0, 0.0, a));
}
