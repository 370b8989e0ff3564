#pragma once

// Random generators shared by the property tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "mgale/torus_fn.hpp"

namespace testing_support {

using mgale::cplx;

inline std::vector<double> normal_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

// centered real grid function with a random law (gaussian, heavy tailed,
// sparse spikes or signed cubes)
inline mgale::GridFunction random_centered(std::mt19937_64& rng, int J) {
  const std::size_t n = std::size_t{1} << J;
  std::vector<double> v(n);
  std::normal_distribution<double> nd;
  std::cauchy_distribution<double> cd;
  std::exponential_distribution<double> ed;
  const int kind = static_cast<int>(rng() % 4);
  for (auto& x : v) {
    switch (kind) {
      case 0: x = nd(rng); break;
      case 1: x = std::clamp(cd(rng), -1e3, 1e3); break;
      case 2: x = 0.0; break;
      default: x = (rng() & 1 ? 1.0 : -1.0) * std::pow(ed(rng), 3.0);
    }
  }
  if (kind == 2) {
    for (int s = 0; s < 1 + static_cast<int>(rng() % 3); ++s) v[rng() % n] = nd(rng);
  }
  // mean removed with the same pairwise order the library uses
  auto g = mgale::GridFunction::from_real(J, v);
  const double m = g.mean().real();
  for (auto& x : v) x -= m;
  return mgale::GridFunction::from_real(J, v);
}

// real trigonometric polynomial with zero mean and degree <= deg
inline mgale::FourierFunction random_trig_poly(std::mt19937_64& rng, int deg) {
  std::normal_distribution<double> nd;
  mgale::FourierFunction f;
  const int terms = 1 + static_cast<int>(rng() % 6);
  for (int t = 0; t < terms; ++t) {
    const std::int64_t m = 1 + static_cast<std::int64_t>(rng() % deg);
    const cplx c(nd(rng), nd(rng));
    f.add(m, c);
    f.add(-m, std::conj(c));
  }
  return f;
}

}  // namespace testing_support
