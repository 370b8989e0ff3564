#include "mgale/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"
#include "mgale/binary_point.hpp"
#include "mgale/dyadic_martingale.hpp"
#include "mgale/numfmt.hpp"

namespace mgale {

namespace {

void check_exponent(double p) {
  if (std::isnan(p) || p < 1.0) throw std::invalid_argument("modulus needs p >= 1");
}

// sum of |d|^p over a block, p finite
double power_sum(const std::vector<double>& sq, double p) {
  double acc = 0.0;
  if (p == 2.0) {
    for (double v : sq) acc += v;
  } else if (p == 4.0) {
    for (double v : sq) acc += v * v;
  } else if (p == 1.0) {
    for (double v : sq) acc += std::sqrt(v);
  } else if (p == 1.5) {
    for (double v : sq) acc += std::sqrt(v) * std::sqrt(std::sqrt(v));
  } else {
    for (double v : sq) acc += std::pow(v, p / 2);
  }
  return acc;
}

ModulusProfile from_shift_norms(const std::vector<double>& g, int J, double p) {
  const std::size_t N = g.size();
  // running max over t <= T, using g(t) = g(N - t)
  std::vector<double> best(N / 2 + 1, 0.0);
  for (std::size_t t = 1; t <= N / 2; ++t) best[t] = std::max(best[t - 1], g[t]);
  ModulusProfile out;
  out.p = p;
  out.source_resolution = J;
  for (int n = 0; n <= J; ++n) {
    const std::size_t T = std::min<std::size_t>(std::size_t{1} << (J - n), N / 2);
    out.values.push_back(best[T]);
  }
  return out;
}

// one shift point per (level, slot): slot 64 is 2^-n exactly
std::vector<std::vector<BinaryPoint>> shift_candidates(int n_max, std::uint64_t seed,
                                                       std::size_t bits) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<BinaryPoint>> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    const std::size_t lead = static_cast<std::size_t>(n) + 6;
    for (std::uint64_t j = 0; j < 64; ++j) {
      // binary digits: n zeros, the 6 digits of j, then random digits
      std::vector<std::uint64_t> w((lead + bits) / 64 + 2);
      for (auto& v : w) v = rng();
      for (std::size_t pos = 0; pos < lead; ++pos) {
        const std::uint64_t bit = std::uint64_t{1} << (63 - pos % 64);
        const bool one = pos >= static_cast<std::size_t>(n) && ((j >> (lead - 1 - pos)) & 1);
        w[pos / 64] = one ? (w[pos / 64] | bit) : (w[pos / 64] & ~bit);
      }
      out[n].emplace_back(std::move(w));
    }
    if (n == 0) {
      out[n].emplace_back(BinaryPoint(std::vector<std::uint64_t>{0}));  // h = 1 is h = 0 on the torus
    } else {
      std::vector<std::uint64_t> w((n - 1) / 64 + 1, 0);
      w[(n - 1) / 64] = std::uint64_t{1} << (63 - (n - 1) % 64);
      out[n].emplace_back(std::move(w));
    }
  }
  return out;
}

// terms: (frequency, |c|^2 summed over +-m)
ModulusProfile spectral_profile(const std::vector<std::pair<Freq, double>>& terms, int n_max,
                                std::uint64_t seed) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  std::uint64_t top = 0;
  for (const auto& [m, w] : terms) top = std::max(top, m.shift);
  const auto cands = shift_candidates(n_max, seed, top + 192);
  ModulusProfile out;
  out.p = 2.0;
  out.source_resolution = n_max;
  out.values.assign(n_max + 1, 0.0);
  double running = 0.0;
  for (int n = n_max; n >= 0; --n) {
    for (const auto& h : cands[n]) {
      double acc = 0.0;
      for (const auto& [m, w] : terms) {
        const double s = std::sin(std::numbers::pi * h.phase(m));
        acc += 4.0 * w * s * s;
      }
      running = std::max(running, std::sqrt(acc));
    }
    out.values[n] = running;
  }
  return out;
}

}  // namespace

std::vector<double> shift_norms(const GridFunction& f, double p) {
  check_exponent(p);
  const std::size_t N = f.size();
  std::vector<double> g(N, 0.0);
  if (N == 1) return g;
  const auto s = f.samples();
  if (p == 2.0) {
    // ||tau_t f - f||^2 = 2||f||^2 - 2 Re r(t) with r the circular autocorrelation
    std::vector<cplx> a(s.begin(), s.end());
    auto F = fft::forward(a);
    double energy = 0.0;
    for (auto& v : F) {
      v = std::norm(v);
      energy += v.real();
    }
    auto r = fft::backward(F);
    const double n2 = static_cast<double>(N) * static_cast<double>(N);
    energy /= n2;
    for (std::size_t t = 0; t < N; ++t) g[t] = std::sqrt(std::max(0.0, 2.0 * energy - 2.0 * r[t].real() / n2));
    g[0] = 0.0;
    return g;
  }
  // doubled buffer so every shift reads a contiguous range
  std::vector<cplx> twice(2 * N);
  std::copy(s.begin(), s.end(), twice.begin());
  std::copy(s.begin(), s.end(), twice.begin() + N);
  std::vector<double> sq(N);
  for (std::size_t t = 1; t <= N / 2; ++t) {
    for (std::size_t k = 0; k < N; ++k) sq[k] = std::norm(twice[k + t] - twice[k]);
    double v;
    if (std::isinf(p)) {
      v = std::sqrt(*std::max_element(sq.begin(), sq.end()));
    } else {
      v = std::pow(power_sum(sq, p) / static_cast<double>(N), 1.0 / p);
    }
    g[t] = v;
    g[N - t] = v;
  }
  return g;
}

ModulusProfile modulus_profile(const GridFunction& f, double p) {
  return from_shift_norms(shift_norms(f, p), f.resolution_log2(), p);
}

ModulusProfile spectral_modulus_profile(const FourierFunction& f, int n_max, std::uint64_t seed) {
  std::vector<std::pair<Freq, double>> terms;
  for (const auto& [m, c] : f.coefficients()) {
    if (m == 0) continue;
    terms.emplace_back(Freq::from_int(m < 0 ? -m : m), std::norm(c));
  }
  return spectral_profile(terms, n_max, seed);
}

ModulusProfile spectral_modulus_profile(const LacunarySeries& f, int n_max, std::uint64_t seed) {
  if (f.base < 2) throw std::invalid_argument("lacunary base must be >= 2");
  std::vector<std::pair<Freq, double>> terms;
  for (std::size_t j = 0; j < f.amplitudes.size(); ++j) {
    // a sin(2 pi m x) has |c|^2 = a^2/4 at each of +-m
    terms.emplace_back(Freq::power(f.base, f.first_exponent + j), f.amplitudes[j] * f.amplitudes[j] / 2);
  }
  return spectral_profile(terms, n_max, seed);
}

AuditReport dyadic_approx_audit(const GridFunction& f, const ModulusProfile& profile, int n) {
  if (profile.source_resolution != f.resolution_log2() || n < 0 || n > profile.max_level())
    throw std::invalid_argument("profile does not match the function or level");
  const double lhs = lp_norm(f - cond_exp(f, n), profile.p);
  return inequality_report(lhs, 2.0 * profile.at(n), 2.0,
                           "dyadic approximation n=" + std::to_string(n) + " p=" + format_double(profile.p));
}

AuditReport dyadic_approx_audit(const GridFunction& f, double p, int n) {
  return dyadic_approx_audit(f, modulus_profile(f, p), n);
}

SeriesCriterion criterion_sqrt_n(const ModulusProfile& profile, const std::optional<TailModel>& tail) {
  std::vector<double> terms;
  for (int n = 1; n <= profile.max_level(); ++n) {
    const double w = std::isinf(profile.p) ? 1.0 : std::pow(static_cast<double>(n), 1.0 / profile.p);
    terms.push_back(profile.at(n) / w);
  }
  return evaluate_series(terms, 1, tail);
}

std::string profile_csv(const ModulusProfile& profile) {
  std::ostringstream os;
  os << "n,delta,omega_p\n";
  for (int n = 0; n <= profile.max_level(); ++n)
    os << n << ',' << format_double(std::ldexp(1.0, -n)) << ',' << format_double(profile.at(n)) << '\n';
  return os.str();
}

}  // namespace mgale
