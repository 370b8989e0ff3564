#include "mgale/riesz_product.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mgale/binary_point.hpp"
#include "mgale/modulus.hpp"

namespace mgale {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_depth(const RieszProductSpec& spec, std::size_t N) {
  spec.validate();
  if (N >= spec.size()) throw std::invalid_argument("Riesz depth N beyond the specified factors");
}

std::vector<double> cumulative(const GridFunction& P) {
  std::vector<double> cdf(P.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < P.size(); ++k) {
    double v = P[k].real();
    if (v < 0.0) {
      if (v < -1e-12) throw std::logic_error("negative Riesz density");
      v = 0.0;
    }
    acc += v;
    cdf[k] = acc;
  }
  return cdf;
}

std::size_t draw_cell(const std::vector<double>& cdf, std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

void RieszProductSpec::validate() const {
  if (lambdas.empty() || lambdas.size() != cs.size())
    throw std::invalid_argument("Riesz product needs one c_n per lambda_n");
  double sup = 0.0;
  for (std::size_t n = 0; n < lambdas.size(); ++n) {
    if (lambdas[n] < 1) throw std::invalid_argument("Riesz frequencies must be positive");
    if (lambdas[n] > (std::int64_t{1} << 61)) throw std::invalid_argument("Riesz frequency too large");
    if (n > 0 && (lambdas[n] % lambdas[n - 1] != 0 || lambdas[n] / lambdas[n - 1] < 3))
      throw std::invalid_argument("need lambda_n | lambda_{n+1} and lambda_{n+1} >= 3 lambda_n");
    if (std::abs(cs[n]) > 1.0) throw std::invalid_argument("Riesz coefficients need |c_n| <= 1");
    sup = std::max(sup, std::abs(cs[n]));
  }
  if (strict && !(sup < 1.0)) throw std::invalid_argument("strict Riesz spec needs sup |c_n| < 1");
}

GridFunction riesz_partial_density(const RieszProductSpec& spec, std::size_t N, int J) {
  check_depth(spec, N);
  if (J < 2 || J > 30 || spec.lambdas[N] >= (std::int64_t{1} << (J - 1)))
    throw std::invalid_argument("lambda_N must stay below the 2^{J-1} aliasing limit");
  const std::size_t size = std::size_t{1} << J;
  const std::uint64_t mask = size - 1;
  std::vector<double> v(size, 1.0);
  std::int64_t total = 0;
  for (std::size_t n = 0; n <= N; ++n) {
    total += spec.lambdas[n];
    const auto lam = static_cast<std::uint64_t>(spec.lambdas[n]);
    const cplx c = spec.cs[n];
    for (std::size_t k = 0; k < size; ++k) {
      const double ph = kTwoPi * static_cast<double>((lam * k) & mask) / static_cast<double>(size);
      v[k] *= 1.0 + c.real() * std::cos(ph) - c.imag() * std::sin(ph);
    }
  }
  auto g = GridFunction::from_real(J, v);
  g.mark_aliased(total >= (std::int64_t{1} << (J - 1)));
  return g;
}

cplx riesz_fourier_coeff(const RieszProductSpec& spec, std::size_t N, std::int64_t k) {
  check_depth(spec, N);
  cplx out = 1.0;
  __int128 r = k;
  for (std::size_t i = N + 1; i-- > 0;) {
    const __int128 lam = spec.lambdas[i];
    int best = 0;
    __int128 best_abs = r < 0 ? -r : r;
    for (int e : {-1, 1}) {
      const __int128 d = r - e * lam;
      const __int128 ad = d < 0 ? -d : d;
      if (ad < best_abs) {
        best = e;
        best_abs = ad;
      }
    }
    if (best != 0) {
      r -= best * lam;
      out *= (best == 1 ? spec.cs[i] : std::conj(spec.cs[i])) / 2.0;
    }
  }
  return r == 0 ? out : cplx(0.0);
}

std::vector<double> sample_mu(const RieszProductSpec& spec, std::size_t N, int J, std::size_t count,
                              std::uint64_t seed) {
  const auto P = riesz_partial_density(spec, N, J);
  if (count == 0) return {};
  const auto cdf = cumulative(P);
  std::mt19937_64 rng(seed);
  std::vector<double> out(count);
  for (auto& x : out) x = std::ldexp(static_cast<double>(draw_cell(cdf, rng)), -J);
  return out;
}

ModulusHypothesis riesz_modulus_hypothesis(std::span<const FourierFunction> f, double epsilon, int J) {
  if (f.empty()) throw std::invalid_argument("no functions to check");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  ModulusHypothesis out;
  out.epsilon = epsilon;
  out.weighted.assign(static_cast<std::size_t>(J), 0.0);
  std::vector<const FourierFunction*> seen;
  for (const auto& g : f) {
    if (std::any_of(seen.begin(), seen.end(), [&](const FourierFunction* s) { return *s == g; })) continue;
    seen.push_back(&g);
    if (g.max_abs_frequency() >= (std::int64_t{1} << (J - 1)))
      throw std::invalid_argument("function not resolved on the hypothesis grid");
    const auto prof = modulus_profile(render(g, J), kInf);
    for (int k = 1; k <= J; ++k)
      out.weighted[k - 1] = std::max(out.weighted[k - 1], prof.at(k) * std::pow(k * std::log(2.0), 0.5 + epsilon));
  }
  const auto mid = out.weighted.begin() + J / 2;
  const double coarse = *std::max_element(out.weighted.begin(), mid);
  const double fine = *std::max_element(mid, out.weighted.end());
  out.holds = fine <= 1.1 * coarse;
  return out;
}

RieszRun riesz_series_run(const RieszProductSpec& spec, std::size_t N, std::span<const FourierFunction> f,
                          const std::vector<cplx>& a, std::span<const std::size_t> checkpoints,
                          std::size_t sample_count, std::uint64_t seed, int J, double epsilon) {
  check_depth(spec, N);
  const std::size_t K = a.size();
  if (K == 0 || K > spec.size()) throw std::invalid_argument("need one lambda_n per coefficient");
  if (f.size() != 1 && f.size() != K) throw std::invalid_argument("need one shared function or one per term");
  if (sample_count < 100) throw std::invalid_argument("Riesz series run needs at least 100 samples");
  if (checkpoints.empty()) throw std::invalid_argument("no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] >= K) throw std::invalid_argument("checkpoint beyond the series length");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) throw std::invalid_argument("checkpoints must increase");
  }
  auto fn = [&](std::size_t n) -> const FourierFunction& { return f.size() == 1 ? f[0] : f[n]; };

  RieszRun run;
  run.depth = N;
  std::int64_t reach = 0;  // largest frequency of P_N
  for (std::size_t n = 0; n <= N; ++n) reach += spec.lambdas[n];
  std::size_t bits = 192;
  for (std::size_t n = 0; n < K; ++n) {
    cplx m = 0.0;
    for (const auto& [j, c] : fn(n).coefficients()) {
      const __int128 freq = static_cast<__int128>(j) * spec.lambdas[n];
      if (freq >= -reach && freq <= reach) m += c * riesz_fourier_coeff(spec, N, static_cast<std::int64_t>(-freq));
    }
    run.means.push_back(m);
    const auto top = static_cast<std::uint64_t>(fn(n).max_abs_frequency()) * static_cast<std::uint64_t>(spec.lambdas[n]);
    bits = std::max<std::size_t>(bits, std::bit_width(top) + 128);
  }

  const auto cdf = cumulative(riesz_partial_density(spec, N, J));
  std::mt19937_64 rng(seed);
  const std::size_t last = std::min(2 * checkpoints.back(), K - 1);
  std::vector<std::vector<double>> osc(checkpoints.size(), std::vector<double>(sample_count));
  std::vector<cplx> S(last + 1);
  for (std::size_t s = 0; s < sample_count; ++s) {
    const std::uint64_t cell = draw_cell(cdf, rng);
    // the drawn cell fixes the top J binary digits, the rest are random
    std::vector<std::uint64_t> w((bits + 63) / 64 + 2);
    for (auto& v : w) v = rng();
    w[0] = (cell << (64 - J)) | (w[0] & ((std::uint64_t{1} << (64 - J)) - 1));
    const BinaryPoint x(std::move(w));
    cplx acc = 0.0;
    for (std::size_t n = 0; n <= last; ++n) {
      cplx v = 0.0;
      for (const auto& [j, c] : fn(n).coefficients()) {
        if (j == 0) {
          v += c;
          continue;
        }
        const Freq q = Freq::from_int(j < 0 ? -j : j) * Freq::from_int(spec.lambdas[n]);
        const double ph = x.phase(q);
        v += c * std::polar(1.0, kTwoPi * (j < 0 ? -ph : ph));
      }
      acc += a[n] * (v - run.means[n]);
      S[n] = acc;
    }
    for (std::size_t i = 0; i < checkpoints.size(); ++i) osc[i][s] = oscillation_window(S, checkpoints[i]);
  }
  run.diagnostic = summarize_oscillation(checkpoints, osc, seed, "riesz");

  int Jh = 12;
  for (std::size_t n = 0; n < f.size(); ++n)
    Jh = std::max(Jh, static_cast<int>(std::bit_width(static_cast<std::uint64_t>(f[n].max_abs_frequency()))) + 2);
  run.hypothesis = riesz_modulus_hypothesis(f, epsilon, std::min(Jh, 16));
  double sup = 0.0;
  for (const auto& c : spec.cs) sup = std::max(sup, std::abs(c));
  run.in_hypothesis = sup < 1.0 && run.hypothesis.holds;
  return run;
}

}  // namespace mgale
