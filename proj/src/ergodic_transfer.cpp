#include "mgale/ergodic_transfer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mgale/modulus.hpp"
#include "mgale/numfmt.hpp"

namespace mgale {

namespace {

std::uint64_t abs_freq(std::int64_t m) {
  return m < 0 ? std::uint64_t{0} - static_cast<std::uint64_t>(m) : static_cast<std::uint64_t>(m);
}

bool divisible_by_pow2(std::int64_t m, int e) {
  if (m == 0) return true;
  return std::countr_zero(abs_freq(m)) >= e;
}

void require_zero_mean(const FourierFunction& f, const char* what) {
  if (f.mean() != cplx(0.0)) throw std::invalid_argument(std::string(what) + " needs zero-mean functions");
}

double norm_of(const FourierFunction& g, double p, int J) {
  if (p == 2.0) return g.l2_norm();
  if (g.empty()) return 0.0;
  if (g.max_abs_frequency() >= (std::int64_t{1} << (J - 1)))
    throw std::invalid_argument("frequency beyond the 2^{J-1} grid limit for an L^p norm");
  return lp_norm(render(g, J), p);
}

}  // namespace

FourierFunction transfer_apply(const FourierFunction& f) { return transfer_power(f, 1); }

FourierFunction transfer_power(const FourierFunction& f, int n) {
  if (n < 0) throw std::invalid_argument("transfer power must be >= 0");
  FourierFunction out;
  for (const auto& [m, c] : f.coefficients())
    if (divisible_by_pow2(m, n)) out.add(n >= 63 ? 0 : m / (std::int64_t{1} << n), c);
  return out;
}

GridFunction transfer_apply_pointwise(const GridFunction& f) {
  const int J = f.resolution_log2() - 1;
  if (J < 0) throw std::invalid_argument("pointwise transfer needs a grid of at least two points");
  const std::size_t half = f.size() / 2;
  std::vector<cplx> v(half);
  for (std::size_t k = 0; k < half; ++k) v[k] = 0.5 * (f[k] + f[k + half]);
  return GridFunction(J, std::move(v), f.kind());
}

FourierFunction tail_expectation(const FourierFunction& g, int m) {
  if (m < 0) throw std::invalid_argument("filtration index must be >= 0");
  FourierFunction out;
  for (const auto& [k, c] : g.coefficients())
    if (divisible_by_pow2(k, m)) out.add(k, c);
  return out;
}

std::vector<double> transfer_norms(const Generator& f, int N) {
  if (N < 0) throw std::invalid_argument("N must be >= 0");
  // energy[s] collects |c|^2 of the terms whose frequency has 2-adic valuation s
  std::vector<double> energy(static_cast<std::size_t>(N) + 1, 0.0);
  auto put = [&](long long s, double e) { energy[static_cast<std::size_t>(std::min<long long>(s, N))] += e; };
  if (const auto* four = std::get_if<FourierFunction>(&f)) {
    for (const auto& [m, c] : four->coefficients()) put(m == 0 ? N : std::countr_zero(abs_freq(m)), std::norm(c));
  } else {
    const auto& lac = std::get<LacunarySeries>(f);
    const int v = std::countr_zero(lac.base);
    for (std::size_t j = 0; j < lac.amplitudes.size(); ++j) {
      const long long e = lac.first_exponent + static_cast<long long>(j);
      put(v == 0 ? 0 : v * e, 0.5 * lac.amplitudes[j] * lac.amplitudes[j]);
    }
  }
  std::vector<double> out(energy.size());
  double acc = 0.0;
  for (std::size_t n = energy.size(); n-- > 0;) {
    acc += energy[n];
    out[n] = std::sqrt(acc);
  }
  return out;
}

std::string TransferDecay::csv() const {
  std::ostringstream os;
  os << "n,norm,criterion_partial\n";
  double partial = 0.0;
  for (std::size_t n = 0; n < norms.size(); ++n) {
    if (n >= 1) partial += norms[n] / std::sqrt(static_cast<double>(n));
    os << n << ',' << format_double(norms[n]) << ',' << format_double(partial) << '\n';
  }
  return os.str();
}

TransferDecay transfer_decay(const Generator& f, int N, const std::optional<TailModel>& tail,
                             const std::optional<TailModel>& condensed_tail) {
  if (N < 1) throw std::invalid_argument("transfer decay needs N >= 1");
  if (const auto* four = std::get_if<FourierFunction>(&f)) require_zero_mean(*four, "transfer decay");
  TransferDecay out;
  out.norms = transfer_norms(f, N);
  std::vector<double> terms;
  for (int n = 1; n <= N; ++n) terms.push_back(out.norms[n] / std::sqrt(static_cast<double>(n)));
  out.criterion = evaluate_series(terms, 1, tail);
  std::vector<double> cterms;
  for (int l = 0; (1 << l) <= N; ++l) cterms.push_back(std::exp2(0.5 * l) * out.norms[std::size_t{1} << l]);
  try {
    out.condensed = evaluate_series(cterms, 1, condensed_tail);  // term l sits at index l + 1
  } catch (const std::runtime_error&) {
    if (condensed_tail) throw;
  }
  return out;
}

std::vector<double> lnorm_vs_modulus(const FourierFunction& f, int N, int J) {
  require_zero_mean(f, "lnorm_vs_modulus");
  if (N < 1 || J < N + 2) throw std::invalid_argument("need N >= 1 and J >= N + 2");
  if (f.max_abs_frequency() >= (std::int64_t{1} << (J - 1)))
    throw std::invalid_argument("frequency beyond the 2^{J-1} grid limit");
  const auto prof = modulus_profile(render(f, J), 2.0);
  const auto norms = transfer_norms(f, N);
  std::vector<double> out;
  for (int n = 1; n <= N; ++n) {
    if (prof.at(n) == 0.0) throw std::invalid_argument("omega_2 vanishes (constant function)");
    out.push_back(norms[n] / prof.at(n));
  }
  return out;
}

SeriesSpec ergodic_series_spec(const Generator& f, const std::vector<cplx>& a) {
  SeriesSpec s;
  s.coeffs = a;
  s.freqs = FrequencySequence::power(2, 0, a.size());
  s.generators = {f};
  s.validate();
  return s;
}

ErgodicRun ergodic_series_run(const Generator& f, const std::vector<cplx>& a,
                              std::span<const std::size_t> checkpoints, std::size_t sample_size,
                              std::uint64_t seed, const std::optional<TailModel>& tail) {
  ErgodicRun run{oscillation_diagnostic(ergodic_series_spec(f, a), checkpoints, sample_size, seed), std::nullopt};
  try {
    run.decay = transfer_decay(f, 62, tail);
  } catch (const std::runtime_error&) {
    // no tail model: the diagnostic stands alone
  }
  return run;
}

DecreasingCriteria decreasing_criteria(std::span<const FourierFunction> Z, double p, std::span<const int> levels,
                                       const std::optional<TailModel>& lower_tail, int J) {
  if (!(p > 1.0)) throw std::invalid_argument("decreasing criteria need p > 1");
  if (!levels.empty() && levels.size() != Z.size()) throw std::invalid_argument("levels must match the family");
  const double pp = std::min(2.0, p);
  const double wexp = 1.0 - 1.0 / p;
  auto level = [&](std::size_t n) { return levels.empty() ? static_cast<long long>(n) : levels[n]; };
  int top = 0;  // largest 2-adic size of any frequency
  for (const auto& z : Z) {
    require_zero_mean(z, "decreasing criteria");
    if (!z.empty()) top = std::max(top, static_cast<int>(std::bit_width(abs_freq(z.max_abs_frequency()))));
  }
  auto E = [&](const FourierFunction& g, long long m) {
    return tail_expectation(g, static_cast<int>(std::clamp<long long>(m, 0, 64)));
  };

  DecreasingCriteria out;
  const std::size_t N = Z.size();
  for (std::size_t l = 0; (std::size_t{1} << l) < N; ++l) {
    const long long step = 1LL << l;
    double in = 0.0;
    for (std::size_t n = static_cast<std::size_t>(step); n < N; ++n)
      in += std::pow(norm_of(Z[n] + cplx(-1.0) * E(Z[n], level(n) - step + 1), p, J), pp);
    out.higher += std::exp2(static_cast<double>(l) * wexp) * std::pow(in, 1.0 / pp);
  }

  long long min_level = 0;
  for (std::size_t n = 0; n < N; ++n) min_level = n == 0 ? level(0) : std::min(min_level, level(n));
  std::vector<double> terms;
  int zeros = 0;
  for (int l = 0; l < 62 && zeros < 4; ++l) {
    const long long shift = (1LL << l) - 1;
    double in = 0.0;
    if (min_level + shift <= top)
      for (std::size_t n = 0; n < N; ++n) in += std::pow(norm_of(E(Z[n], level(n) + shift), p, J), pp);
    const double t = std::exp2(static_cast<double>(l) * wexp) * std::pow(in, 1.0 / pp);
    terms.push_back(t);
    zeros = t == 0.0 ? zeros + 1 : 0;
  }
  // a declared model describes the untruncated family: fit it before the truncation zeros
  if (lower_tail)
    while (terms.size() > 1 && terms.back() == 0.0) terms.pop_back();
  out.lower = evaluate_series(terms, 1, lower_tail);  // term l sits at index l + 1
  return out;
}

}  // namespace mgale
