#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgale/dilated_series.hpp"
#include "mgale/tail_model.hpp"
#include "mgale/torus_fn.hpp"

namespace mgale {

// Transfer operator of the doubling map Tx = 2x mod 1 on Lebesgue measure:
// (Lf)^(m) = f^(2m).
FourierFunction transfer_apply(const FourierFunction& f);
FourierFunction transfer_power(const FourierFunction& f, int n);
// Lf(x) = (f(x/2) + f((x+1)/2))/2: samples of f on the 2^{J+1} grid give Lf on the 2^J grid.
GridFunction transfer_apply_pointwise(const GridFunction& f);

// E(g | T^{-m} B) = (L^m g) o T^m: keeps the frequencies divisible by 2^m.
FourierFunction tail_expectation(const FourierFunction& g, int m);

// ||L^n f||_2 for n = 0..N, exactly from coefficients
std::vector<double> transfer_norms(const Generator& f, int N);

struct TransferDecay {
  std::vector<double> norms;                 // n = 0..N
  SeriesCriterion criterion;                 // sum_{n >= 1} ||L^n f||_2/sqrt(n)
  // sum_{l >= 0} 2^{l/2} ||L^{2^l} f||_2 when a tail is known; term l has tail index l + 1
  std::optional<SeriesCriterion> condensed;

  std::string csv() const;  // n, norm, criterion_partial
};

// Zero-mean f only. Without declared models the tails must be detectable
// (criterion) or are left out (condensed).
TransferDecay transfer_decay(const Generator& f, int N, const std::optional<TailModel>& tail = std::nullopt,
                             const std::optional<TailModel>& condensed_tail = std::nullopt);

// ||L^n f||_2 / omega_2(2^-n, f) for n = 1..N with the modulus from the 2^J grid.
std::vector<double> lnorm_vs_modulus(const FourierFunction& f, int N, int J);

// Z_n = a_n f o T^n as the dilated series with n_k = 2^k, k = 0..K-1.
SeriesSpec ergodic_series_spec(const Generator& f, const std::vector<cplx>& a);

struct ErgodicRun {
  OscillationDiagnostic diagnostic;
  std::optional<TransferDecay> decay;
};

ErgodicRun ergodic_series_run(const Generator& f, const std::vector<cplx>& a,
                              std::span<const std::size_t> checkpoints, std::size_t sample_size,
                              std::uint64_t seed, const std::optional<TailModel>& tail = std::nullopt);

struct DecreasingCriteria {
  // sum_l 2^{l(1-1/p)} (sum_{n >= 2^l} ||Z_n - E_{l(n)-2^l+1} Z_n||_p^{p'})^{1/p'}
  double higher = 0.0;
  // sum_l 2^{l(1-1/p)} (sum_n ||E_{l(n)+2^l-1} Z_n||_p^{p'})^{1/p'}
  SeriesCriterion lower;
};

// levels empty means l(n) = n. For p != 2 the norms come from the 2^J grid.
// The lower sum's tail (term l at index l + 1) is declared or detected; the
// higher sum is finite by construction.
DecreasingCriteria decreasing_criteria(std::span<const FourierFunction> Z, double p,
                                       std::span<const int> levels = {},
                                       const std::optional<TailModel>& lower_tail = std::nullopt,
                                       int J = 16);

}  // namespace mgale
