#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mgale/audit_report.hpp"
#include "mgale/binary_point.hpp"
#include "mgale/modulus.hpp"
#include "mgale/tail_model.hpp"
#include "mgale/torus_fn.hpp"

namespace mgale {

// Dilation factors n_0 < n_1 < ...: an explicit list or q^{e0 + k}.
class FrequencySequence {
 public:
  FrequencySequence() = default;
  static FrequencySequence list(const std::vector<std::int64_t>& n);
  static FrequencySequence power(std::uint64_t base, std::uint64_t first_exponent, std::size_t count);
  // "pow:q:K" (exponents 0..K), "pow:q:e0:count", or a comma separated list
  static FrequencySequence parse(const std::string& text);

  std::size_t size() const { return freqs_.size(); }
  const Freq& operator[](std::size_t k) const { return freqs_[k]; }
  const std::vector<Freq>& values() const { return freqs_; }
  bool is_power() const { return base_ != 0; }
  std::uint64_t base() const { return base_; }
  std::uint64_t first_exponent() const { return first_exponent_; }
  std::string describe() const;
  std::vector<std::int64_t> as_int64() const;  // throws past int64
  FrequencySequence subsequence(std::size_t start, std::size_t step) const;

 private:
  std::vector<Freq> freqs_;
  std::uint64_t base_ = 0;
  std::uint64_t first_exponent_ = 0;
};

// inf_k n_{k+1}/n_k
double lacunarity_ratio(const FrequencySequence& freqs);
double lacunarity_ratio(std::span<const std::int64_t> freqs);

using Generator = std::variant<FourierFunction, LacunarySeries>;

// sum_k a_k f_k(n_k x); generators holds one shared f or one f_k per index.
struct SeriesSpec {
  std::vector<cplx> coeffs;
  FrequencySequence freqs;
  std::vector<Generator> generators;

  std::size_t length() const { return coeffs.size(); }
  const Generator& generator(std::size_t k) const;
  void validate() const;
};

double generator_l2_norm(const Generator& g);
// exact point values on the 2^J grid (no truncation error for lacunary terms)
GridFunction render_generator(const Generator& g, int J);

enum class AliasPolicy { warn, strict };

// S_0..S_N on the grid; aliased() is set on every sum once a dilated
// frequency reaches 2^{J-1}; strict mode rejects that instead.
std::vector<GridFunction> partial_sums(const SeriesSpec& spec, std::size_t N, int J,
                                       AliasPolicy policy = AliasPolicy::warn);
GridFunction maximal_function(const SeriesSpec& spec, std::size_t N, int J,
                              AliasPolicy policy = AliasPolicy::warn);

// Exact partial sums at points with long binary expansions.
class SeriesEvaluator {
 public:
  SeriesEvaluator(const SeriesSpec& spec, std::size_t N);
  ~SeriesEvaluator();
  SeriesEvaluator(SeriesEvaluator&&) noexcept;

  std::size_t required_bits() const;
  // S_0..S_N at x
  std::vector<cplx> partial_sums_at(const BinaryPoint& x) const;
  std::string method() const;  // "correlation", "direct" or "table"

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class Verdict { converging, diverging, inconclusive };
std::string to_string(Verdict v);

struct OscillationDiagnostic {
  std::vector<std::size_t> checkpoints;
  std::vector<double> median;
  std::vector<double> q90;
  Verdict verdict = Verdict::inconclusive;
  double trend_slope = 0.0;  // log-log slope of the median against N'
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  std::string method;

  std::string csv() const;  // checkpoint, median_osc, q90_osc
};

// Deterministic rule over the window of checkpoints >= last/100 (the last two
// decades, or all checkpoints when fewer than two fall inside): converging when
// every median is 0 or the last is at most half the first; diverging when the
// medians increase strictly; inconclusive otherwise.
Verdict classify_trend(std::span<const std::size_t> checkpoints, std::span<const double> median);

// diameter of S_a..S_min(2a, last) for a = checkpoint
double oscillation_window(std::span<const cplx> partial_sums, std::size_t checkpoint);
// osc[i][s] = oscillation at checkpoint i for sample s
OscillationDiagnostic summarize_oscillation(std::span<const std::size_t> checkpoints,
                                            const std::vector<std::vector<double>>& osc, std::uint64_t seed,
                                            std::string method);

// osc(N') = max_{N' <= p,q <= min(2N', K-1)} |S_p(x) - S_q(x)| at uniformly
// drawn points x with random binary expansions.
OscillationDiagnostic oscillation_diagnostic(const SeriesSpec& spec,
                                             std::span<const std::size_t> checkpoints,
                                             std::size_t sample_size, std::uint64_t seed);

// lhs = ||E(f(m .)|F_n)||_p from exact block integrals, rhs = 2^n/m ||f||_p with
// ||f||_p on the 2^J grid. At p = 2 also the refined bound sqrt(l 2^n)/m ||f||_2,
// l = m mod 2^n.
struct ContractionAudit {
  AuditReport basic;
  std::optional<AuditReport> refined;
  bool passed() const { return basic.passed && (!refined || refined->passed); }
};
ContractionAudit contraction_audit(const FourierFunction& f, std::int64_t m, int n, double p, int J);

struct DilatedCriteria {
  double p = 2.0;
  std::size_t split = 1;          // number of interleaved sub-series
  std::vector<int> m;             // floor(log2 n_k)
  double series1 = 0.0;           // sum_l 2^{l(1-1/p)} (sum_k |a_k|^{p'} omega^{p'}(2 n_k/n_{k+2^l}))^{1/p'}
  double series2 = 0.0;           // sum_l 2^{l(1-1/p)} (sum_k |a_k|^{p'} (2^{m_{k+1-2^l}}/n_k)^{p'})^{1/p'} ||f||_p
  double series1_sup = 0.0;       // coefficient-free forms, sup over k
  double series2_sup = 0.0;
  SeriesCriterion condition;      // sum omega_p(2^-n)/n^{1/p}
  bool finite = false;            // condition finite and lacunary
  AuditReport term_audit;         // actual terms against their bounds, all (k, l) resolvable on the grid
  std::string claim;
};

// One shared generator f. The modulus comes from the 2^J grid (or the
// supplied profile), the condition's tail from the declared model or detection.
DilatedCriteria theo_dilated_criteria(const SeriesSpec& spec, double p, int J,
                                      const std::optional<TailModel>& tail = std::nullopt,
                                      const std::optional<ModulusProfile>& profile = std::nullopt);

// a_n f(2^n x), n = 1..K, with f = sum_{k=1}^{G} sin(2 pi 2^k x)/(k prod_{i<=m} L_i(k)),
// a_n = 1/(sqrt(n prod_{i<m} L_i(n)) L_m(n)); G defaults to K.
double iterated_log(int m, double x);
SeriesSpec gaposhkin_example(int m, std::size_t K, std::size_t generator_terms = 0);

struct DivergenceProbe {
  std::vector<std::size_t> checkpoints;
  std::vector<double> probability;  // P(S*_N^2 >= lambda D sum_{k<=N} |a_k|^2)
  std::vector<double> floor;        // Paley-Zygmund lower bound per checkpoint
  double lambda = 0.5;
  double q = 1.0;
  bool maintained = false;          // every probability >= min floor > 0
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
};

// D = riesz_lower^2. Rejects coefficient sequences that look square summable
// (|a_k|^2 decaying faster than k^{-1.05}).
DivergenceProbe nsc_divergence_probe(const SeriesSpec& spec, double p, double riesz_lower,
                                     std::span<const std::size_t> checkpoints, std::uint64_t seed,
                                     std::size_t sample_size = 400, double lambda = 0.5);

}  // namespace mgale
