#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mgale/dilated_series.hpp"
#include "mgale/torus_fn.hpp"

namespace mgale {

// mu_c = prod_n (1 + Re c_n e^{2 pi i lambda_n t}); lambda_n | lambda_{n+1}, ratio >= 3.
// The factor n puts c_n/2 at +lambda_n and conj(c_n)/2 at -lambda_n.
struct RieszProductSpec {
  std::vector<std::int64_t> lambdas;
  std::vector<cplx> cs;
  bool strict = false;  // require sup |c_n| < 1

  std::size_t size() const { return lambdas.size(); }
  void validate() const;
};

// P_N = prod_{n <= N}(1 + Re c_n e(lambda_n x)) on the 2^J grid; lambda_N < 2^{J-1}.
GridFunction riesz_partial_density(const RieszProductSpec& spec, std::size_t N, int J);

// Fourier coefficient of P_N at k from the unique expansion k = sum eps_n lambda_n.
cplx riesz_fourier_coeff(const RieszProductSpec& spec, std::size_t N, std::int64_t k);

// Grid points k/2^J drawn i.i.d. from the piecewise-constant density P_N.
std::vector<double> sample_mu(const RieszProductSpec& spec, std::size_t N, int J, std::size_t count,
                              std::uint64_t seed);

// weighted[k-1] = sup_n omega_inf(2^-k, f_n) (k log 2)^{1/2+eps}, k = 1..J. The
// hypothesis is read as holding when the finer half of the levels never rises
// more than 10% above the coarser half.
struct ModulusHypothesis {
  double epsilon = 0.0;
  std::vector<double> weighted;
  bool holds = false;
};
ModulusHypothesis riesz_modulus_hypothesis(std::span<const FourierFunction> f, double epsilon, int J);

struct RieszRun {
  OscillationDiagnostic diagnostic;
  ModulusHypothesis hypothesis;
  std::vector<cplx> means;  // E_{mu} f_n(lambda_n .) at depth N
  std::size_t depth = 0;
  bool in_hypothesis = false;  // strict spec and modulus hypothesis
};

// sum_n a_n (f_n(lambda_n x) - E f_n(lambda_n .)) at points drawn from P_N on
// the 2^J grid, each refined by random lower binary digits. f holds one shared
// function or one per term.
RieszRun riesz_series_run(const RieszProductSpec& spec, std::size_t N, std::span<const FourierFunction> f,
                          const std::vector<cplx>& a, std::span<const std::size_t> checkpoints,
                          std::size_t sample_count, std::uint64_t seed, int J = 20, double epsilon = 0.1);

}  // namespace mgale
