#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mgale/torus_fn.hpp"

namespace mgale {

// f_lambda(x) = sum_{m >= 1} sin(2 pi m x)/m^lambda, truncated after M terms.
// The split f = g + h is named for completeness only; evaluation is direct.
struct DavenportSpec {
  enum class Kind { direct_sum, split };

  double lambda = 1.0;
  std::int64_t M = 1024;
  Kind kind = Kind::direct_sum;

  void validate() const;
};

// sum_{n >= 0} (n + a)^{-s} by Euler-Maclaurin, any s != 1, a > 0.
double hurwitz_zeta(double s, double a);
double riemann_zeta(double s);

FourierFunction davenport_function(const DavenportSpec& spec);

struct DavenportGrid {
  GridFunction values;
  // (sum_{m > M} m^{-2 lambda}/2)^{1/2}, the L^2 distance to the untruncated f
  std::optional<double> l2_tail;
};

// Requires M < 2^{J-1}. With require_l2_tail, lambda <= 1/2 is rejected.
DavenportGrid eval_davenport(const DavenportSpec& spec, int J, bool require_l2_tail = false);

// Exponent s in omega_p(delta) ~ delta^s, fitted on levels n in [3, min(J-6, log2 M - 3)].
double smoothness_estimate(const DavenportSpec& spec, double p, int J);

struct GramMatrix {
  std::vector<std::int64_t> freqs;
  double lambda = 1.0;
  Eigen::MatrixXd entries;
  std::pair<double, double> eigen_bounds;  // (min, max)

  std::string csv() const;  // n_j, n_k, entry
};

// entries(j,k) = zeta(2 lambda)/2 (gcd(n_j,n_k)^2/(n_j n_k))^lambda, lambda > 1/2
GramMatrix gram_matrix(std::span<const std::int64_t> freqs, double lambda);

// (sqrt(min eigenvalue), sqrt(max eigenvalue)); singular Gram rejected
std::pair<double, double> riesz_constants(const GramMatrix& gram);

}  // namespace mgale
