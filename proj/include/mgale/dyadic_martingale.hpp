#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mgale/audit_report.hpp"
#include "mgale/tail_model.hpp"
#include "mgale/torus_fn.hpp"

namespace mgale {

// Block sums of a grid function at every dyadic level, built by pairwise
// addition so that conditional expectations compose bit-exactly.
class DyadicPyramid {
 public:
  explicit DyadicPyramid(const GridFunction& f);

  int depth() const { return J_; }
  // means of f over the 2^n intervals [k/2^n, (k+1)/2^n)
  std::vector<cplx> level_means(int n) const;
  GridFunction expectation(int n) const;

 private:
  int J_;
  bool real_;
  std::vector<std::vector<cplx>> sums_;  // sums_[n].size() == 2^n
};

GridFunction cond_exp(const GridFunction& f, int n);
// E^{n+1} f - E^n f
GridFunction detail(const GridFunction& f, int n);

struct DetailSequence {
  GridFunction base;
  std::vector<GridFunction> details;  // details[n] = D_n base, n = 0..J-1
  GridFunction reconstruct() const;
};

inline constexpr double kCenteringTolerance = 1e-12;

DetailSequence decompose(const GridFunction& f);

// ||D_n f||_p for n = 0..J-1, computed on the level-(n+1) block values.
std::vector<double> detail_norms(const GridFunction& f, double p);

// p' = min(2, p), the exponent of the martingale-difference sums
double rio_exponent(double p);
// max(1, sqrt(p - 1))
double rio_constant(double p);
// K_p = p/(p-1) max(1, sqrt(p-1))
double maximal_constant(double p);

AuditReport telescope_check(const GridFunction& f, int N1, int N2);
AuditReport rio_audit(const GridFunction& f, double p);

// increments[i] must satisfy E^{levels[i]} increments[i] = 0 and be
// F_{levels[i+1]}-measurable (or F_J for the last one); levels strictly increase.
AuditReport doob_maximal_audit(std::span<const GridFunction> increments,
                               std::span<const int> levels, double p);

struct GeneralCriteria {
  double higher = 0.0;  // sum_k (sum_n ||D_{l(n)+k} Z_n||_p^{p'})^{1/p'}
  double lower = 0.0;   // sum_{k>=1} (sum_n ||D_{l(n)} Z_{n+k}||_p^{p'})^{1/p'}
  AuditReport maximal;  // ||S*_N||_p <= K_p (higher + lower)
};

// levels empty means levels[n] = n. Detail indices run over l(n)..J-1.
GeneralCriteria theo_gen_criteria(std::span<const GridFunction> Z, std::span<const int> levels,
                                  double p);

struct BoundedDeltas {
  double delta1 = 0.0;
  double delta2 = 0.0;
};

// sup-norm analogues of the two criteria sums with exponent 2
BoundedDeltas bounded_deltas(std::span<const GridFunction> Z);

// For each p: ||S*||_p <= 2 K_p (delta1 + delta2).
std::vector<AuditReport> theo_bounded_moments(std::span<const GridFunction> Z, double delta1,
                                              double delta2, std::span<const double> p_list);

// Grid mean of exp(beta (S*)^2); reported, never asserted.
double exponential_moment(std::span<const GridFunction> Z, double beta);

GridFunction maximal_partial_sum(std::span<const GridFunction> Z);

// ||(sum_n |D_n f|^2)^{1/2}||_p / ||f||_p
double burkholder_ratio(const GridFunction& f, double p);

struct CondensationVerdict {
  bool series_converges = false;
  bool condensed_converges = false;
  bool hypothesis_holds = false;  // u_{n+m} <= K u_n on the given prefix
};

CondensationVerdict condensation_equivalent(std::span<const double> u,
                                            const std::optional<TailModel>& tail, double K);

struct WeightedValue {
  double value;
  double probability;
};

// lhs = ((1-lambda) E Z / ||Z||_q)^{q/(q-1)}, rhs = P(Z >= lambda E Z).
AuditReport paley_zygmund_audit(std::span<const WeightedValue> Z, double lambda, double q);

}  // namespace mgale
