#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mgale/audit_report.hpp"
#include "mgale/riesz_product.hpp"

namespace mgale {

// Coordinates x_1..x_D with x_n in {0..l_n - 1} and A_n(x_n, x_{n+1}) = 1;
// D = depth() is the truncation.
struct SymbolicSpace {
  std::vector<int> alphabet;                          // l_1..l_D
  std::vector<std::vector<std::vector<int>>> incidence;  // A_1..A_{D-1}, l_n x l_{n+1}, empty = full shift
  int transitivity = 0;                               // M: prod_{j=n}^{n+M} A_j > 0

  int depth() const { return static_cast<int>(alphabet.size()); }
  bool allowed(int n, int a, int b) const;  // A_n(a, b), n = 1..D-1
  // Every row and every column of each A_n holds a 1, the window product is
  // positive and the full word count stays below 2^20.
  void validate() const;

  static SymbolicSpace full(std::vector<int> alphabet);
};

// A function of x_start..x_D stored over all words in mixed radix (x_start
// most significant). Words that are not admissible hold NaN.
class CylinderFunction {
 public:
  CylinderFunction() = default;
  CylinderFunction(const SymbolicSpace& space, int start);  // zero on admissible words

  template <class F>
  static CylinderFunction from(const SymbolicSpace& space, int start, F&& f) {
    CylinderFunction out(space, start);
    std::vector<int> w(out.radix_.size());
    for (std::size_t i = 0; i < out.values_.size(); ++i) {
      if (std::isnan(out.values_[i])) continue;
      out.decode(i, w);
      out.values_[i] = f(std::span<const int>(w));
    }
    return out;
  }

  int start() const { return start_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double at(std::span<const int> word) const;  // word = (x_start..x_D)
  void decode(std::size_t i, std::vector<int>& word) const;
  bool admissible(std::size_t i) const { return !std::isnan(values_[i]); }
  double sup_norm() const;

  // the same function on x_s..x_D, s <= start
  CylinderFunction lift(const SymbolicSpace& space, int s) const;

 private:
  int start_ = 1;
  std::vector<int> radix_;
  std::vector<double> values_;
};

// g_n depends on x_n..x_D; g[n-1] has start n.
struct PotentialSeq {
  std::vector<CylinderFunction> g;
  // nonnegative, sum_{y: A_n(y, x_{n+1}) = 1} g_n(y, x_{n+1}..) = 1 to 1e-12
  void validate(const SymbolicSpace& space) const;
};

// P_n f = sum over admissible y_1..y_n of G_n(y, x_{n+1}..) f(y, x_{n+1}..),
// G_n = g_1...g_n. Applied as Q_n o ... o Q_1, each Q_j dividing by its own
// weight sum, so P_n 1 = 1 holds exactly in floating point.
CylinderFunction pn_apply(const SymbolicSpace& space, const PotentialSeq& pot, const CylinderFunction& f, int n);

struct Variation {
  double value = 0.0;
  std::vector<int> x, y;  // full words attaining it (empty when value is 0)
};
// sup |f(x) - f(y)| over admissible full words with x_1..x_m = y_1..y_m
Variation var_m(const SymbolicSpace& space, const CylinderFunction& f, int m);

// var_m(log g_n) <= A/(m-n)^alpha for 1 < n < m <= D. constant holds the
// smallest feasible A, context the worst (n, m) and its witness words.
AuditReport cond_gn_check(const SymbolicSpace& space, const PotentialSeq& pot, double alpha, double A);

// Fixed point of the adjoints P_n^* on full-word weights, iterated from the
// uniform weights until the largest change is below tol.
struct Equilibrium {
  std::vector<double> weights;  // indexed like a CylinderFunction with start 1
  int iterations = 0;
  double cylinder(const SymbolicSpace& space, std::span<const int> prefix) const;  // mu(I_n(x))
  double integrate(const CylinderFunction& f, const SymbolicSpace& space) const;
};
Equilibrium equilibrium(const SymbolicSpace& space, const PotentialSeq& pot, double tol = 1e-12,
                        int max_iterations = 10000);

// D_1 = min, D_2 = max of mu(I_n(x))/G_n(x) over admissible x, per n = 1..D.
struct Sandwich {
  std::vector<double> lower, upper;
};
Sandwich cylinder_sandwich(const SymbolicSpace& space, const PotentialSeq& pot, const Equilibrium& mu);

// Full shift with l_n = lambda_n/lambda_{n-1} and g_{n+1}(x) = (1 + Re c_n e(lambda_n x))/l_{n+1},
// x = sum_{k <= D} x_k/(l_1...l_k) (digits past the depth set to 0). Needs lambda_0 = 1.
struct RieszSymbolic {
  SymbolicSpace space;
  PotentialSeq potentials;
};
RieszSymbolic riesz_potentials(const RieszProductSpec& spec, int depth);
// Torus point of a word of coordinates 1..D as an exact fraction k/lambda_D.
std::int64_t riesz_word_index(const RieszProductSpec& spec, std::span<const int> word);

// ||P_m f_n||_inf for 1 < n < m <= D with f_n = family[n-1] depending on x_{n+1}...
struct EstPnAudit {
  std::vector<int> gaps;            // m - n with a nonzero value
  std::vector<double> worst;        // max_n ||P_m f_n||_inf at that gap
  double slope = 0.0;               // log-log slope of worst against the gap
  double fitted_C = 0.0;            // max ||P_m f_n|| (m-n)^alpha / log(1+m-n)^{1+alpha}
  AuditReport report;               // slope <= -alpha + 0.2
};
// Throws std::invalid_argument when ||f_n|| > B or var_m(f_n) > B/(m-n)^alpha.
EstPnAudit est_pn_audit(const SymbolicSpace& space, const PotentialSeq& pot,
                        std::span<const CylinderFunction> family, double alpha, double B);

// C sum_{l >= 1} l^{1+alpha} 2^{-l(alpha - 1/2)} ||a||_2: +inf for alpha <= 1/2, 0 for a = 0.
double decreasing_criterion_symbolic(double C, double alpha, std::span<const cplx> a);

}  // namespace mgale
