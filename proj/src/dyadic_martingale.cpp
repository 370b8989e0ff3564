#include "mgale/dyadic_martingale.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mgale/numfmt.hpp"

namespace mgale {

namespace {

void check_p(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must be > 1");
}

void check_centered(const GridFunction& f) {
  if (std::abs(f.mean()) > kCenteringTolerance)
    throw std::invalid_argument("input must have mean zero (|mean| <= 1e-12)");
}

double pow_norm_accumulate(std::span<const cplx> values, double p) {
  // returns sum |v|^p (p finite) or max |v| (p infinite)
  double acc = 0.0;
  if (std::isinf(p)) {
    for (const auto& v : values) acc = std::max(acc, std::abs(v));
    return acc;
  }
  if (p == 2.0) {
    for (const auto& v : values) acc += std::norm(v);
    return acc;
  }
  for (const auto& v : values) acc += std::pow(std::abs(v), p);
  return acc;
}

// ||E^b f - E^a f||_p for a <= b, from the block means.
double increment_norm(const std::vector<std::vector<cplx>>& means, int a, int b, double p) {
  if (a >= b) return 0.0;
  const auto& hi = means[b];
  const auto& lo = means[a];
  std::vector<cplx> diff(hi.size());
  const int shift = b - a;
  for (std::size_t k = 0; k < hi.size(); ++k) diff[k] = hi[k] - lo[k >> shift];
  const double acc = pow_norm_accumulate(diff, p);
  if (std::isinf(p)) return acc;
  return std::pow(acc / static_cast<double>(hi.size()), 1.0 / p);
}

double level_norm(const std::vector<cplx>& v, double p) {
  const double acc = pow_norm_accumulate(v, p);
  if (std::isinf(p)) return acc;
  return std::pow(acc / static_cast<double>(v.size()), 1.0 / p);
}

std::vector<std::vector<cplx>> all_means(const GridFunction& f) {
  DyadicPyramid pyr(f);
  std::vector<std::vector<cplx>> out;
  for (int n = 0; n <= f.resolution_log2(); ++n) out.push_back(pyr.level_means(n));
  return out;
}

}  // namespace

DyadicPyramid::DyadicPyramid(const GridFunction& f)
    : J_(f.resolution_log2()), real_(f.is_real()), sums_(J_ + 1) {
  sums_[J_].assign(f.samples().begin(), f.samples().end());
  for (int n = J_ - 1; n >= 0; --n) {
    const auto& up = sums_[n + 1];
    auto& cur = sums_[n];
    cur.resize(up.size() / 2);
    for (std::size_t k = 0; k < cur.size(); ++k) cur[k] = up[2 * k] + up[2 * k + 1];
  }
}

std::vector<cplx> DyadicPyramid::level_means(int n) const {
  if (n < 0 || n > J_) throw std::invalid_argument("filtration level out of range");
  // block sizes are powers of two, so the division is exact
  const double scale = std::ldexp(1.0, n - J_);
  std::vector<cplx> out(sums_[n].size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = sums_[n][k] * scale;
  return out;
}

GridFunction DyadicPyramid::expectation(int n) const {
  const auto means = level_means(n);
  const std::size_t block = std::size_t{1} << (J_ - n);
  std::vector<cplx> out(std::size_t{1} << J_);
  for (std::size_t k = 0; k < means.size(); ++k)
    std::fill(out.begin() + k * block, out.begin() + (k + 1) * block, means[k]);
  return GridFunction(J_, std::move(out), real_ ? ValueKind::real : ValueKind::complex);
}

GridFunction cond_exp(const GridFunction& f, int n) {
  if (n < 0 || n > f.resolution_log2())
    throw std::invalid_argument("conditional expectation level exceeds grid resolution");
  return DyadicPyramid(f).expectation(n);
}

GridFunction detail(const GridFunction& f, int n) {
  if (n < 0 || n >= f.resolution_log2())
    throw std::invalid_argument("detail level must be < grid resolution");
  DyadicPyramid pyr(f);
  return pyr.expectation(n + 1) - pyr.expectation(n);
}

GridFunction DetailSequence::reconstruct() const {
  GridFunction acc = GridFunction::constant(base.resolution_log2(), 0.0);
  acc += cond_exp(base, 0);
  for (const auto& d : details) acc += d;
  return acc;
}

DetailSequence decompose(const GridFunction& f) {
  check_centered(f);
  DyadicPyramid pyr(f);
  DetailSequence out{f, {}};
  GridFunction prev = pyr.expectation(0);
  for (int n = 0; n < f.resolution_log2(); ++n) {
    GridFunction next = pyr.expectation(n + 1);
    out.details.push_back(next - prev);
    prev = std::move(next);
  }
  return out;
}

std::vector<double> detail_norms(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("norm exponent must be >= 1");
  const auto means = all_means(f);
  std::vector<double> out;
  for (int n = 0; n < f.resolution_log2(); ++n) out.push_back(increment_norm(means, n, n + 1, p));
  return out;
}

double rio_exponent(double p) { return std::min(2.0, p); }

double rio_constant(double p) { return std::max(1.0, std::sqrt(p - 1.0)); }

double maximal_constant(double p) {
  check_p(p);
  return p / (p - 1.0) * rio_constant(p);
}

AuditReport telescope_check(const GridFunction& f, int N1, int N2) {
  const int J = f.resolution_log2();
  if (N1 < 0 || N1 > N2 || N2 > J - 1) throw std::invalid_argument("need 0 <= N1 <= N2 <= J-1");
  const auto means = all_means(f);
  double lhs = 0.0;
  for (int n = N1; n <= N2; ++n) {
    const double d = increment_norm(means, n, n + 1, 2.0);
    lhs += d * d;
  }
  const double r = increment_norm(means, N1, N2 + 1, 2.0);
  return equality_report(lhs, r * r,
                         "telescope N1=" + std::to_string(N1) + " N2=" + std::to_string(N2), 1e-10,
                         1e-300);
}

AuditReport rio_audit(const GridFunction& f, double p) {
  check_p(p);
  check_centered(f);
  const double pp = rio_exponent(p);
  double acc = 0.0;
  for (double d : detail_norms(f, p)) acc += std::pow(d, pp);
  const double c = rio_constant(p);
  return inequality_report(lp_norm(f, p), c * std::pow(acc, 1.0 / pp), c,
                           "rio p=" + format_double(p));
}

GridFunction maximal_partial_sum(std::span<const GridFunction> Z) {
  if (Z.empty()) throw std::invalid_argument("empty sequence");
  const int J = Z.front().resolution_log2();
  std::vector<cplx> s(std::size_t{1} << J);
  std::vector<double> mx(s.size(), 0.0);
  for (const auto& z : Z) {
    if (z.resolution_log2() != J) throw std::invalid_argument("grid resolutions differ");
    for (std::size_t k = 0; k < s.size(); ++k) {
      s[k] += z[k];
      mx[k] = std::max(mx[k], std::abs(s[k]));
    }
  }
  return GridFunction::from_real(J, mx);
}

AuditReport doob_maximal_audit(std::span<const GridFunction> increments,
                               std::span<const int> levels, double p) {
  check_p(p);
  if (increments.empty()) throw std::invalid_argument("no increments");
  if (levels.size() != increments.size()) throw std::invalid_argument("one level per increment");
  const int J = increments.front().resolution_log2();
  for (std::size_t i = 0; i < increments.size(); ++i) {
    if (levels[i] < 0 || levels[i] >= J || (i > 0 && levels[i] <= levels[i - 1]))
      throw std::invalid_argument("levels must increase strictly within [0, J)");
    const auto& inc = increments[i];
    const double scale = lp_norm(inc, kInf);
    DyadicPyramid pyr(inc);
    const double tol = 1e-12 * scale + 1e-300;
    if (lp_norm(pyr.expectation(levels[i]), kInf) > tol)
      throw std::invalid_argument("increment " + std::to_string(i) +
                                  " is not a martingale difference at its level");
    const int next = i + 1 < increments.size() ? levels[i + 1] : J;
    if (lp_norm(pyr.expectation(next) - inc, kInf) > tol)
      throw std::invalid_argument("increment " + std::to_string(i) +
                                  " is not measurable at the next level");
  }
  GridFunction total = increments.front();
  for (std::size_t i = 1; i < increments.size(); ++i) total += increments[i];
  const double c = p / (p - 1.0);
  return inequality_report(lp_norm(maximal_partial_sum(increments), p), c * lp_norm(total, p), c,
                           "doob p=" + format_double(p));
}

GeneralCriteria theo_gen_criteria(std::span<const GridFunction> Z, std::span<const int> levels,
                                  double p) {
  check_p(p);
  if (Z.empty()) throw std::invalid_argument("empty sequence");
  const int J = Z.front().resolution_log2();
  const std::size_t N = Z.size();
  std::vector<int> lv(levels.begin(), levels.end());
  if (lv.empty()) {
    lv.resize(N);
    for (std::size_t n = 0; n < N; ++n) lv[n] = static_cast<int>(std::min<std::size_t>(n, J));
  }
  if (lv.size() != N) throw std::invalid_argument("one level per series term");
  if (lv.front() != 0) throw std::invalid_argument("the filtration must start at the trivial level 0");
  for (std::size_t n = 0; n < N; ++n) {
    if (lv[n] < 0 || lv[n] > J || (n > 0 && lv[n] < lv[n - 1]))
      throw std::invalid_argument("levels must be non-decreasing within [0, J]");
    check_centered(Z[n]);
  }
  // filtration index j -> dyadic level, extended by one level per step past the end
  auto L = [&](std::size_t j) -> int {
    if (j < N) return lv[j];
    return static_cast<int>(std::min<std::size_t>(J, lv.back() + (j - N + 1)));
  };
  std::vector<std::vector<std::vector<cplx>>> means;
  means.reserve(N);
  for (const auto& z : Z) means.push_back(all_means(z));

  const double pp = rio_exponent(p);
  auto dnorm = [&](std::size_t zi, std::size_t j) {
    return increment_norm(means[zi], L(j), L(j + 1), p);
  };
  GeneralCriteria out;
  for (std::size_t k = 0;; ++k) {
    bool any = false;
    double inner = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      if (L(n + k) >= J) continue;
      any = true;
      inner += std::pow(dnorm(n, n + k), pp);
    }
    if (!any) break;
    out.higher += std::pow(inner, 1.0 / pp);
  }
  for (std::size_t k = 1; k < N; ++k) {
    double inner = 0.0;
    for (std::size_t n = 0; n + k < N; ++n) inner += std::pow(dnorm(n + k, n), pp);
    out.lower += std::pow(inner, 1.0 / pp);
  }
  const double Kp = maximal_constant(p);
  out.maximal = inequality_report(lp_norm(maximal_partial_sum(Z), p), Kp * (out.higher + out.lower),
                                  Kp, "general maximal p=" + format_double(p));
  return out;
}

BoundedDeltas bounded_deltas(std::span<const GridFunction> Z) {
  if (Z.empty()) throw std::invalid_argument("empty sequence");
  const int J = Z.front().resolution_log2();
  const std::size_t N = Z.size();
  std::vector<std::vector<std::vector<cplx>>> means;
  for (const auto& z : Z) means.push_back(all_means(z));
  BoundedDeltas d;
  // Z_k - E^{l+k} Z_k vanishes once l + k >= J
  for (int l = 0; l <= J; ++l) {
    double inner = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const int lev = static_cast<int>(std::min<std::size_t>(J, l + k));
      const double v = increment_norm(means[k], lev, J, kInf);
      inner += v * v;
    }
    d.delta1 += std::sqrt(inner);
  }
  for (std::size_t l = 0; l < N; ++l) {
    double inner = 0.0;
    for (std::size_t k = l; k < N; ++k) {
      const int lev = static_cast<int>(std::min<std::size_t>(J, k + 1 - l));
      const double v = level_norm(means[k][lev], kInf);
      inner += v * v;
    }
    d.delta2 += std::sqrt(inner);
  }
  return d;
}

std::vector<AuditReport> theo_bounded_moments(std::span<const GridFunction> Z, double delta1,
                                              double delta2, std::span<const double> p_list) {
  if (Z.empty()) throw std::invalid_argument("empty sequence");
  const GridFunction smax = maximal_partial_sum(Z);
  std::vector<AuditReport> out;
  for (double p : p_list) {
    if (!(p >= 2.0)) throw std::invalid_argument("moment chain needs p >= 2");
    const double c = 2.0 * maximal_constant(p);
    out.push_back(inequality_report(lp_norm(smax, p), c * (delta1 + delta2), c,
                                    "bounded moments p=" + format_double(p)));
  }
  return out;
}

double exponential_moment(std::span<const GridFunction> Z, double beta) {
  const GridFunction smax = maximal_partial_sum(Z);
  double acc = 0.0;
  for (const auto& v : smax.samples()) acc += std::exp(beta * v.real() * v.real());
  return acc / static_cast<double>(smax.size());
}

double burkholder_ratio(const GridFunction& f, double p) {
  check_p(p);
  const auto means = all_means(f);
  const int J = f.resolution_log2();
  std::vector<double> sq(f.size(), 0.0);
  for (int n = 0; n < J; ++n) {
    const std::size_t block = std::size_t{1} << (J - n - 1);
    for (std::size_t k = 0; k < means[n + 1].size(); ++k) {
      const double d = std::norm(means[n + 1][k] - means[n][k >> 1]);
      for (std::size_t i = k * block; i < (k + 1) * block; ++i) sq[i] += d;
    }
  }
  for (auto& v : sq) v = std::sqrt(v);
  const double denom = lp_norm(f, p);
  if (denom == 0.0) throw std::invalid_argument("zero function");
  return lp_norm(GridFunction::from_real(J, sq), p) / denom;
}

CondensationVerdict condensation_equivalent(std::span<const double> u,
                                            const std::optional<TailModel>& tail, double K) {
  if (!tail) throw std::invalid_argument("condensation test needs a declared tail model");
  for (double v : u)
    if (!(v > 0.0)) throw std::invalid_argument("sequence must be positive");
  CondensationVerdict out;
  out.hypothesis_holds = true;
  for (std::size_t n = 0; n < u.size() && out.hypothesis_holds; ++n)
    for (std::size_t m = n; m < u.size(); ++m)
      if (u[m] > K * u[n]) {
        out.hypothesis_holds = false;
        break;
      }
  const TailModel& t = *tail;
  out.series_converges = t.converges();
  // v_l = 2^l u(2^l), classified as a series in l
  switch (t.kind) {
    case TailModel::Kind::vanishing:
      out.condensed_converges = true;
      break;
    case TailModel::Kind::geometric:
      // 2^l r^{2^l}: superexponential decay when r < 1
      out.condensed_converges = t.ratio < 1.0;
      break;
    case TailModel::Kind::power_log: {
      const double a = t.exponent;
      if (std::abs(a - 1.0) > 1e-12) {
        out.condensed_converges = a > 1.0;  // geometric in l with ratio 2^{1-a}
      } else {
        // (l log 2)^{-b} (log(l log 2))^{-c}: a power-log series in l
        out.condensed_converges = TailModel::power_log(t.log_exponent, t.loglog_exponent).converges();
      }
      break;
    }
  }
  return out;
}

AuditReport paley_zygmund_audit(std::span<const WeightedValue> Z, double lambda, double q) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0,1)");
  if (!(q > 1.0)) throw std::invalid_argument("q must be > 1");
  double total = 0.0, mean = 0.0, mq = 0.0;
  for (const auto& z : Z) {
    if (z.value < 0.0 || z.probability < 0.0)
      throw std::invalid_argument("values and probabilities must be nonnegative");
    total += z.probability;
    mean += z.probability * z.value;
    mq += z.probability * std::pow(z.value, q);
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("probabilities must sum to 1");
  double prob = 0.0;
  for (const auto& z : Z)
    if (z.value >= lambda * mean) prob += z.probability;
  const double norm_q = std::pow(mq, 1.0 / q);
  const double bound = norm_q > 0.0 ? std::pow((1.0 - lambda) * mean / norm_q, q / (q - 1.0)) : 0.0;
  return inequality_report(bound, prob, 1.0,
                           "paley-zygmund lambda=" + format_double(lambda) + " q=" + format_double(q));
}

}  // namespace mgale
