#include "mgale/symbolic.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mgale/tail_model.hpp"

namespace mgale {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string word_text(const std::vector<int>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "." : "") + std::to_string(w[i]);
  return s;
}

std::size_t words_from(const SymbolicSpace& space, int start) {
  std::size_t n = 1;
  for (int j = start; j <= space.depth(); ++j) n *= static_cast<std::size_t>(space.alphabet[j - 1]);
  return n;
}

void check_potentials(const SymbolicSpace& space, const PotentialSeq& pot) {
  if (static_cast<int>(pot.g.size()) != space.depth()) throw std::invalid_argument("need one potential per coordinate");
  for (int n = 1; n <= space.depth(); ++n)
    if (pot.g[n - 1].start() != n || pot.g[n - 1].size() != words_from(space, n))
      throw std::invalid_argument("g_n must be a function of x_n..x_D");
}

// Q_j: h on x_j..x_D -> sum_y g_j(y, x_{j+1}..) h(y, x_{j+1}..) / sum_y g_j(y, x_{j+1}..)
CylinderFunction average_step(const SymbolicSpace& space, const PotentialSeq& pot, const CylinderFunction& h, int j) {
  const auto& g = pot.g[j - 1];
  CylinderFunction out(space, j + 1);
  const std::size_t block = out.size();
  const std::size_t lead = j < space.depth() ? block / static_cast<std::size_t>(space.alphabet[j]) : 1;
  for (std::size_t t = 0; t < block; ++t) {
    if (!out.admissible(t)) continue;
    const int next = j < space.depth() ? static_cast<int>(t / lead) : 0;
    double num = 0.0, den = 0.0;
    for (int y = 0; y < space.alphabet[j - 1]; ++y) {
      if (j < space.depth() && !space.allowed(j, y, next)) continue;
      const std::size_t k = static_cast<std::size_t>(y) * block + t;
      num += g[k] * h[k];
      den += g[k];
    }
    out[t] = num / den;
  }
  return out;
}

}  // namespace

bool SymbolicSpace::allowed(int n, int a, int b) const {
  return incidence.empty() || incidence[n - 1][a][b] != 0;
}

SymbolicSpace SymbolicSpace::full(std::vector<int> alphabet) {
  SymbolicSpace s;
  s.alphabet = std::move(alphabet);
  s.validate();
  return s;
}

void SymbolicSpace::validate() const {
  const int D = depth();
  if (D < 1) throw std::invalid_argument("symbolic space needs at least one coordinate");
  double words = 1.0;
  for (int l : alphabet) {
    if (l < 2) throw std::invalid_argument("alphabet sizes must be >= 2");
    words *= l;
  }
  if (words > static_cast<double>(1 << 20)) throw std::invalid_argument("more than 2^20 cylinders at this depth");
  if (transitivity < 0) throw std::invalid_argument("transitivity window must be >= 0");
  if (incidence.empty()) return;
  if (static_cast<int>(incidence.size()) != D - 1) throw std::invalid_argument("need D - 1 incidence matrices");
  for (int n = 1; n < D; ++n) {
    const auto& A = incidence[n - 1];
    if (static_cast<int>(A.size()) != alphabet[n - 1]) throw std::invalid_argument("incidence rows must match l_n");
    std::vector<int> col(static_cast<std::size_t>(alphabet[n]), 0);
    for (const auto& row : A) {
      if (static_cast<int>(row.size()) != alphabet[n]) throw std::invalid_argument("incidence columns must match l_{n+1}");
      int hits = 0;
      for (std::size_t b = 0; b < row.size(); ++b) {
        if (row[b] != 0 && row[b] != 1) throw std::invalid_argument("incidence entries must be 0 or 1");
        hits += row[b];
        col[b] += row[b];
      }
      if (hits == 0) throw std::invalid_argument("incidence row without a 1");
    }
    if (std::count(col.begin(), col.end(), 0) > 0) throw std::invalid_argument("incidence column without a 1");
  }
  for (int n = 1; n + transitivity <= D - 1; ++n) {
    auto P = incidence[n - 1];
    for (int j = n + 1; j <= n + transitivity; ++j) {
      const auto& B = incidence[j - 1];
      std::vector<std::vector<int>> R(P.size(), std::vector<int>(B.front().size(), 0));
      for (std::size_t a = 0; a < P.size(); ++a)
        for (std::size_t k = 0; k < B.size(); ++k)
          if (P[a][k])
            for (std::size_t b = 0; b < B[k].size(); ++b) R[a][b] |= B[k][b];
      P = std::move(R);
    }
    for (const auto& row : P)
      if (std::count(row.begin(), row.end(), 0) > 0)
        throw std::invalid_argument("incidence product over the transitivity window is not positive");
  }
}

CylinderFunction::CylinderFunction(const SymbolicSpace& space, int start) : start_(start) {
  if (start < 1 || start > space.depth() + 1) throw std::invalid_argument("cylinder function start out of range");
  radix_.assign(space.alphabet.begin() + (start - 1), space.alphabet.end());
  values_.assign(words_from(space, start), 0.0);
  if (space.incidence.empty()) return;
  std::vector<int> w(radix_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    decode(i, w);
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
      if (!space.allowed(start + static_cast<int>(k), w[k], w[k + 1])) {
        values_[i] = kNaN;
        break;
      }
  }
}

void CylinderFunction::decode(std::size_t i, std::vector<int>& word) const {
  word.resize(radix_.size());
  for (std::size_t k = radix_.size(); k-- > 0;) {
    word[k] = static_cast<int>(i % static_cast<std::size_t>(radix_[k]));
    i /= static_cast<std::size_t>(radix_[k]);
  }
}

double CylinderFunction::at(std::span<const int> word) const {
  if (word.size() != radix_.size()) throw std::invalid_argument("word length does not match the function");
  std::size_t i = 0;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (word[k] < 0 || word[k] >= radix_[k]) throw std::invalid_argument("symbol outside the alphabet");
    i = i * static_cast<std::size_t>(radix_[k]) + static_cast<std::size_t>(word[k]);
  }
  if (std::isnan(values_[i])) throw std::invalid_argument("word is not admissible");
  return values_[i];
}

double CylinderFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values_)
    if (!std::isnan(v)) m = std::max(m, std::abs(v));
  return m;
}

CylinderFunction CylinderFunction::lift(const SymbolicSpace& space, int s) const {
  if (s > start_) throw std::invalid_argument("lift only adds leading coordinates");
  CylinderFunction out(space, s);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out.admissible(i)) out[i] = values_[i % values_.size()];
  return out;
}

void PotentialSeq::validate(const SymbolicSpace& space) const {
  check_potentials(space, *this);
  for (int n = 1; n <= space.depth(); ++n) {
    const auto& gn = g[n - 1];
    for (std::size_t i = 0; i < gn.size(); ++i)
      if (gn.admissible(i) && !(gn[i] >= 0.0)) throw std::invalid_argument("potentials must be nonnegative");
    const CylinderFunction tails(space, n + 1);
    const std::size_t block = tails.size();
    const std::size_t lead = n < space.depth() ? block / static_cast<std::size_t>(space.alphabet[n]) : 1;
    for (std::size_t t = 0; t < block; ++t) {
      if (!tails.admissible(t)) continue;
      double s = 0.0;
      for (int y = 0; y < space.alphabet[n - 1]; ++y)
        if (n == space.depth() || space.allowed(n, y, static_cast<int>(t / lead)))
          s += gn[static_cast<std::size_t>(y) * block + t];
      if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("potential g_" + std::to_string(n) + " is not normalized");
    }
  }
}

CylinderFunction pn_apply(const SymbolicSpace& space, const PotentialSeq& pot, const CylinderFunction& f, int n) {
  check_potentials(space, pot);
  if (n < 0 || n > space.depth()) throw std::invalid_argument("P_n needs 0 <= n <= depth");
  auto h = f.lift(space, 1);
  for (int j = 1; j <= n; ++j) h = average_step(space, pot, h, j);
  return h;
}

Variation var_m(const SymbolicSpace& space, const CylinderFunction& f, int m) {
  if (m < 0 || m > space.depth()) throw std::invalid_argument("var_m needs 0 <= m <= depth");
  const auto F = f.lift(space, 1);
  const std::size_t block = words_from(space, m + 1);
  Variation out;
  std::size_t best_lo = 0, best_hi = 0;
  for (std::size_t b = 0; b < F.size(); b += block) {
    std::size_t lo = F.size(), hi = F.size();
    for (std::size_t i = b; i < b + block; ++i) {
      if (!F.admissible(i)) continue;
      if (lo == F.size() || F[i] < F[lo]) lo = i;
      if (hi == F.size() || F[i] > F[hi]) hi = i;
    }
    if (lo != F.size() && F[hi] - F[lo] > out.value) {
      out.value = F[hi] - F[lo];
      best_lo = lo;
      best_hi = hi;
    }
  }
  if (out.value > 0.0) {
    F.decode(best_hi, out.x);
    F.decode(best_lo, out.y);
  }
  return out;
}

AuditReport cond_gn_check(const SymbolicSpace& space, const PotentialSeq& pot, double alpha, double A) {
  check_potentials(space, pot);
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  double needed = 0.0;
  std::string where = "no variation";
  for (int n = 2; n <= space.depth(); ++n) {
    CylinderFunction L = pot.g[n - 1];
    for (std::size_t i = 0; i < L.size(); ++i) {
      if (!L.admissible(i)) continue;
      if (!(L[i] > 0.0)) throw std::invalid_argument("log g_n undefined: g_" + std::to_string(n) + " has zeros");
      L[i] = std::log(L[i]);
    }
    for (int m = n + 1; m <= space.depth(); ++m) {
      const auto v = var_m(space, L, m);
      const double a = v.value * std::pow(m - n, alpha);
      if (a > needed) {
        needed = a;
        where = "n=" + std::to_string(n) + " m=" + std::to_string(m) + " x=" + word_text(v.x) + " y=" + word_text(v.y);
      }
    }
  }
  return inequality_report(needed, A, needed, "var_m(log g_n) (m-n)^alpha <= A; worst " + where);
}

Equilibrium equilibrium(const SymbolicSpace& space, const PotentialSeq& pot, double tol, int max_iterations) {
  check_potentials(space, pot);
  const int D = space.depth();
  const CylinderFunction shape(space, 1);
  const std::size_t S = shape.size();
  // g_j over full words, divided by its sum over y_j
  std::vector<std::vector<double>> gh(static_cast<std::size_t>(D));
  for (int j = 1; j <= D; ++j) {
    const auto& g = pot.g[j - 1];
    std::vector<double> sums(words_from(space, j + 1), 0.0);
    const std::size_t block = sums.size();
    for (std::size_t k = 0; k < g.size(); ++k)
      if (g.admissible(k)) sums[k % block] += g[k];
    auto& out = gh[j - 1];
    out.assign(S, 0.0);
    for (std::size_t i = 0; i < S; ++i)
      if (shape.admissible(i)) out[i] = g[i % g.size()] / sums[i % block];
  }
  Equilibrium mu;
  std::size_t admissible = 0;
  for (std::size_t i = 0; i < S; ++i) admissible += shape.admissible(i);
  mu.weights.assign(S, 0.0);
  for (std::size_t i = 0; i < S; ++i)
    if (shape.admissible(i)) mu.weights[i] = 1.0 / static_cast<double>(admissible);
  std::vector<double> G(S), marg;
  for (; mu.iterations < max_iterations;) {
    ++mu.iterations;
    double change = 0.0;
    std::fill(G.begin(), G.end(), 1.0);
    for (int n = 1; n <= D; ++n) {
      // P_n^* mu (x) = G_n(x) mu(x_{n+1}.. x_D fixed)
      const std::size_t block = words_from(space, n + 1);
      marg.assign(block, 0.0);
      for (std::size_t i = 0; i < S; ++i) marg[i % block] += mu.weights[i];
      for (std::size_t i = 0; i < S; ++i) {
        G[i] *= gh[n - 1][i];
        const double w = shape.admissible(i) ? G[i] * marg[i % block] : 0.0;
        change = std::max(change, std::abs(w - mu.weights[i]));
        mu.weights[i] = w;
      }
    }
    if (change < tol) return mu;
  }
  throw std::runtime_error("equilibrium iteration did not become stationary");
}

double Equilibrium::cylinder(const SymbolicSpace& space, std::span<const int> prefix) const {
  if (prefix.size() > static_cast<std::size_t>(space.depth())) throw std::invalid_argument("prefix longer than the depth");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < prefix.size(); ++k) idx = idx * static_cast<std::size_t>(space.alphabet[k]) + prefix[k];
  const std::size_t block = words_from(space, static_cast<int>(prefix.size()) + 1);
  double s = 0.0;
  for (std::size_t i = idx * block; i < (idx + 1) * block; ++i) s += weights[i];
  return s;
}

double Equilibrium::integrate(const CylinderFunction& f, const SymbolicSpace& space) const {
  const auto F = f.lift(space, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i)
    if (F.admissible(i)) s += weights[i] * F[i];
  return s;
}

Sandwich cylinder_sandwich(const SymbolicSpace& space, const PotentialSeq& pot, const Equilibrium& mu) {
  check_potentials(space, pot);
  const CylinderFunction shape(space, 1);
  const std::size_t S = shape.size();
  Sandwich out;
  std::vector<double> G(S, 1.0);
  for (int n = 1; n <= space.depth(); ++n) {
    const auto& g = pot.g[n - 1];
    const std::size_t block = words_from(space, n + 1);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t b = 0; b < S; b += block) {
      double cyl = 0.0;
      for (std::size_t i = b; i < b + block; ++i) cyl += mu.weights[i];
      for (std::size_t i = b; i < b + block; ++i) {
        if (!shape.admissible(i)) continue;
        G[i] *= g[i % g.size()];
        const double r = cyl / G[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
    out.lower.push_back(lo);
    out.upper.push_back(hi);
  }
  return out;
}

std::int64_t riesz_word_index(const RieszProductSpec& spec, std::span<const int> word) {
  const std::size_t D = word.size();
  if (D >= spec.size()) throw std::invalid_argument("word deeper than the Riesz frequencies");
  std::int64_t k = 0;
  for (std::size_t j = 1; j <= D; ++j) k += word[j - 1] * (spec.lambdas[D] / spec.lambdas[j]);
  return k;
}

RieszSymbolic riesz_potentials(const RieszProductSpec& spec, int depth) {
  spec.validate();
  if (spec.lambdas[0] != 1) throw std::invalid_argument("the torus identification needs lambda_0 = 1");
  if (depth < 1 || static_cast<std::size_t>(depth) >= spec.size())
    throw std::invalid_argument("depth needs lambda_1..lambda_D");
  std::vector<int> alphabet;
  for (int n = 1; n <= depth; ++n) alphabet.push_back(static_cast<int>(spec.lambdas[n] / spec.lambdas[n - 1]));
  RieszSymbolic out{SymbolicSpace::full(alphabet), {}};
  const std::int64_t top = spec.lambdas[depth];
  for (int n = 0; n < depth; ++n) {
    // lambda_n x mod 1 = (sum_{k > n} x_k lambda_D/lambda_k) / (lambda_D/lambda_n)
    const double period = static_cast<double>(top / spec.lambdas[n]);
    const cplx c = spec.cs[n];
    const double l = alphabet[n];
    out.potentials.g.push_back(CylinderFunction::from(out.space, n + 1, [&](std::span<const int> w) {
      std::int64_t r = 0;
      for (std::size_t i = 0; i < w.size(); ++i) r += w[i] * (top / spec.lambdas[n + 1 + i]);
      const double ph = 2.0 * std::numbers::pi * static_cast<double>(r) / period;
      return (1.0 + c.real() * std::cos(ph) - c.imag() * std::sin(ph)) / l;
    }));
  }
  out.potentials.validate(out.space);
  return out;
}

EstPnAudit est_pn_audit(const SymbolicSpace& space, const PotentialSeq& pot, std::span<const CylinderFunction> family,
                        double alpha, double B) {
  check_potentials(space, pot);
  if (!(alpha > 0.0) || !(B > 0.0)) throw std::invalid_argument("need alpha > 0 and B > 0");
  const int D = space.depth();
  if (static_cast<int>(family.size()) > D) throw std::invalid_argument("more functions than coordinates");
  for (int n = 1; n <= static_cast<int>(family.size()); ++n) {
    const auto& f = family[n - 1];
    if (f.start() < n + 1) throw std::invalid_argument("f_n must depend on x_{n+1}, ... only");
    if (n < 2) continue;
    if (f.sup_norm() > B * (1.0 + 1e-12)) throw std::invalid_argument("hypothesis violated: ||f_" + std::to_string(n) + "|| > B");
    for (int m = n + 1; m <= D; ++m)
      if (var_m(space, f, m).value > B / std::pow(m - n, alpha) * (1.0 + 1e-12))
        throw std::invalid_argument("hypothesis violated: var_" + std::to_string(m) + "(f_" + std::to_string(n) + ")");
  }
  EstPnAudit out;
  std::vector<double> worst(static_cast<std::size_t>(D) + 1, 0.0);
  for (int n = 2; n <= static_cast<int>(family.size()); ++n) {
    const auto& f = family[n - 1];
    const double scale = f.sup_norm();
    auto h = pn_apply(space, pot, f, n);
    for (int m = n + 1; m <= D; ++m) {
      h = average_step(space, pot, h, m);
      const double v = h.sup_norm();
      if (v <= 1e-13 * scale) continue;  // exact averaging leaves rounding only
      worst[static_cast<std::size_t>(m - n)] = std::max(worst[static_cast<std::size_t>(m - n)], v);
      const double d = m - n;
      out.fitted_C = std::max(out.fitted_C, v * std::pow(d, alpha) / std::pow(std::log1p(d), 1.0 + alpha));
    }
  }
  std::vector<double> x;
  for (int d = 1; d <= D; ++d)
    if (worst[static_cast<std::size_t>(d)] > 0.0) {
      out.gaps.push_back(d);
      out.worst.push_back(worst[static_cast<std::size_t>(d)]);
      x.push_back(d);
    }
  out.slope = out.gaps.size() >= 2 ? fit_loglog(x, out.worst).slope : -std::numeric_limits<double>::infinity();
  out.report = inequality_report(out.slope, -alpha + 0.2, out.fitted_C, "log-log slope of ||P_m f_n|| in m - n");
  return out;
}

double decreasing_criterion_symbolic(double C, double alpha, std::span<const cplx> a) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(C >= 0.0) || !std::isfinite(C)) throw std::invalid_argument("C must be finite and >= 0");
  double norm2 = 0.0;
  for (const auto& v : a) norm2 += std::norm(v);
  if (norm2 == 0.0 || C == 0.0) return 0.0;
  if (alpha <= 0.5) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (int l = 1;; ++l) {
    const double t = std::pow(l, 1.0 + alpha) * std::exp2(-l * (alpha - 0.5));
    sum += t;
    if (l > 10 && t < 1e-17 * sum) break;
  }
  return C * sum * std::sqrt(norm2);
}

}  // namespace mgale
