#include "mgale/davenport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "mgale/modulus.hpp"
#include "mgale/numfmt.hpp"
#include "mgale/tail_model.hpp"

namespace mgale {

void DavenportSpec::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("davenport lambda must be positive");
  if (M < 1) throw std::invalid_argument("davenport truncation M must be >= 1");
  if (kind == Kind::split)
    throw std::invalid_argument("the split g + h form has no computable constant; use direct_sum");
}

double hurwitz_zeta(double s, double a) {
  if (s == 1.0) throw std::invalid_argument("zeta pole at s = 1");
  if (!(a > 0.0)) throw std::invalid_argument("hurwitz zeta needs a > 0");
  constexpr int kDirect = 24;
  constexpr int kCorrections = 10;
  const int n0 = std::max(0, kDirect - static_cast<int>(a));
  double head = 0.0;
  for (int n = n0 - 1; n >= 0; --n) head += std::pow(n + a, -s);
  const double x = n0 + a;
  double tail = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  // B_{2k}/(2k)! s(s+1)...(s+2k-2) x^{-s-2k+1}
  double rising = s;
  double xp = std::pow(x, -s - 1.0);
  for (int k = 1; k <= kCorrections; ++k) {
    tail += boost::math::bernoulli_b2n<double>(k) / boost::math::factorial<double>(2 * k) * rising * xp;
    rising *= (s + 2 * k - 1) * (s + 2 * k);
    xp /= x * x;
  }
  return head + tail;
}

double riemann_zeta(double s) { return hurwitz_zeta(s, 1.0); }

FourierFunction davenport_function(const DavenportSpec& spec) {
  spec.validate();
  FourierFunction f;
  for (std::int64_t m = 1; m <= spec.M; ++m) {
    const double a = std::pow(static_cast<double>(m), -spec.lambda);
    f.add(m, cplx(0.0, -0.5 * a));
    f.add(-m, cplx(0.0, 0.5 * a));
  }
  return f;
}

DavenportGrid eval_davenport(const DavenportSpec& spec, int J, bool require_l2_tail) {
  spec.validate();
  if (J < 1 || J > 40 || spec.M >= (std::int64_t{1} << (J - 1)))
    throw std::invalid_argument("davenport truncation M must stay below 2^{J-1}");
  if (require_l2_tail && spec.lambda <= 0.5)
    throw std::invalid_argument("L^2 tail requested but sum m^{-2 lambda} diverges for lambda <= 1/2");
  DavenportGrid out{render(davenport_function(spec), J), std::nullopt};
  if (spec.lambda > 0.5)
    out.l2_tail = std::sqrt(0.5 * hurwitz_zeta(2.0 * spec.lambda, static_cast<double>(spec.M + 1)));
  return out;
}

double smoothness_estimate(const DavenportSpec& spec, double p, int J) {
  const auto grid = eval_davenport(spec, J);
  const auto prof = modulus_profile(grid.values, p);
  const int top = std::min(J - 6, static_cast<int>(std::floor(std::log2(static_cast<double>(spec.M)))) - 3);
  if (top - 3 < 3) throw std::invalid_argument("profile too short to fit a smoothness exponent");
  std::vector<double> x, y;
  for (int n = 3; n <= top; ++n) {
    if (prof.at(n) <= 0.0) throw std::runtime_error("vanishing modulus; no exponent to fit");
    x.push_back(n * std::log(2.0));
    y.push_back(-std::log(prof.at(n)));
  }
  return fit_line(x, y).slope;
}

std::string GramMatrix::csv() const {
  std::ostringstream os;
  os << "n_j,n_k,entry\n";
  for (std::size_t j = 0; j < freqs.size(); ++j)
    for (std::size_t k = 0; k < freqs.size(); ++k)
      os << freqs[j] << ',' << freqs[k] << ','
         << format_double(entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))) << '\n';
  return os.str();
}

GramMatrix gram_matrix(std::span<const std::int64_t> freqs, double lambda) {
  if (!(lambda > 0.5)) throw std::invalid_argument("Gram entries are infinite for lambda <= 1/2");
  if (freqs.empty()) throw std::invalid_argument("Gram matrix needs at least one frequency");
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    if (freqs[j] < 1) throw std::invalid_argument("Gram frequencies must be positive");
    for (std::size_t k = 0; k < j; ++k)
      if (freqs[j] == freqs[k]) throw std::invalid_argument("Gram frequencies must be distinct");
  }
  GramMatrix g;
  g.freqs.assign(freqs.begin(), freqs.end());
  g.lambda = lambda;
  const auto K = static_cast<Eigen::Index>(freqs.size());
  const double diag = 0.5 * riemann_zeta(2.0 * lambda);
  g.entries.resize(K, K);
  for (Eigen::Index j = 0; j < K; ++j) {
    g.entries(j, j) = diag;
    for (Eigen::Index k = 0; k < j; ++k) {
      const auto nj = freqs[j], nk = freqs[k];
      const auto d = std::gcd(nj, nk);
      const double r = (static_cast<double>(d) / static_cast<double>(nj)) *
                       (static_cast<double>(d) / static_cast<double>(nk));
      g.entries(j, k) = g.entries(k, j) = diag * std::pow(r, lambda);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.entries, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("Gram eigen-solve failed");
  g.eigen_bounds = {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
  return g;
}

std::pair<double, double> riesz_constants(const GramMatrix& gram) {
  if (!(gram.eigen_bounds.first > 1e-10))
    throw std::runtime_error("numerically singular Gram matrix (min eigenvalue " +
                             format_double(gram.eigen_bounds.first) + ")");
  return {std::sqrt(gram.eigen_bounds.first), std::sqrt(gram.eigen_bounds.second)};
}

}  // namespace mgale
