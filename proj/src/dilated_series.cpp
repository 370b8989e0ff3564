#include "mgale/dilated_series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"
#include "mgale/dyadic_martingale.hpp"
#include "mgale/numfmt.hpp"

namespace mgale {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx unit(double phase) { return std::polar(1.0, kTwoPi * phase); }

// one signed Fourier term of a generator
struct Term {
  Freq m;
  bool negative;
  cplx c;
};

std::vector<Term> generator_terms(const Generator& g) {
  std::vector<Term> out;
  if (const auto* f = std::get_if<FourierFunction>(&g)) {
    for (const auto& [m, c] : f->coefficients()) {
      if (m == 0) continue;
      out.push_back({Freq::from_int(m < 0 ? -m : m), m < 0, c});
    }
  } else {
    const auto& lac = std::get<LacunarySeries>(g);
    for (std::size_t j = 0; j < lac.amplitudes.size(); ++j) {
      if (lac.amplitudes[j] == 0.0) continue;
      const Freq m = Freq::power(lac.base, lac.first_exponent + j);
      out.push_back({m, false, cplx(0.0, -lac.amplitudes[j] / 2)});
      out.push_back({m, true, cplx(0.0, lac.amplitudes[j] / 2)});
    }
  }
  return out;
}

double generator_max_log2(const Generator& g) {
  if (const auto* f = std::get_if<FourierFunction>(&g)) {
    const auto m = f->max_abs_frequency();
    return m == 0 ? -kInf : std::log2(static_cast<double>(m));
  }
  const auto& lac = std::get<LacunarySeries>(g);
  if (lac.amplitudes.empty()) return -kInf;
  return std::log2(static_cast<double>(lac.base)) *
         static_cast<double>(lac.first_exponent + lac.amplitudes.size() - 1);
}

// base^e mod 2^64 by wrapping multiplication
std::uint64_t wrapped_power(std::uint64_t base, std::uint64_t e) {
  std::uint64_t r = 1, b = base;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

double quantile(std::vector<double> v, double a) {
  std::sort(v.begin(), v.end());
  if (a == 0.5) {
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
  const auto idx = static_cast<std::size_t>(std::ceil(a * static_cast<double>(v.size()))) - 1;
  return v[std::min(idx, v.size() - 1)];
}

double cross(const cplx& o, const cplx& a, const cplx& b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

// largest pairwise distance in a point set
double diameter(std::span<const cplx> pts) {
  bool real = true;
  for (const auto& z : pts) real = real && z.imag() == 0.0;
  if (real) {
    double lo = kInf, hi = -kInf;
    for (const auto& z : pts) {
      lo = std::min(lo, z.real());
      hi = std::max(hi, z.real());
    }
    return hi - lo;
  }
  std::vector<cplx> p(pts.begin(), pts.end());
  std::sort(p.begin(), p.end(), [](const cplx& a, const cplx& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  std::vector<cplx> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = hull.size();
    for (const auto& z : p) {
      while (hull.size() >= base + 2 && cross(hull[hull.size() - 2], hull.back(), z) <= 0) hull.pop_back();
      hull.push_back(z);
    }
    hull.pop_back();
    std::reverse(p.begin(), p.end());
  }
  if (hull.empty()) hull.push_back(p.front());
  double d = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j) d = std::max(d, std::abs(hull[i] - hull[j]));
  return d;
}

// average of e(j x) over [k/2^n, (k+1)/2^n) is e(jk/2^n) e(theta/2) sin(pi theta)/(pi theta),
// theta = j/2^n; exactly 0 when 2^n divides j
std::vector<cplx> block_averages(const FourierFunction& f, std::int64_t m, int n) {
  if (n < 0 || n > 24) throw std::invalid_argument("block level must be in [0, 24]");
  const std::size_t B = std::size_t{1} << n;
  const unsigned __int128 mod2 = static_cast<unsigned __int128>(B) * 2;
  std::vector<cplx> out(B);
  for (const auto& [j, c] : f.coefficients()) {
    const __int128 jm = static_cast<__int128>(j) * m;
    const __int128 r2s = jm % static_cast<__int128>(mod2);
    const auto r2 = static_cast<std::uint64_t>(r2s < 0 ? r2s + static_cast<__int128>(mod2) : r2s);
    if (r2 % B == 0) continue;
    const double theta = static_cast<double>(jm) / static_cast<double>(B);
    const double red = static_cast<double>(r2) / static_cast<double>(B);  // theta mod 2
    const cplx factor = c * unit(static_cast<double>(r2) / static_cast<double>(mod2)) *
                        (std::sin(std::numbers::pi * red) / (std::numbers::pi * theta));
    const std::uint64_t step = r2 % B;
    std::uint64_t idx = 0;
    for (std::size_t k = 0; k < B; ++k) {
      out[k] += factor * unit(static_cast<double>(idx) / static_cast<double>(B));
      idx = (idx + step) % B;
    }
  }
  return out;
}

double block_norm(const std::vector<cplx>& v, double p) {
  if (std::isinf(p)) {
    double mx = 0.0;
    for (const auto& z : v) mx = std::max(mx, std::abs(z));
    return mx;
  }
  double acc = 0.0;
  for (const auto& z : v) acc += std::pow(std::abs(z), p);
  return std::pow(acc / static_cast<double>(v.size()), 1.0 / p);
}

}  // namespace

FrequencySequence FrequencySequence::list(const std::vector<std::int64_t>& n) {
  FrequencySequence s;
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (n[k] < 1) throw std::invalid_argument("frequencies must be positive");
    if (k > 0 && n[k] <= n[k - 1]) throw std::invalid_argument("frequencies must increase strictly");
    s.freqs_.push_back(Freq::from_int(n[k]));
  }
  return s;
}

FrequencySequence FrequencySequence::power(std::uint64_t base, std::uint64_t first_exponent,
                                           std::size_t count) {
  if (base < 2) throw std::invalid_argument("power rule needs base >= 2");
  FrequencySequence s;
  s.base_ = base;
  s.first_exponent_ = first_exponent;
  for (std::size_t k = 0; k < count; ++k) s.freqs_.push_back(Freq::power(base, first_exponent + k));
  return s;
}

FrequencySequence FrequencySequence::parse(const std::string& text) {
  auto number = [&](const std::string& t) -> std::uint64_t {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || t.empty() || v < 0) throw std::invalid_argument("bad frequency rule: " + text);
    return static_cast<std::uint64_t>(v);
  };
  if (text.rfind("pow:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(text.substr(4));
    for (std::string t; std::getline(ss, t, ':');) parts.push_back(t);
    if (parts.size() == 2) return power(number(parts[0]), 0, number(parts[1]) + 1);
    if (parts.size() == 3) return power(number(parts[0]), number(parts[1]), number(parts[2]));
    throw std::invalid_argument("bad frequency rule: " + text);
  }
  std::vector<std::int64_t> v;
  std::stringstream ss(text);
  for (std::string t; std::getline(ss, t, ',');) v.push_back(static_cast<std::int64_t>(number(t)));
  if (v.empty()) throw std::invalid_argument("empty frequency list");
  return list(v);
}

std::string FrequencySequence::describe() const {
  if (is_power())
    return "pow:" + std::to_string(base_) + ":" + std::to_string(first_exponent_) + ":" +
           std::to_string(freqs_.size());
  std::string s;
  for (std::size_t k = 0; k < freqs_.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(freqs_[k].to_int64());
  }
  return s;
}

std::vector<std::int64_t> FrequencySequence::as_int64() const {
  std::vector<std::int64_t> v;
  for (const auto& f : freqs_) v.push_back(f.to_int64());
  return v;
}

FrequencySequence FrequencySequence::subsequence(std::size_t start, std::size_t step) const {
  if (step == 0) throw std::invalid_argument("step must be positive");
  FrequencySequence s;
  for (std::size_t k = start; k < freqs_.size(); k += step) s.freqs_.push_back(freqs_[k]);
  return s;
}

double lacunarity_ratio(std::span<const std::int64_t> freqs) {
  if (freqs.size() < 2) throw std::invalid_argument("lacunarity needs at least 2 frequencies");
  double r = kInf;
  for (std::size_t k = 0; k + 1 < freqs.size(); ++k)
    r = std::min(r, static_cast<double>(freqs[k + 1]) / static_cast<double>(freqs[k]));
  return r;
}

double lacunarity_ratio(const FrequencySequence& freqs) {
  if (freqs.size() < 2) throw std::invalid_argument("lacunarity needs at least 2 frequencies");
  bool small = true;
  for (const auto& f : freqs.values()) small = small && f.fits_int64();
  if (small) {
    const auto v = freqs.as_int64();
    return lacunarity_ratio(std::span<const std::int64_t>(v));
  }
  double r = kInf;
  for (std::size_t k = 0; k + 1 < freqs.size(); ++k) r = std::min(r, std::exp2(freqs[k + 1].log2() - freqs[k].log2()));
  return r;
}

const Generator& SeriesSpec::generator(std::size_t k) const {
  return generators.size() == 1 ? generators.front() : generators.at(k);
}

void SeriesSpec::validate() const {
  if (coeffs.size() != freqs.size()) throw std::invalid_argument("one frequency per coefficient");
  if (generators.empty() || (generators.size() != 1 && generators.size() != coeffs.size()))
    throw std::invalid_argument("need one shared generator or one per index");
  for (std::size_t k = 0; k + 1 < freqs.size(); ++k)
    if (!(freqs[k] < freqs[k + 1])) throw std::invalid_argument("frequencies must increase strictly");
  for (const auto& g : generators) {
    if (const auto* f = std::get_if<FourierFunction>(&g)) {
      if (f->coefficient(0) != cplx(0.0)) throw std::invalid_argument("generator must have zero mean");
    } else if (std::get<LacunarySeries>(g).base < 2) {
      throw std::invalid_argument("lacunary base must be >= 2");
    }
  }
  for (const auto& a : coeffs)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw std::invalid_argument("coefficients must be finite");
}

double generator_l2_norm(const Generator& g) {
  if (const auto* f = std::get_if<FourierFunction>(&g)) return f->l2_norm();
  return std::get<LacunarySeries>(g).l2_norm();
}

GridFunction render_generator(const Generator& g, int J) {
  if (const auto* f = std::get_if<FourierFunction>(&g)) return render(*f, J);
  const auto& lac = std::get<LacunarySeries>(g);
  if (lac.base < 2) throw std::invalid_argument("lacunary base must be >= 2");
  if (J < 0 || J > 30) throw std::invalid_argument("grid resolution must be in [0, 30]");
  const std::size_t N = std::size_t{1} << J;
  const std::uint64_t mask = N - 1;
  std::vector<cplx> folded(N);
  std::uint64_t r = wrapped_power(lac.base, lac.first_exponent);
  for (double b : lac.amplitudes) {
    folded[r & mask] += cplx(0.0, -b / 2);
    folded[(0 - r) & mask] += cplx(0.0, b / 2);
    r *= lac.base;
  }
  GridFunction out(J, fft::backward(folded), ValueKind::real);
  out.mark_aliased(generator_max_log2(g) >= J - 1);
  return out;
}

std::vector<GridFunction> partial_sums(const SeriesSpec& spec, std::size_t N, int J, AliasPolicy policy) {
  spec.validate();
  if (N >= spec.length()) throw std::invalid_argument("partial sum index beyond the series length");
  std::vector<GridFunction> rendered;
  for (const auto& g : spec.generators) rendered.push_back(render_generator(g, J));
  std::vector<GridFunction> out;
  GridFunction acc = GridFunction::zeros(J);
  bool aliased = false;
  for (std::size_t k = 0; k <= N; ++k) {
    const auto& g = spec.generator(k);
    const double top = spec.freqs[k].log2() + generator_max_log2(g);
    if (top >= J - 1) {
      if (policy == AliasPolicy::strict)
        throw std::invalid_argument("dilated frequency of term " + std::to_string(k) +
                                    " reaches the aliasing limit 2^{J-1}");
      aliased = true;
    }
    const auto& base = rendered.size() == 1 ? rendered.front() : rendered[k];
    if (spec.coeffs[k] != cplx(0.0)) acc += spec.coeffs[k] * dilate_on_grid(base, spec.freqs[k].residue(J));
    acc.mark_aliased(aliased);
    out.push_back(acc);
  }
  return out;
}

GridFunction maximal_function(const SeriesSpec& spec, std::size_t N, int J, AliasPolicy policy) {
  const auto sums = partial_sums(spec, N, J, policy);
  std::vector<double> mx(sums.front().size(), 0.0);
  for (const auto& s : sums)
    for (std::size_t i = 0; i < mx.size(); ++i) mx[i] = std::max(mx[i], std::abs(s[i]));
  auto g = GridFunction::from_real(J, mx);
  g.mark_aliased(sums.back().aliased());
  return g;
}

struct SeriesEvaluator::Impl {
  enum class Path { correlation, direct, table } path = Path::direct;
  std::vector<cplx> coeffs;
  std::vector<Freq> freqs;
  std::size_t bits = 0;
  // correlation path
  std::uint64_t first_shift = 0;
  std::vector<double> amplitudes;
  // direct path
  std::vector<std::vector<Term>> terms;  // one list per generator
  bool shared = true;
  // table path
  std::vector<cplx> table;

  const std::vector<Term>& terms_for(std::size_t k) const { return shared ? terms.front() : terms[k]; }
};

SeriesEvaluator::SeriesEvaluator(const SeriesSpec& spec, std::size_t N) : impl_(std::make_unique<Impl>()) {
  spec.validate();
  if (N >= spec.length()) throw std::invalid_argument("partial sum index beyond the series length");
  auto& I = *impl_;
  I.coeffs.assign(spec.coeffs.begin(), spec.coeffs.begin() + static_cast<std::ptrdiff_t>(N + 1));
  I.freqs.assign(spec.freqs.values().begin(), spec.freqs.values().begin() + static_cast<std::ptrdiff_t>(N + 1));
  const auto* lac = spec.generators.size() == 1 ? std::get_if<LacunarySeries>(&spec.generators.front()) : nullptr;
  if (lac && lac->base == 2 && spec.freqs.is_power() && spec.freqs.base() == 2) {
    I.path = Impl::Path::correlation;
    I.first_shift = spec.freqs.first_exponent() + static_cast<std::uint64_t>(lac->first_exponent);
    I.amplitudes = lac->amplitudes;
    I.bits = I.first_shift + N + I.amplitudes.size() + 192;
    return;
  }
  I.shared = spec.generators.size() == 1;
  for (const auto& g : spec.generators) I.terms.push_back(generator_terms(g));
  const auto* four = I.shared ? std::get_if<FourierFunction>(&spec.generators.front()) : nullptr;
  if (four && four->support_size() > 256 && four->max_abs_frequency() < (std::int64_t{1} << 17)) {
    I.path = Impl::Path::table;
    const auto rendered = render(*four, 20);
    I.table.assign(rendered.samples().begin(), rendered.samples().end());
  }
  std::uint64_t top = 0;
  for (std::size_t k = 0; k <= N; ++k)
    for (const auto& t : I.terms_for(k)) {
      const Freq prod = I.freqs[k] * t.m;  // throws when the product cannot be resolved
      top = std::max(top, prod.shift);
      if (I.path == Impl::Path::table) break;
    }
  I.bits = top + 192;
}

SeriesEvaluator::~SeriesEvaluator() = default;
SeriesEvaluator::SeriesEvaluator(SeriesEvaluator&&) noexcept = default;

std::size_t SeriesEvaluator::required_bits() const { return impl_->bits; }

std::string SeriesEvaluator::method() const {
  switch (impl_->path) {
    case Impl::Path::correlation: return "correlation";
    case Impl::Path::direct: return "direct";
    case Impl::Path::table: return "table";
  }
  return "?";
}

std::vector<cplx> SeriesEvaluator::partial_sums_at(const BinaryPoint& x) const {
  const auto& I = *impl_;
  const std::size_t K = I.coeffs.size();
  std::vector<cplx> terms(K);
  if (I.path == Impl::Path::correlation) {
    // v_k = sum_i b_i sin(2 pi 2^{s + k + i} x), a correlation of b with u
    const std::size_t G = I.amplitudes.size();
    if (G > 0) {
      std::vector<cplx> u(K + G - 1), rb(G);
      for (std::size_t t = 0; t < u.size(); ++t) u[t] = std::sin(kTwoPi * x.phase(Freq::pow2(I.first_shift + t)));
      for (std::size_t i = 0; i < G; ++i) rb[i] = I.amplitudes[G - 1 - i];
      const auto conv = fft::convolve(u, rb);
      for (std::size_t k = 0; k < K; ++k) terms[k] = I.coeffs[k] * conv[k + G - 1].real();
    }
  } else if (I.path == Impl::Path::table) {
    const double N = static_cast<double>(I.table.size());
    for (std::size_t k = 0; k < K; ++k) {
      if (I.coeffs[k] == cplx(0.0)) continue;
      const double pos = x.phase(I.freqs[k]) * N;
      const auto i0 = static_cast<std::size_t>(pos) % I.table.size();
      const double w = pos - std::floor(pos);
      const cplx v = (1.0 - w) * I.table[i0] + w * I.table[(i0 + 1) % I.table.size()];
      terms[k] = I.coeffs[k] * v;
    }
  } else {
    for (std::size_t k = 0; k < K; ++k) {
      if (I.coeffs[k] == cplx(0.0)) continue;
      cplx acc = 0.0;
      for (const auto& t : I.terms_for(k)) {
        const cplx e = unit(x.phase(I.freqs[k] * t.m));
        acc += t.c * (t.negative ? std::conj(e) : e);
      }
      terms[k] = I.coeffs[k] * acc;
    }
  }
  std::vector<cplx> out(K);
  cplx s = 0.0;
  for (std::size_t k = 0; k < K; ++k) out[k] = (s += terms[k]);
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::converging: return "converging";
    case Verdict::diverging: return "diverging";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string OscillationDiagnostic::csv() const {
  std::ostringstream os;
  os << "checkpoint,median_osc,q90_osc\n";
  for (std::size_t i = 0; i < checkpoints.size(); ++i)
    os << checkpoints[i] << ',' << format_double(median[i]) << ',' << format_double(q90[i]) << '\n';
  return os.str();
}

Verdict classify_trend(std::span<const std::size_t> checkpoints, std::span<const double> median) {
  if (checkpoints.size() != median.size() || checkpoints.empty())
    throw std::invalid_argument("one median per checkpoint");
  bool all_zero = true;
  for (double m : median) all_zero = all_zero && m == 0.0;
  if (all_zero) return Verdict::converging;
  const double last = static_cast<double>(checkpoints.back());
  std::size_t from = 0;
  while (from < checkpoints.size() && static_cast<double>(checkpoints[from]) * 100.0 < last) ++from;
  if (checkpoints.size() - from < 2) from = 0;
  if (checkpoints.size() - from < 2) return Verdict::inconclusive;
  if (median.back() <= 0.5 * median[from]) return Verdict::converging;
  bool increasing = true;
  for (std::size_t i = from + 1; i < median.size(); ++i) increasing = increasing && median[i] > median[i - 1];
  return increasing ? Verdict::diverging : Verdict::inconclusive;
}

double oscillation_window(std::span<const cplx> partial_sums, std::size_t checkpoint) {
  if (checkpoint >= partial_sums.size()) throw std::invalid_argument("checkpoint beyond the partial sums");
  const std::size_t b = std::min(2 * checkpoint, partial_sums.size() - 1);
  return diameter(partial_sums.subspan(checkpoint, b - checkpoint + 1));
}

OscillationDiagnostic summarize_oscillation(std::span<const std::size_t> checkpoints,
                                            const std::vector<std::vector<double>>& osc, std::uint64_t seed,
                                            std::string method) {
  if (osc.size() != checkpoints.size() || checkpoints.empty())
    throw std::invalid_argument("one oscillation sample per checkpoint");
  OscillationDiagnostic out;
  out.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  out.sample_size = osc.front().size();
  out.seed = seed;
  out.method = std::move(method);
  for (const auto& v : osc) {
    if (v.empty()) throw std::invalid_argument("empty oscillation sample");
    out.median.push_back(quantile(v, 0.5));
    out.q90.push_back(quantile(v, 0.9));
  }
  out.verdict = classify_trend(out.checkpoints, out.median);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < out.checkpoints.size(); ++i)
    if (out.median[i] > 0.0 && out.checkpoints[i] > 0) {
      x.push_back(static_cast<double>(out.checkpoints[i]));
      y.push_back(out.median[i]);
    }
  if (x.size() >= 2) out.trend_slope = fit_loglog(x, y).slope;
  return out;
}

OscillationDiagnostic oscillation_diagnostic(const SeriesSpec& spec, std::span<const std::size_t> checkpoints,
                                             std::size_t sample_size, std::uint64_t seed) {
  if (sample_size < 100) throw std::invalid_argument("oscillation diagnostic needs at least 100 sample points");
  if (checkpoints.empty()) throw std::invalid_argument("no checkpoints");
  const std::size_t K = spec.length();
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] >= K) throw std::invalid_argument("checkpoint beyond the series length");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) throw std::invalid_argument("checkpoints must increase");
  }
  const std::size_t top = std::min(2 * checkpoints.back(), K - 1);
  SeriesEvaluator eval(spec, top);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> osc(checkpoints.size(), std::vector<double>(sample_size));
  for (std::size_t s = 0; s < sample_size; ++s) {
    const auto x = BinaryPoint::random(rng, eval.required_bits());
    const auto S = eval.partial_sums_at(x);
    for (std::size_t i = 0; i < checkpoints.size(); ++i) osc[i][s] = oscillation_window(S, checkpoints[i]);
  }
  return summarize_oscillation(checkpoints, osc, seed, eval.method());
}

ContractionAudit contraction_audit(const FourierFunction& f, std::int64_t m, int n, double p, int J) {
  if (f.coefficient(0) != cplx(0.0)) throw std::invalid_argument("contraction audit needs a zero-mean function");
  if (m < 1) throw std::invalid_argument("dilation factor must be >= 1");
  if (!(p >= 1.0)) throw std::invalid_argument("norm exponent must be >= 1");
  const double lhs = block_norm(block_averages(f, m, n), p);
  const double scale = std::ldexp(1.0, n) / static_cast<double>(m);
  const std::string ctx = "contraction m=" + std::to_string(m) + " n=" + std::to_string(n) + " p=" + format_double(p);
  ContractionAudit out;
  out.basic = inequality_report(lhs, scale * lp_norm(render(f, J), p), scale, ctx);
  if (p == 2.0) {
    const std::int64_t ell = m % (std::int64_t{1} << n);
    const double c = std::sqrt(static_cast<double>(ell) * std::ldexp(1.0, n)) / static_cast<double>(m);
    out.refined = inequality_report(lhs, c * f.l2_norm(), c, ctx + " l=" + std::to_string(ell));
  }
  return out;
}

DilatedCriteria theo_dilated_criteria(const SeriesSpec& spec, double p, int J, const std::optional<TailModel>& tail,
                                      const std::optional<ModulusProfile>& profile) {
  spec.validate();
  if (!(p > 1.0)) throw std::invalid_argument("criteria need p > 1");
  if (spec.generators.size() != 1) throw std::invalid_argument("criteria need one shared generator");
  const double q = lacunarity_ratio(spec.freqs);
  if (!(q > 1.0)) throw std::invalid_argument("frequencies are not lacunary (ratio <= 1)");
  const Generator& g = spec.generators.front();
  const GridFunction base = render_generator(g, J);
  const ModulusProfile prof = profile ? *profile : modulus_profile(base, p);
  if (prof.p != p) throw std::invalid_argument("profile exponent differs from p");
  const double fnorm = lp_norm(base, p);
  const double pp = std::min(2.0, p);
  const double wexp = 1.0 - 1.0 / p;

  DilatedCriteria out;
  out.p = p;
  out.split = q >= 2.0 ? 1 : static_cast<std::size_t>(std::ceil(1.0 / std::log2(q)));
  for (const auto& n : spec.freqs.values()) out.m.push_back(static_cast<int>(n.floor_log2()));

  // omega(delta) with delta rounded up to the next dyadic 2^-n
  auto omega = [&](double log2_delta) {
    int n = static_cast<int>(std::floor(-log2_delta));
    n = std::clamp(n, 0, prof.max_level());
    return prof.at(n);
  };

  double worst = 0.0;
  std::size_t checked = 0;
  const auto* four = std::get_if<FourierFunction>(&g);
  const double gtop = generator_max_log2(g);
  for (std::size_t s = 0; s < out.split; ++s) {
    std::vector<std::size_t> idx;
    for (std::size_t k = s; k < spec.length(); k += out.split) idx.push_back(k);
    const std::size_t K = idx.size();
    for (std::size_t ell = 0; (std::size_t{1} << ell) < K; ++ell) {
      const std::size_t step = std::size_t{1} << ell;
      const double w = std::exp2(static_cast<double>(ell) * wexp);
      double in1 = 0.0, sup1 = 0.0, in2 = 0.0, sup2 = 0.0;
      for (std::size_t i = 0; i + step < K; ++i) {
        const auto& nk = spec.freqs[idx[i]];
        const double om = omega(1.0 + nk.log2() - spec.freqs[idx[i + step]].log2());
        in1 += std::pow(std::abs(spec.coeffs[idx[i]]), pp) * std::pow(om, pp);
        sup1 = std::max(sup1, om);
      }
      for (std::size_t i = step; i < K; ++i) {
        const auto& nk = spec.freqs[idx[i]];
        const double b = std::exp2(static_cast<double>(out.m[idx[i + 1 - step]]) - nk.log2());
        in2 += std::pow(std::abs(spec.coeffs[idx[i]]) * b, pp);
        sup2 = std::max(sup2, b);
      }
      out.series1 += w * std::pow(in1, 1.0 / pp);
      out.series2 += w * std::pow(in2, 1.0 / pp) * fnorm;
      out.series1_sup += w * sup1;
      out.series2_sup += w * sup2 * fnorm;

      // the bounds behind both sums, term by term, where the grid resolves them
      for (std::size_t i = 0; i < K; ++i) {
        const auto& nk = spec.freqs[idx[i]];
        if (!nk.fits_int64() || nk.log2() + gtop >= J - 1) continue;
        const GridFunction gk = dilate_on_grid(base, nk.residue(J));
        if (i + step < K) {
          const int lev = out.m[idx[i + step]];
          if (lev <= J) {
            const double actual = lp_norm(gk - cond_exp(gk, lev), p);
            const double bound = 2.0 * omega(nk.log2() - lev);
            worst = std::max(worst, bound > 0 ? actual / bound : (actual > 0 ? kInf : 0.0));
            ++checked;
          }
        }
        if (four && i >= step) {
          const int lev = out.m[idx[i - step]];
          if (lev <= 24) {
            const double actual = block_norm(block_averages(*four, nk.to_int64(), lev), p);
            const double bound = std::exp2(lev - nk.log2()) * fnorm;
            worst = std::max(worst, bound > 0 ? actual / bound : (actual > 0 ? kInf : 0.0));
            ++checked;
          }
        }
      }
    }
  }
  out.term_audit = inequality_report(worst, 1.0, 2.0,
                                     "dilated term bounds checked=" + std::to_string(checked) +
                                         " (lhs = worst actual/bound ratio)");
  out.condition = criterion_sqrt_n(prof, tail);
  out.finite = out.condition.finite();
  const std::string pstr = format_double(pp);
  out.claim = out.finite ? "modulus condition finite: every l^" + pstr + " coefficient sequence gives a.e. convergence"
                         : "modulus condition infinite: the criterion does not apply";
  return out;
}

double iterated_log(int m, double x) {
  if (m < 0) throw std::invalid_argument("iteration depth must be >= 0");
  double v = x;
  if (m == 0) return 1.0;
  for (int i = 0; i < m; ++i) v = std::max(1.0, std::log(v));
  return v;
}

SeriesSpec gaposhkin_example(int m, std::size_t K, std::size_t generator_terms) {
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  if (K < 2) throw std::invalid_argument("K must be >= 2");
  const std::size_t G = generator_terms ? generator_terms : K;
  SeriesSpec spec;
  for (std::size_t n = 1; n <= K; ++n) {
    const double x = static_cast<double>(n);
    double prod = x;
    for (int i = 0; i < m; ++i) prod *= iterated_log(i, x);
    spec.coeffs.emplace_back(1.0 / (std::sqrt(prod) * iterated_log(m, x)));
  }
  spec.freqs = FrequencySequence::power(2, 1, K);
  LacunarySeries f{2, 1, {}};
  for (std::size_t k = 1; k <= G; ++k) {
    const double x = static_cast<double>(k);
    double prod = x;
    for (int i = 0; i <= m; ++i) prod *= iterated_log(i, x);
    f.amplitudes.push_back(1.0 / prod);
  }
  spec.generators.emplace_back(std::move(f));
  return spec;
}

DivergenceProbe nsc_divergence_probe(const SeriesSpec& spec, double p, double riesz_lower,
                                     std::span<const std::size_t> checkpoints, std::uint64_t seed,
                                     std::size_t sample_size, double lambda) {
  if (!(riesz_lower > 0.0)) throw std::invalid_argument("riesz lower bound must be positive");
  if (!(p > 2.0)) throw std::invalid_argument("probe needs p > 2");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0,1)");
  if (checkpoints.empty()) throw std::invalid_argument("no checkpoints");
  spec.validate();
  const std::size_t K = spec.length();
  for (std::size_t i = 0; i < checkpoints.size(); ++i)
    if (checkpoints[i] >= K || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
      throw std::invalid_argument("checkpoints must increase within the series");
  // decay exponent of |a_k|^2 over the second half of the range
  std::vector<double> x, y;
  for (std::size_t k = K / 2; k < K; ++k)
    if (std::abs(spec.coeffs[k]) > 0.0) {
      x.push_back(static_cast<double>(k + 1));
      y.push_back(std::norm(spec.coeffs[k]));
    }
  if (x.size() < 2 || fit_loglog(x, y).slope < -1.05)
    throw std::invalid_argument("coefficients look square summable; the probe needs a divergent sum of squares");

  const double D = riesz_lower * riesz_lower;
  const double qq = p / 2.0;
  SeriesEvaluator eval(spec, checkpoints.back());
  std::mt19937_64 rng(seed);
  std::vector<double> energy(K + 1, 0.0);
  for (std::size_t k = 0; k < K; ++k) energy[k + 1] = energy[k] + std::norm(spec.coeffs[k]);
  std::vector<std::vector<double>> Z(checkpoints.size(), std::vector<double>(sample_size));
  for (std::size_t s = 0; s < sample_size; ++s) {
    const auto pt = BinaryPoint::random(rng, eval.required_bits());
    const auto S = eval.partial_sums_at(pt);
    double run = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < S.size() && next < checkpoints.size(); ++k) {
      run = std::max(run, std::norm(S[k]));
      if (k == checkpoints[next]) Z[next++][s] = run / energy[k + 1];
    }
  }
  DivergenceProbe out;
  out.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  out.lambda = lambda;
  out.q = qq;
  out.sample_size = sample_size;
  out.seed = seed;
  for (const auto& zs : Z) {
    double hit = 0.0, mq = 0.0;
    for (double z : zs) {
      hit += z >= lambda * D ? 1.0 : 0.0;
      mq += std::pow(z, qq);
    }
    out.probability.push_back(hit / static_cast<double>(zs.size()));
    const double norm_q = std::pow(mq / static_cast<double>(zs.size()), 1.0 / qq);
    out.floor.push_back(norm_q > 0 ? std::pow((1.0 - lambda) * D / norm_q, qq / (qq - 1.0)) : 0.0);
  }
  const double fl = *std::min_element(out.floor.begin(), out.floor.end());
  out.maintained = fl > 0.0;
  for (double pr : out.probability) out.maintained = out.maintained && pr >= fl;
  return out;
}

}  // namespace mgale
