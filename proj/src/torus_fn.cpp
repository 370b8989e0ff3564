#include "mgale/torus_fn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace mgale {

namespace {

void check_resolution(int J) {
  if (J < 0 || J > 30) throw std::invalid_argument("grid resolution must be in [0, 30]");
}

}  // namespace

GridFunction::GridFunction(int resolution_log2, std::vector<cplx> samples, ValueKind kind)
    : J_(resolution_log2), samples_(std::move(samples)), kind_(kind) {
  check_resolution(J_);
  if (samples_.size() != (std::size_t{1} << J_))
    throw std::invalid_argument("grid function needs exactly 2^J samples");
  for (auto& v : samples_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("grid function samples must be finite");
    if (kind_ == ValueKind::real) v.imag(0.0);
  }
}

GridFunction GridFunction::zeros(int J) {
  check_resolution(J);
  return GridFunction(J, std::vector<cplx>(std::size_t{1} << J), ValueKind::real);
}

GridFunction GridFunction::constant(int J, double value) {
  check_resolution(J);
  return GridFunction(J, std::vector<cplx>(std::size_t{1} << J, cplx(value)), ValueKind::real);
}

GridFunction GridFunction::from_real(int J, const std::vector<double>& values) {
  return GridFunction(J, std::vector<cplx>(values.begin(), values.end()), ValueKind::real);
}

cplx GridFunction::mean() const {
  // pairwise summation keeps the centering tolerance meaningful at J = 20
  std::vector<cplx> buf(samples_.begin(), samples_.end());
  for (std::size_t len = buf.size(); len > 1; len /= 2)
    for (std::size_t i = 0; i < len / 2; ++i) buf[i] = buf[2 * i] + buf[2 * i + 1];
  return buf[0] / static_cast<double>(samples_.size());
}

std::vector<double> GridFunction::real_part() const {
  std::vector<double> out(samples_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = samples_[k].real();
  return out;
}

void GridFunction::check_compatible(const GridFunction& o) const {
  if (o.J_ != J_) throw std::invalid_argument("grid resolutions differ");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  check_compatible(o);
  for (std::size_t k = 0; k < samples_.size(); ++k) samples_[k] += o.samples_[k];
  if (!o.is_real()) kind_ = ValueKind::complex;
  aliased_ = aliased_ || o.aliased_;
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  check_compatible(o);
  for (std::size_t k = 0; k < samples_.size(); ++k) samples_[k] -= o.samples_[k];
  if (!o.is_real()) kind_ = ValueKind::complex;
  aliased_ = aliased_ || o.aliased_;
  return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
  for (auto& v : samples_) v *= s;
  if (s.imag() != 0.0) kind_ = ValueKind::complex;
  return *this;
}

FourierFunction::FourierFunction(const Map& coeffs) {
  for (const auto& [m, c] : coeffs) add(m, c);
}

FourierFunction FourierFunction::sine(std::int64_t m, double amplitude) {
  FourierFunction f;
  if (m == 0 || amplitude == 0.0) return f;
  f.add(m, cplx(0.0, -amplitude / 2));
  f.add(-m, cplx(0.0, amplitude / 2));
  return f;
}

FourierFunction FourierFunction::cosine(std::int64_t m, double amplitude) {
  FourierFunction f;
  if (m == 0) {
    f.add(0, amplitude);
    return f;
  }
  f.add(m, amplitude / 2);
  f.add(-m, amplitude / 2);
  return f;
}

FourierFunction FourierFunction::exponential(std::int64_t m, cplx amplitude) {
  FourierFunction f;
  f.add(m, amplitude);
  return f;
}

void FourierFunction::add(std::int64_t m, cplx c) {
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
    throw std::invalid_argument("Fourier amplitudes must be finite");
  if (m == std::numeric_limits<std::int64_t>::min())
    throw std::invalid_argument("frequency out of range");
  if (c == cplx(0.0)) return;
  auto [it, inserted] = coeffs_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx(0.0)) coeffs_.erase(it);
  }
}

cplx FourierFunction::coefficient(std::int64_t m) const {
  auto it = coeffs_.find(m);
  return it == coeffs_.end() ? cplx(0.0) : it->second;
}

std::int64_t FourierFunction::max_abs_frequency() const {
  std::int64_t r = 0;
  for (const auto& [m, c] : coeffs_) r = std::max(r, m < 0 ? -m : m);
  return r;
}

bool FourierFunction::is_conjugate_symmetric() const {
  for (const auto& [m, c] : coeffs_)
    if (coefficient(-m) != std::conj(c)) return false;
  return true;
}

cplx FourierFunction::evaluate(double x) const {
  cplx s = 0.0;
  for (const auto& [m, c] : coeffs_) {
    // reduce m*x mod 1 before the trig call to keep the phase accurate
    const double ph = std::fmod(static_cast<double>(m) * x, 1.0);
    s += c * std::polar(1.0, 2 * std::numbers::pi * ph);
  }
  return s;
}

double FourierFunction::l2_norm() const {
  double s = 0.0;
  for (const auto& [m, c] : coeffs_) s += std::norm(c);
  return std::sqrt(s);
}

FourierFunction& FourierFunction::operator+=(const FourierFunction& o) {
  for (const auto& [m, c] : o.coeffs_) add(m, c);
  return *this;
}

FourierFunction& FourierFunction::operator*=(cplx s) {
  if (s == cplx(0.0)) {
    coeffs_.clear();
    return *this;
  }
  for (auto& [m, c] : coeffs_) c *= s;
  return *this;
}

GridFunction render(const FourierFunction& f, int J) {
  check_resolution(J);
  const std::size_t n = std::size_t{1} << J;
  const auto mask = static_cast<std::uint64_t>(n - 1);
  std::vector<cplx> folded(n);
  bool aliased = false;
  for (const auto& [m, c] : f.coefficients()) {
    folded[static_cast<std::uint64_t>(m) & mask] += c;
    const std::uint64_t am = m < 0 ? static_cast<std::uint64_t>(-m) : static_cast<std::uint64_t>(m);
    if (2 * am >= n && am != 0) aliased = true;
  }
  auto samples = fft::backward(folded);
  const bool real = f.is_conjugate_symmetric();
  GridFunction g(J, std::move(samples), real ? ValueKind::real : ValueKind::complex);
  g.mark_aliased(aliased);
  return g;
}

double lp_norm(const GridFunction& f, double p) {
  if (std::isnan(p) || p < 1.0) throw std::invalid_argument("lp_norm needs p >= 1");
  const auto s = f.samples();
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : s) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  if (p == 2.0) {
    for (const auto& v : s) acc += std::norm(v);
    return std::sqrt(acc / static_cast<double>(s.size()));
  }
  if (p == 1.0) {
    for (const auto& v : s) acc += std::abs(v);
    return acc / static_cast<double>(s.size());
  }
  // scale by the max to avoid overflow for large p
  double mx = 0.0;
  for (const auto& v : s) mx = std::max(mx, std::abs(v));
  if (mx == 0.0) return 0.0;
  for (const auto& v : s) acc += std::pow(std::abs(v) / mx, p);
  return mx * std::pow(acc / static_cast<double>(s.size()), 1.0 / p);
}

GridFunction translate(const GridFunction& f, std::int64_t shift_ticks) {
  const auto n = static_cast<std::int64_t>(f.size());
  const std::int64_t s = ((shift_ticks % n) + n) % n;
  std::vector<cplx> out(f.size());
  const auto in = f.samples();
  std::rotate_copy(in.begin(), in.begin() + s, in.end(), out.begin());
  GridFunction g(f.resolution_log2(), std::move(out), f.kind());
  g.mark_aliased(f.aliased());
  return g;
}

FourierFunction dilate(const FourierFunction& f, std::int64_t m) {
  if (m < 1) throw std::invalid_argument("dilation factor must be >= 1");
  FourierFunction out;
  for (const auto& [j, c] : f.coefficients()) {
    std::int64_t jm = 0;
    if (__builtin_mul_overflow(j, m, &jm))
      throw std::overflow_error("dilated frequency overflows int64");
    out.add(jm, c);
  }
  return out;
}

GridFunction dilate_on_grid(const GridFunction& f, std::uint64_t m_mod) {
  const std::uint64_t mask = f.size() - 1;
  const std::uint64_t m = m_mod & mask;
  std::vector<cplx> out(f.size());
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = f[idx];
    idx = (idx + m) & mask;
  }
  GridFunction g(f.resolution_log2(), std::move(out), f.kind());
  g.mark_aliased(f.aliased());
  return g;
}

double LacunarySeries::l2_norm() const {
  double s = 0.0;
  for (double b : amplitudes) s += b * b / 2;
  return std::sqrt(s);
}

FourierFunction LacunarySeries::truncated(std::int64_t max_frequency) const {
  if (base < 2) throw std::invalid_argument("lacunary base must be >= 2");
  FourierFunction f;
  std::int64_t q = 1;
  for (int e = 0; e < first_exponent; ++e) {
    if (__builtin_mul_overflow(q, static_cast<std::int64_t>(base), &q) || q > max_frequency)
      return f;
  }
  for (double b : amplitudes) {
    if (q > max_frequency) break;
    f += FourierFunction::sine(q, b);
    if (__builtin_mul_overflow(q, static_cast<std::int64_t>(base), &q)) break;
  }
  return f;
}

}  // namespace mgale
