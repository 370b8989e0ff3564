#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

namespace mgale {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ValueKind { real, complex };

// Samples f(k/2^J), k = 0..2^J-1, of a function on R/Z.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(int resolution_log2, std::vector<cplx> samples,
               ValueKind kind = ValueKind::complex);

  static GridFunction zeros(int resolution_log2);
  static GridFunction constant(int resolution_log2, double value);
  static GridFunction from_real(int resolution_log2, const std::vector<double>& values);

  template <class F>
  static GridFunction sample(int resolution_log2, F&& f) {
    std::vector<cplx> v(std::size_t{1} << resolution_log2);
    const double h = 1.0 / static_cast<double>(v.size());
    bool real = true;
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] = cplx(f(static_cast<double>(k) * h));
      real = real && v[k].imag() == 0.0;
    }
    return GridFunction(resolution_log2, std::move(v),
                        real ? ValueKind::real : ValueKind::complex);
  }

  int resolution_log2() const { return J_; }
  std::size_t size() const { return samples_.size(); }
  std::span<const cplx> samples() const { return samples_; }
  const cplx& operator[](std::size_t k) const { return samples_[k]; }
  ValueKind kind() const { return kind_; }
  bool is_real() const { return kind_ == ValueKind::real; }

  // Set by render when some frequency has |m| >= 2^{J-1}: the samples are
  // still exact point values but the grid no longer represents integrals.
  bool aliased() const { return aliased_; }
  void mark_aliased(bool a) { aliased_ = a; }

  cplx mean() const;
  std::vector<double> real_part() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(cplx s);
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

 private:
  void check_compatible(const GridFunction& o) const;

  int J_ = 0;
  std::vector<cplx> samples_{cplx(0.0)};
  ValueKind kind_ = ValueKind::real;
  bool aliased_ = false;
};

// Finitely supported Fourier series sum_m c_m e^{2 pi i m x}.
// Zero amplitudes are never stored.
class FourierFunction {
 public:
  using Map = std::map<std::int64_t, cplx>;

  FourierFunction() = default;
  explicit FourierFunction(const Map& coeffs);

  // amplitude * sin(2 pi m x), stored as -i a/2 at m and +i a/2 at -m.
  static FourierFunction sine(std::int64_t m, double amplitude = 1.0);
  static FourierFunction cosine(std::int64_t m, double amplitude = 1.0);
  static FourierFunction exponential(std::int64_t m, cplx amplitude = 1.0);

  void add(std::int64_t m, cplx c);
  cplx coefficient(std::int64_t m) const;
  const Map& coefficients() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }
  std::size_t support_size() const { return coeffs_.size(); }
  std::int64_t max_abs_frequency() const;
  bool is_conjugate_symmetric() const;

  cplx mean() const { return coefficient(0); }
  cplx evaluate(double x) const;
  double l2_norm() const;

  FourierFunction& operator+=(const FourierFunction& o);
  FourierFunction& operator*=(cplx s);
  friend FourierFunction operator+(FourierFunction a, const FourierFunction& b) { return a += b; }
  friend FourierFunction operator*(cplx s, FourierFunction a) { return a *= s; }
  bool operator==(const FourierFunction&) const = default;

 private:
  Map coeffs_;
};

GridFunction render(const FourierFunction& f, int J);

// (2^{-J} sum |f_k|^p)^{1/p}; p = kInf gives the max modulus.
double lp_norm(const GridFunction& f, double p);

// samples'[k] = samples[(k + shift) mod 2^J], i.e. x -> f(x + shift/2^J).
GridFunction translate(const GridFunction& f, std::int64_t shift_ticks);

// x -> f(m x) on coefficients.
FourierFunction dilate(const FourierFunction& f, std::int64_t m);

// Exact point values of x -> f(m x) on the same grid, given m mod 2^J.
GridFunction dilate_on_grid(const GridFunction& f, std::uint64_t m_mod);

// sum_j b_j sin(2 pi q^{e0 + j} x) with exponents too large for int64 keys.
struct LacunarySeries {
  std::uint64_t base = 2;
  int first_exponent = 0;
  std::vector<double> amplitudes;

  double l2_norm() const;
  // Terms with q^e <= max_frequency, as an explicit Fourier sum.
  FourierFunction truncated(std::int64_t max_frequency) const;
};

}  // namespace mgale
