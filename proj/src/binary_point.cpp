#include "mgale/binary_point.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace mgale {

Freq Freq::from_int(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("frequencies must be positive");
  const auto u = static_cast<std::uint64_t>(n);
  const int s = std::countr_zero(u);
  return Freq{static_cast<std::uint64_t>(s), u >> s};
}

Freq Freq::power(std::uint64_t base, std::uint64_t e) {
  if (base < 1) throw std::invalid_argument("power base must be >= 1");
  const int a = std::countr_zero(base);
  Freq f{static_cast<std::uint64_t>(a) * e, 1};
  const Freq b{0, base >> a};
  for (std::uint64_t i = 0; i < e && b.odd != 1; ++i) f = f * b;
  return f;
}

Freq Freq::operator*(const Freq& o) const {
  std::uint64_t odd_prod = 0;
  if (__builtin_mul_overflow(odd, o.odd, &odd_prod))
    throw std::overflow_error("odd part of a frequency product exceeds 64 bits");
  return Freq{shift + o.shift, odd_prod};
}

double Freq::log2() const { return static_cast<double>(shift) + std::log2(static_cast<double>(odd)); }

std::uint64_t Freq::floor_log2() const { return shift + (63 - std::countl_zero(odd)); }

std::uint64_t Freq::residue(int J) const {
  if (J < 0 || J > 63) throw std::invalid_argument("residue modulus out of range");
  if (shift >= static_cast<std::uint64_t>(J)) return 0;
  return (odd << shift) & ((1ULL << J) - 1);
}

bool Freq::fits_int64() const { return floor_log2() < 63; }

std::int64_t Freq::to_int64() const {
  if (!fits_int64()) throw std::overflow_error("frequency exceeds int64");
  return static_cast<std::int64_t>(odd << shift);
}

bool operator<(const Freq& a, const Freq& b) {
  const auto la = a.floor_log2(), lb = b.floor_log2();
  if (la != lb) return la < lb;
  // same bit length: left-align the odd parts and compare
  return (a.odd << (63 - (la - a.shift))) < (b.odd << (63 - (lb - b.shift)));
}

BinaryPoint BinaryPoint::random(std::mt19937_64& rng, std::size_t bits) {
  std::vector<std::uint64_t> w((bits + 63) / 64 + 2);
  for (auto& v : w) v = rng();
  return BinaryPoint(std::move(w));
}

BinaryPoint BinaryPoint::from_double(double x) {
  if (!(x >= 0.0 && x < 1.0)) throw std::invalid_argument("point must lie in [0,1)");
  // doubles in [0,1) are exact multiples of 2^-1074; 64 bits cover the usual range
  const double hi = std::ldexp(x, 64);
  const auto w0 = static_cast<std::uint64_t>(hi);
  const double rest = std::ldexp(hi - static_cast<double>(w0), 64);
  return BinaryPoint({w0, static_cast<std::uint64_t>(rest)});
}

unsigned __int128 BinaryPoint::window(std::uint64_t s) const {
  // bits s .. s+127 of the expansion, padded with zeros
  auto word = [&](std::uint64_t i) -> std::uint64_t { return i < words_.size() ? words_[i] : 0; };
  const std::uint64_t q = s / 64, r = s % 64;
  std::uint64_t w[3] = {word(q), word(q + 1), word(q + 2)};
  std::uint64_t hi = r ? (w[0] << r) | (w[1] >> (64 - r)) : w[0];
  std::uint64_t lo = r ? (w[1] << r) | (w[2] >> (64 - r)) : w[1];
  return (static_cast<unsigned __int128>(hi) << 64) | lo;
}

double BinaryPoint::phase(const Freq& n) const {
  const unsigned __int128 y = window(n.shift) * n.odd;  // wraps mod 2^128
  // keep 53 bits so the result rounds strictly below 1
  return std::ldexp(static_cast<double>(static_cast<std::uint64_t>(y >> 75)), -53);
}

}  // namespace mgale
