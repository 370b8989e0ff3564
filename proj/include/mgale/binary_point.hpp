#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mgale {

// Positive integer 2^shift * odd; exact for dilation factors far beyond int64.
struct Freq {
  std::uint64_t shift = 0;
  std::uint64_t odd = 1;

  static Freq from_int(std::int64_t n);  // n >= 1
  static Freq pow2(std::uint64_t e) { return Freq{e, 1}; }
  // base^e; throws when the odd part of the power exceeds 64 bits
  static Freq power(std::uint64_t base, std::uint64_t e);
  // throws std::overflow_error when the odd parts overflow 64 bits
  Freq operator*(const Freq& o) const;
  bool operator==(const Freq&) const = default;

  double log2() const;
  std::uint64_t floor_log2() const;
  // n mod 2^J, J <= 63
  std::uint64_t residue(int J) const;
  bool fits_int64() const;
  std::int64_t to_int64() const;  // throws when it does not fit
};

bool operator<(const Freq& a, const Freq& b);

// x in [0,1) with a finite binary expansion of arbitrary length. Random
// expansions make f(n x) behave like a Lebesgue-typical point for every
// dilation the expansion is long enough to resolve.
class BinaryPoint {
 public:
  BinaryPoint() = default;
  explicit BinaryPoint(std::vector<std::uint64_t> words) : words_(std::move(words)) {}
  static BinaryPoint random(std::mt19937_64& rng, std::size_t bits);
  static BinaryPoint from_double(double x);

  std::size_t bits() const { return 64 * words_.size(); }
  // frac(2^s x) as a 128-bit fixed-point fraction (zeros past the expansion)
  unsigned __int128 window(std::uint64_t s) const;
  // frac(n x) in [0,1); error below 2^-60 when odd < 2^64 and n x is resolved
  double phase(const Freq& n) const;
  double value() const { return phase(Freq{}); }

 private:
  std::vector<std::uint64_t> words_;  // most significant first
};

}  // namespace mgale
