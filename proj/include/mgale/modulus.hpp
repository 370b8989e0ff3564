#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgale/audit_report.hpp"
#include "mgale/tail_model.hpp"
#include "mgale/torus_fn.hpp"

namespace mgale {

// values[n] = omega_p(2^-n, f) for n = 0..J. Grid shifts only, so every value
// is a lower bound for the continuous modulus.
struct ModulusProfile {
  double p = 2.0;
  std::vector<double> values;
  int source_resolution = 0;

  double at(int n) const { return values.at(static_cast<std::size_t>(n)); }
  int max_level() const { return static_cast<int>(values.size()) - 1; }
};

// max over shifts t/2^J, 0 <= t <= 2^{J-n}, of ||translate(f,t) - f||_p
ModulusProfile modulus_profile(const GridFunction& f, double p);

// ||translate(f,t) - f||_p for t = 0..2^J - 1
std::vector<double> shift_norms(const GridFunction& f, double p);

// omega_2 from Fourier coefficients, sup taken over 65 shifts per level: 2^-n
// itself and 64 points of [0, 2^-n) with random low-order binary digits, so
// that very high frequencies see generic phases. Levels n = 0..n_max.
ModulusProfile spectral_modulus_profile(const FourierFunction& f, int n_max, std::uint64_t seed = 1);
ModulusProfile spectral_modulus_profile(const LacunarySeries& f, int n_max, std::uint64_t seed = 1);

// lhs = ||f - E^n f||_p, rhs = 2 omega_p(2^-n, f)
AuditReport dyadic_approx_audit(const GridFunction& f, double p, int n);
AuditReport dyadic_approx_audit(const GridFunction& f, const ModulusProfile& profile, int n);

// sum_{n >= 1} omega_p(2^-n)/n^{1/p}: computed levels plus the tail model.
SeriesCriterion criterion_sqrt_n(const ModulusProfile& profile,
                                 const std::optional<TailModel>& tail = std::nullopt);

// columns n, delta, omega_p
std::string profile_csv(const ModulusProfile& profile);

}  // namespace mgale
