#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace mgale {

// Decay descriptor for the unseen tail v_n, n beyond the computed range:
//   vanishing:  v_n = 0
//   geometric:  v_n = C r^n
//   power_log:  v_n = C n^{-a} L(n)^{-b} L(L(n))^{-c},  L(x) = max(1, log x)
struct TailModel {
  enum class Kind { vanishing, geometric, power_log };

  Kind kind = Kind::vanishing;
  double ratio = 0.0;
  double exponent = 0.0;
  double log_exponent = 0.0;
  double loglog_exponent = 0.0;
  double scale = 1.0;

  static TailModel vanishing();
  static TailModel geometric(double r, double scale = 1.0);
  static TailModel power_log(double a, double b = 0.0, double c = 0.0, double scale = 1.0);

  bool converges() const;
  double shape(double n) const;
  double value(double n) const { return scale * shape(n); }
  // sum_{n >= from} value(n); +inf when the model diverges
  double tail_sum(std::int64_t from) const;
  std::string describe() const;
};

// C fitted by least squares on log v_n - log shape(n) over the positive terms.
TailModel fit_scale(TailModel model, std::span<const double> terms, std::int64_t first_index);

// Zero or clean geometric decay on the last four terms; nullopt otherwise.
std::optional<TailModel> detect_tail(std::span<const double> terms, std::int64_t first_index);

struct SeriesCriterion {
  double partial_sum = 0.0;
  double tail = 0.0;
  TailModel model;
  double value() const { return partial_sum + tail; }
  bool finite() const;
};

// terms[i] = v_{first_index + i}. Without a declared model the tail must be
// detectable, else std::runtime_error("missing tail model ...").
SeriesCriterion evaluate_series(std::span<const double> terms, std::int64_t first_index,
                                const std::optional<TailModel>& declared);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);
// fit of log y against log x; zero y values are rejected
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace mgale
