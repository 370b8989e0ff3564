#include "mgale/tail_model.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mgale/numfmt.hpp"

namespace mgale {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

bool near_one(double v) { return std::abs(v - 1.0) <= 1e-12; }

double lfun(double x) { return std::max(1.0, std::log(x)); }

}  // namespace

TailModel TailModel::vanishing() { return TailModel{}; }

TailModel TailModel::geometric(double r, double scale) {
  if (!(r >= 0.0)) throw std::invalid_argument("geometric ratio must be >= 0");
  TailModel m;
  m.kind = Kind::geometric;
  m.ratio = r;
  m.scale = scale;
  return m;
}

TailModel TailModel::power_log(double a, double b, double c, double scale) {
  TailModel m;
  m.kind = Kind::power_log;
  m.exponent = a;
  m.log_exponent = b;
  m.loglog_exponent = c;
  m.scale = scale;
  return m;
}

bool TailModel::converges() const {
  if (scale == 0.0) return true;
  switch (kind) {
    case Kind::vanishing:
      return true;
    case Kind::geometric:
      return ratio < 1.0;
    case Kind::power_log:
      if (near_one(exponent)) {
        if (near_one(log_exponent)) return loglog_exponent > 1.0 && !near_one(loglog_exponent);
        return log_exponent > 1.0;
      }
      return exponent > 1.0;
  }
  return false;
}

double TailModel::shape(double n) const {
  switch (kind) {
    case Kind::vanishing:
      return 0.0;
    case Kind::geometric:
      return std::pow(ratio, n);
    case Kind::power_log: {
      const double l1 = lfun(n);
      return std::pow(n, -exponent) * std::pow(l1, -log_exponent) *
             std::pow(lfun(l1), -loglog_exponent);
    }
  }
  return 0.0;
}

double TailModel::tail_sum(std::int64_t from) const {
  if (kind == Kind::vanishing || scale == 0.0) return 0.0;
  if (!converges()) return kInfinity;
  if (kind == Kind::geometric) return scale * std::pow(ratio, static_cast<double>(from)) / (1.0 - ratio);
  // explicit head, then the integral from n1 + 1/2 in the variable t = log x
  const std::int64_t start = std::max<std::int64_t>(from, 1);
  const std::int64_t n1 = start + 4096;
  double head = 0.0;
  for (std::int64_t n = start; n < n1; ++n) head += shape(static_cast<double>(n));
  const double a = exponent, b = log_exponent, c = loglog_exponent;
  auto integrand = [a, b, c](double t) {
    const double l1 = std::max(1.0, t);
    return std::exp((1.0 - a) * t) * std::pow(l1, -b) * std::pow(std::max(1.0, std::log(l1)), -c);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double rest = integrator.integrate(integrand, std::log(static_cast<double>(n1) - 0.5),
                                           kInfinity);
  return scale * (head + rest);
}

std::string TailModel::describe() const {
  switch (kind) {
    case Kind::vanishing:
      return "vanishing";
    case Kind::geometric:
      return "geometric(r=" + format_double(ratio) + ",C=" + format_double(scale) + ")";
    case Kind::power_log:
      return "power_log(a=" + format_double(exponent) + ",b=" + format_double(log_exponent) +
             ",c=" + format_double(loglog_exponent) + ",C=" + format_double(scale) + ")";
  }
  return "?";
}

TailModel fit_scale(TailModel model, std::span<const double> terms, std::int64_t first_index) {
  if (model.kind == TailModel::Kind::vanishing) return model;
  const std::size_t from = terms.size() > 4 ? terms.size() - 4 : 0;
  double acc = 0.0;
  int cnt = 0;
  for (std::size_t i = from; i < terms.size(); ++i) {
    const double n = static_cast<double>(first_index + static_cast<std::int64_t>(i));
    const double s = model.shape(n);
    if (terms[i] > 0.0 && s > 0.0) {
      acc += std::log(terms[i]) - std::log(s);
      ++cnt;
    }
  }
  model.scale = cnt ? std::exp(acc / cnt) : 0.0;
  return model;
}

std::optional<TailModel> detect_tail(std::span<const double> terms, std::int64_t first_index) {
  if (terms.size() < 4) return std::nullopt;
  double mx = 0.0;
  for (double v : terms) mx = std::max(mx, std::abs(v));
  const std::size_t from = terms.size() - 4;
  bool zero = true;
  for (std::size_t i = from; i < terms.size(); ++i) zero = zero && std::abs(terms[i]) <= 1e-13 * mx;
  if (zero) return TailModel::vanishing();
  std::vector<double> x, y;
  for (std::size_t i = from; i < terms.size(); ++i) {
    if (!(terms[i] > 0.0)) return std::nullopt;
    x.push_back(static_cast<double>(first_index + static_cast<std::int64_t>(i)));
    y.push_back(std::log(terms[i]));
  }
  const LineFit fit = fit_line(x, y);
  // a power law also looks geometric on four terms; require a stable ratio further back
  if (terms.size() >= 8) {
    std::vector<double> x8, y8;
    for (std::size_t i = terms.size() - 8; i < terms.size(); ++i) {
      if (!(terms[i] > 0.0)) return std::nullopt;
      x8.push_back(static_cast<double>(first_index + static_cast<std::int64_t>(i)));
      y8.push_back(std::log(terms[i]));
    }
    const double s8 = fit_line(x8, y8).slope;
    if (std::abs(s8 - fit.slope) > 0.1 * std::abs(fit.slope)) return std::nullopt;
  }
  const double r = std::exp(fit.slope);
  if (r <= 0.9 && fit.max_residual <= 0.1) return fit_scale(TailModel::geometric(r), terms, first_index);
  return std::nullopt;
}

bool SeriesCriterion::finite() const { return std::isfinite(value()); }

SeriesCriterion evaluate_series(std::span<const double> terms, std::int64_t first_index,
                                const std::optional<TailModel>& declared) {
  SeriesCriterion out;
  for (double v : terms) {
    if (v < 0.0 || std::isnan(v)) throw std::invalid_argument("series terms must be nonnegative");
    out.partial_sum += v;
  }
  if (declared) {
    out.model = fit_scale(*declared, terms, first_index);
  } else {
    auto detected = detect_tail(terms, first_index);
    if (!detected)
      throw std::runtime_error(
          "missing tail model: the computed terms show no vanishing or geometric tail");
    out.model = *detected;
  }
  out.tail = out.model.tail_sum(first_index + static_cast<std::int64_t>(terms.size()));
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("line fit needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i)
    f.max_residual = std::max(f.max_residual, std::abs(y[i] - f.intercept - f.slope * x[i]));
  return f;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("log-log fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

}  // namespace mgale
