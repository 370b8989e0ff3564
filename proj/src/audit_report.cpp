#include "mgale/audit_report.hpp"

#include <algorithm>
#include <cmath>

#include "mgale/numfmt.hpp"

namespace mgale {

AuditReport inequality_report(double lhs, double rhs, double constant, std::string context,
                              double rel_tol) {
  AuditReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.constant = constant;
  r.margin = rhs - lhs;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  r.passed = !std::isnan(lhs) && !std::isnan(rhs) && lhs <= rhs + rel_tol * scale;
  r.context = std::move(context);
  return r;
}

AuditReport equality_report(double lhs, double rhs, std::string context, double rel_tol,
                            double abs_tol) {
  AuditReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.constant = 1.0;
  r.margin = rhs - lhs;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  r.passed = std::abs(lhs - rhs) <= rel_tol * scale + abs_tol;
  r.context = std::move(context);
  return r;
}

nlohmann::ordered_json to_json(const AuditReport& r) {
  // numbers go through format_double so that inf/nan survive and the text
  // is byte-stable
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return format_double(v);
  };
  nlohmann::ordered_json j;
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["constant"] = num(r.constant);
  j["margin"] = num(r.margin);
  j["passed"] = r.passed;
  j["context"] = r.context;
  if (r.seed) j["seed"] = *r.seed;
  else j["seed"] = nullptr;
  return j;
}

}  // namespace mgale
