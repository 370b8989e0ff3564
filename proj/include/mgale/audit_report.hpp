#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace mgale {

struct AuditReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 1.0;
  double margin = 0.0;  // rhs - lhs
  bool passed = true;
  std::string context;
  std::optional<std::uint64_t> seed;
};

// Relative slack used by every inequality audit.
inline constexpr double kAuditTolerance = 1e-12;

// passed <=> lhs <= rhs + tol * max(|lhs|, |rhs|)
AuditReport inequality_report(double lhs, double rhs, double constant, std::string context,
                              double rel_tol = kAuditTolerance);

// passed <=> |lhs - rhs| <= rel_tol * max(|lhs|, |rhs|) (+ abs_tol)
AuditReport equality_report(double lhs, double rhs, std::string context, double rel_tol,
                            double abs_tol = 0.0);

nlohmann::ordered_json to_json(const AuditReport& r);

}  // namespace mgale
