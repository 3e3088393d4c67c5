#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace chmr {

/// Outcome of reducing one residual.
struct ResidualOutcome {
  std::string label;
  bool reduced_to_zero = false;
  std::string remainder_text;  // "0" when reduced_to_zero
  /// Factor relating a pushed residual to its target, when that is the relation checked.
  std::optional<std::string> unit_factor;
  /// Informational entries are reported but do not decide pass/fail.
  bool informational = false;
  /// For mutation probes the expected outcome is a nonzero remainder.
  bool expect_zero = true;

  bool ok() const { return informational || reduced_to_zero == expect_zero; }

  static ResidualOutcome of(std::string label, bool zero, std::string remainder) {
    ResidualOutcome r;
    r.label = std::move(label);
    r.reduced_to_zero = zero;
    r.remainder_text = std::move(remainder);
    return r;
  }
};

/// A measured convergence order and the criterion it was held to.
struct NumericMeasure {
  std::string label;
  std::vector<std::size_t> resolutions;
  std::vector<double> linf, l2;
  double order = 0.0;
  std::string criterion;
  bool passed = false;
};

struct Report {
  std::string task;
  int n = 1;
  std::vector<std::string> hypotheses_used;
  std::vector<std::string> assumptions;
  std::vector<ResidualOutcome> residuals;
  std::vector<NumericMeasure> measures;
  std::size_t steps = 0;
  double wall_time_ms = 0.0;
  /// Set when the step budget ran out; such a report neither passes nor fails.
  bool budget_exhausted = false;

  bool passed() const {
    if (budget_exhausted) return false;
    for (const auto& r : residuals)
      if (!r.ok()) return false;
    for (const auto& m : measures)
      if (!m.passed) return false;
    return true;
  }
  void add_assumption(const std::string& a);
  void add_hypothesis(const std::string& h);
};

inline void Report::add_assumption(const std::string& a) {
  for (const auto& x : assumptions)
    if (x == a) return;
  assumptions.push_back(a);
}

inline void Report::add_hypothesis(const std::string& h) {
  for (const auto& x : hypotheses_used)
    if (x == h) return;
  hypotheses_used.push_back(h);
}

}  // namespace chmr
