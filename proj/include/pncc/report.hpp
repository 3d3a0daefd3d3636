#pragma once

// Aggregated analysis results in plain (scalar-free) form, suitable for
// serialization. Verdicts are never "classical" outright: a record that
// survives every test is only consistent with classicality up to the depth
// the truncation supports.

#include <optional>
#include <string>
#include <vector>

namespace pncc {

struct Witness {
  std::string kind;  // "zero" | "local3" | "local5" | "dichotomy" | "hierarchy" | "oscillation"
  long index = -1;   // site n, or hierarchy depth
  std::string detail;

  bool operator==(const Witness&) const = default;
};

struct ZeroRuleReport {
  std::string outcome;  // "vacuum" | "clean" | "zeros" | "boundary_only"
  std::vector<long> witness_indices;
  std::vector<long> boundary_indices;

  bool operator==(const ZeroRuleReport&) const = default;
};

struct ThreeTermEntry {
  long n = 0;
  double x = 0.0;  // q_{n-1} q_{n+1} / q_n^2
  std::string status;  // "pass" | "saturated" | "borderline" | "fail"

  bool operator==(const ThreeTermEntry&) const = default;
};

struct FiveTermEntry {
  long n = 0;
  bool pass = true;
  double slack = 0.0;

  bool operator==(const FiveTermEntry&) const = default;
};

struct HierarchyEntryReport {
  long depth = 0;
  std::optional<double> det_unshifted;
  std::optional<double> det_shifted;
  int sign_unshifted = 0;
  int sign_shifted = 0;
  std::string psd_unshifted;  // "yes" | "no" | "borderline" | "skipped"
  std::string psd_shifted;

  bool operator==(const HierarchyEntryReport&) const = default;
};

struct OscillationSummary {
  std::string q_pattern;  // "constant" | "nondecreasing" | "nonincreasing" |
                          // "single_minimum" | "irregular"
  std::vector<long> q_maxima;
  std::vector<long> q_minima;
  std::vector<long> q_plateaus;
  bool witness = false;
  std::vector<long> p_maxima;
  std::vector<double> p_bound_slack;  // three-term slack at each p maximum
  std::vector<long> p_periods;        // gaps between successive p maxima
  std::string note;

  bool operator==(const OscillationSummary&) const = default;
};

struct MandelSummary {
  double value = 0.0;
  bool definitive = false;  // moments exact for the underlying state

  bool operator==(const MandelSummary&) const = default;
};

struct ClassicalityReport {
  std::string verdict;  // "nonclassical" | "consistent_with_classical"
  bool vacuum = false;
  long depth = -1;  // deepest order with both Hankel matrices checked
  std::vector<Witness> witnesses;
  ZeroRuleReport zero_rule;
  std::vector<ThreeTermEntry> local3;
  std::vector<FiveTermEntry> local5;
  std::string dichotomy;  // "poissonian" | "superpoissonian" | "mixed" | "not_applicable"
  bool dichotomy_suspicious = false;
  std::optional<OscillationSummary> oscillation;
  std::vector<HierarchyEntryReport> hierarchy;
  std::optional<double> hierarchy_scale;  // conditioning rescale applied in float mode
  std::optional<MandelSummary> mandel_q;
  std::string mode;  // arithmetic mode
  double tolerance = 0.0;
  std::vector<std::string> notes;

  bool nonclassical() const { return verdict == "nonclassical"; }

  bool operator==(const ClassicalityReport&) const = default;
};

}  // namespace pncc
