#pragma once

// Local classicality conditions on a PND and the aggregate analysis.
//
// The pipeline runs the zero-probability rule, the three-term conditions
// q_n^2 <= q_{n-1} q_{n+1} through the ratio sequence x_n, the five-term
// conditions on three consecutive x_n, the local Poissonian/super-
// Poissonian dichotomy, the oscillation pattern rules, and finally the
// Hankel determinant/PSD hierarchy. Any definitive violation yields a
// nonclassicality witness; records that survive everything are only ever
// "consistent with classical up to the reachable depth".

#include <Eigen/Core>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "pncc/hankel.hpp"
#include "pncc/moments.hpp"
#include "pncc/pnd.hpp"
#include "pncc/report.hpp"
#include "pncc/scalars.hpp"

namespace pncc {

// ---------------------------------------------------------------------------
// Zero-probability rule

enum class ZeroRuleOutcome { Vacuum, Clean, WitnessZeros, BoundaryOnly };

inline const char* to_string(ZeroRuleOutcome o) {
  switch (o) {
    case ZeroRuleOutcome::Vacuum: return "vacuum";
    case ZeroRuleOutcome::Clean: return "clean";
    case ZeroRuleOutcome::WitnessZeros: return "zeros";
    case ZeroRuleOutcome::BoundaryOnly: return "boundary_only";
  }
  return "unknown";
}

struct ZeroRuleResult {
  ZeroRuleOutcome outcome = ZeroRuleOutcome::Clean;
  std::vector<Eigen::Index> zero_indices;
  std::vector<Eigen::Index> witness_indices;   // definitive nonclassicality witnesses
  std::vector<Eigen::Index> boundary_indices;  // trailing zeros, inconclusive alone
};

// A vanishing p_n in a nonvacuum state certifies nonclassicality. A zero is
// definitive when some later entry is known positive (interior zero) or when
// the record is flagged finite-support; a trailing run of zeros in an
// ordinary truncated record may just be where the data stops.
template <typename Scalar>
ZeroRuleResult zero_rule(const Pnd<Scalar>& pnd, Scalar tolerance = default_tolerance<Scalar>()) {
  ZeroRuleResult r;
  const auto& p = pnd.probabilities();
  const Eigen::Index K = pnd.truncation_index();
  Eigen::Index last_positive = -1;
  for (Eigen::Index n = 0; n <= K; ++n)
    if (p(n) > tolerance) last_positive = n;

  for (Eigen::Index n = 0; n <= K; ++n)
    if (p(n) <= tolerance) r.zero_indices.push_back(n);

  if (last_positive == 0 && p(0) >= Scalar(1) - tolerance) {
    r.outcome = ZeroRuleOutcome::Vacuum;
    return r;
  }

  for (const Eigen::Index n : r.zero_indices) {
    if (n < last_positive || (pnd.finite_support() && last_positive >= 0))
      r.witness_indices.push_back(n);
    else
      r.boundary_indices.push_back(n);
  }
  if (!r.witness_indices.empty())
    r.outcome = ZeroRuleOutcome::WitnessZeros;
  else if (!r.zero_indices.empty())
    r.outcome = ZeroRuleOutcome::BoundaryOnly;
  else
    r.outcome = ZeroRuleOutcome::Clean;
  return r;
}

// ---------------------------------------------------------------------------
// Three-term (minimal) conditions via the ratio sequence

// x_n = q_{n-1} q_{n+1} / q_n^2 for n = 1..max_n; classical data satisfies
// x_n >= 1 at every n, with equality exactly on locally Poissonian sites.
template <typename Scalar>
struct XSequence {
  Eigen::VectorX<Scalar> values;
  Eigen::Index max_n = 0;
  const Scalar& at(Eigen::Index n) const { return values(n - 1); }
};

enum class TermStatus { Pass, Saturated, Borderline, Fail };

inline const char* to_string(TermStatus s) {
  switch (s) {
    case TermStatus::Pass: return "pass";
    case TermStatus::Saturated: return "saturated";
    case TermStatus::Borderline: return "borderline";
    case TermStatus::Fail: return "fail";
  }
  return "unknown";
}

template <typename Scalar>
struct ThreeTermResult {
  XSequence<Scalar> x;
  std::vector<TermStatus> status;        // status[n-1] for x_n
  std::vector<Eigen::Index> failures;    // definitive witnesses
  std::vector<Eigen::Index> borderline;  // near-threshold, reported not witnessed
};

template <typename Scalar>
ThreeTermResult<Scalar> local3(const MomentSequence<Scalar>& q,
                               Scalar tolerance = default_tolerance<Scalar>()) {
  if (q.kind != MomentKind::Q) throw std::invalid_argument("local3: Q-kind sequence required");
  const Eigen::Index J = q.max_order();
  if (J < 2) throw std::invalid_argument("local3: at least three entries required");
  ThreeTermResult<Scalar> r;
  r.x.max_n = J - 1;
  r.x.values.resize(J - 1);
  r.status.resize(J - 1);
  for (Eigen::Index n = 1; n <= J - 1; ++n) {
    if (!(q[n] > Scalar(0)) || !(q[n - 1] > Scalar(0)) || !(q[n + 1] > Scalar(0)))
      throw std::domain_error("local3: zero entry in tested range (run the zero rule first)");
    const Scalar x = q[n - 1] * q[n + 1] / (q[n] * q[n]);
    r.x.values(n - 1) = x;
    using std::abs;
    TermStatus s;
    if (abs(x - Scalar(1)) <= tolerance)
      s = TermStatus::Saturated;
    else if (x > Scalar(1))
      s = TermStatus::Pass;
    else if (x < Scalar(1) - Scalar(3) * tolerance)
      s = TermStatus::Fail;
    else
      s = TermStatus::Borderline;
    r.status[n - 1] = s;
    if (s == TermStatus::Fail) r.failures.push_back(n);
    if (s == TermStatus::Borderline) r.borderline.push_back(n);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Five-term (second order) conditions

template <typename Scalar>
struct FiveTermCheck {
  Eigen::Index n = 0;
  bool pass = true;
  Scalar slack = Scalar(0);  // (x_{n-1}-1)(x_{n+1}-1) - ((x_n-1)/x_n)^2
};

template <typename Scalar>
std::vector<FiveTermCheck<Scalar>> local5(const XSequence<Scalar>& x,
                                          Scalar tolerance = default_tolerance<Scalar>()) {
  std::vector<FiveTermCheck<Scalar>> out;
  for (Eigen::Index n = 2; n + 1 <= x.max_n; ++n) {
    FiveTermCheck<Scalar> c;
    c.n = n;
    const Scalar ratio = (x.at(n) - Scalar(1)) / x.at(n);
    c.slack = (x.at(n - 1) - Scalar(1)) * (x.at(n + 1) - Scalar(1)) - ratio * ratio;
    c.pass = c.slack >= -tolerance;
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Refined dichotomy

enum class DichotomyKind { Poissonian, Superpoissonian, Mixed };

inline const char* to_string(DichotomyKind k) {
  switch (k) {
    case DichotomyKind::Poissonian: return "poissonian";
    case DichotomyKind::Superpoissonian: return "superpoissonian";
    case DichotomyKind::Mixed: return "mixed";
  }
  return "unknown";
}

struct DichotomyResult {
  DichotomyKind kind = DichotomyKind::Poissonian;
  // Five-term sites adjacent to a saturated/strict junction; a failure
  // there confirms the mixed structure as a genuine violation.
  std::vector<Eigen::Index> junction_sites;
  std::optional<Eigen::Index> first_junction;
};

// Classical data is locally Poissonian throughout (x = 1) or strictly
// super-Poissonian throughout; a mix is suspicious and becomes a witness
// only when the five-term condition fails at the junction.
template <typename Scalar>
DichotomyResult poisson_dichotomy(const XSequence<Scalar>& x,
                                  Scalar tolerance = default_tolerance<Scalar>()) {
  DichotomyResult r;
  using std::abs;
  auto saturated = [&](Eigen::Index n) { return abs(x.at(n) - Scalar(1)) <= tolerance; };
  bool any_sat = false, any_strict = false;
  for (Eigen::Index n = 1; n <= x.max_n; ++n) {
    if (saturated(n))
      any_sat = true;
    else if (x.at(n) > Scalar(1))
      any_strict = true;
    // sub-threshold entries belong to the three-term report, not here
  }
  if (!any_strict) {
    r.kind = DichotomyKind::Poissonian;
    return r;
  }
  if (!any_sat) {
    r.kind = DichotomyKind::Superpoissonian;
    return r;
  }
  r.kind = DichotomyKind::Mixed;
  for (Eigen::Index n = 1; n < x.max_n; ++n) {
    const bool a = saturated(n), b = saturated(n + 1);
    if (a == b) continue;
    if (!r.first_junction) r.first_junction = n;
    // (sat, strict): five-term at n+1 reads 0 >= positive when x_{n+2} exists;
    // (strict, sat): five-term at n needs x_{n-1}.
    const Eigen::Index site = a ? n + 1 : n;
    if (site >= 2 && site + 1 <= x.max_n) r.junction_sites.push_back(site);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Oscillation analysis

struct OscillationResult {
  enum class Pattern { Constant, NonDecreasing, NonIncreasing, SingleMinimum, Irregular };
  Pattern q_pattern = Pattern::Constant;
  std::vector<Eigen::Index> q_maxima;  // each one a nonclassicality witness
  std::vector<Eigen::Index> q_minima;  // two or more imply an interior maximum
  std::vector<Eigen::Index> q_plateaus;
  bool witness = false;
  std::vector<Eigen::Index> p_maxima;
  std::vector<double> p_bound_slack;  // (1+1/n) p_{n-1} p_{n+1} - p_n^2 at each maximum
  std::vector<Eigen::Index> p_periods;
};

inline const char* to_string(OscillationResult::Pattern p) {
  using P = OscillationResult::Pattern;
  switch (p) {
    case P::Constant: return "constant";
    case P::NonDecreasing: return "nondecreasing";
    case P::NonIncreasing: return "nonincreasing";
    case P::SingleMinimum: return "single_minimum";
    case P::Irregular: return "irregular";
  }
  return "unknown";
}

namespace detail {

struct Run {
  Eigen::Index start = 0;
  Eigen::Index length = 1;
};

// Entries within relative tolerance of their neighbour merge into plateaus;
// a plateau that is entered from below and left downward counts as one
// local maximum, mirroring the treatment of constant phases.
template <typename Scalar>
std::vector<Run> merge_runs(const Eigen::VectorX<Scalar>& v, const Scalar& tolerance) {
  std::vector<Run> runs;
  runs.push_back({0, 1});
  using std::abs;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    const Scalar scale = std::max<Scalar>(abs(v(i - 1)), abs(v(i)));
    if (abs(v(i) - v(i - 1)) <= tolerance * scale)
      ++runs.back().length;
    else
      runs.push_back({i, 1});
  }
  return runs;
}

}  // namespace detail

template <typename Scalar>
OscillationResult oscillation_analysis(const MomentSequence<Scalar>& q, const Pnd<Scalar>& pnd,
                                       Scalar tolerance = default_tolerance<Scalar>()) {
  if (q.kind != MomentKind::Q)
    throw std::invalid_argument("oscillation_analysis: Q-kind sequence required");
  if (q.values.size() < 3)
    throw std::invalid_argument("oscillation_analysis: at least three entries required");

  OscillationResult r;
  const auto runs = detail::merge_runs(q.values, tolerance);
  for (const auto& run : runs)
    if (run.length >= 2) r.q_plateaus.push_back(run.start);

  std::vector<int> moves;  // +1 up, -1 down between consecutive runs
  for (std::size_t i = 0; i + 1 < runs.size(); ++i)
    moves.push_back(q.values(runs[i + 1].start) > q.values(runs[i].start) ? 1 : -1);
  for (std::size_t i = 0; i + 1 < moves.size(); ++i) {
    if (moves[i] > 0 && moves[i + 1] < 0) r.q_maxima.push_back(runs[i + 1].start);
    if (moves[i] < 0 && moves[i + 1] > 0) r.q_minima.push_back(runs[i + 1].start);
  }
  r.witness = !r.q_maxima.empty() || r.q_minima.size() >= 2;

  using P = OscillationResult::Pattern;
  if (runs.size() == 1)
    r.q_pattern = P::Constant;
  else if (r.q_maxima.empty() && r.q_minima.empty())
    r.q_pattern = moves.front() > 0 ? P::NonDecreasing : P::NonIncreasing;
  else if (r.q_maxima.empty() && r.q_minima.size() == 1)
    r.q_pattern = P::SingleMinimum;
  else
    r.q_pattern = P::Irregular;

  // Local maxima of the probabilities themselves, the bound that limits
  // their height, and the spacing between successive maxima.
  const auto& p = pnd.probabilities();
  const auto p_runs = detail::merge_runs(p, tolerance);
  std::vector<int> p_moves;
  for (std::size_t i = 0; i + 1 < p_runs.size(); ++i)
    p_moves.push_back(p(p_runs[i + 1].start) > p(p_runs[i].start) ? 1 : -1);
  for (std::size_t i = 0; i + 1 < p_moves.size(); ++i) {
    if (p_moves[i] > 0 && p_moves[i + 1] < 0) {
      const Eigen::Index n = p_runs[i + 1].start;
      r.p_maxima.push_back(n);
      if (n >= 1 && n + 1 < p.size()) {
        const Scalar slack =
            (Scalar(1) + Scalar(1) / Scalar(double(n))) * p(n - 1) * p(n + 1) - p(n) * p(n);
        r.p_bound_slack.push_back(to_double(slack));
      } else {
        r.p_bound_slack.push_back(0.0);
      }
    }
  }
  for (std::size_t i = 0; i + 1 < r.p_maxima.size(); ++i)
    r.p_periods.push_back(r.p_maxima[i + 1] - r.p_maxima[i]);
  return r;
}

// ---------------------------------------------------------------------------
// Aggregate analysis

template <typename Scalar>
struct AnalyzeOptions {
  std::optional<Eigen::Index> max_depth;
  bool exhaustive = false;
  Scalar tolerance = default_tolerance<Scalar>();
  bool with_mandel = true;
};

namespace detail {

template <typename Scalar>
void record_hierarchy(ClassicalityReport& report, const MomentSequence<Scalar>& q,
                      Eigen::Index depth_unshifted, Eigen::Index depth_shifted,
                      const Scalar& tolerance) {
  MomentSequence<Scalar> work = q;
  if constexpr (!is_exact_v<Scalar>) {
    if (q.values.size() >= 2 && q[0] > Scalar(0) && q[1] > Scalar(0)) {
      auto rescaled = rescale_for_conditioning(q);
      work = std::move(rescaled.moments);
      report.hierarchy_scale = to_double(rescaled.scale);
    }
  }
  const auto hier = determinant_hierarchy(work, depth_unshifted, tolerance);
  for (const auto& e : hier.entries) {
    HierarchyEntryReport h;
    h.depth = long(e.depth);
    if (e.det_unshifted) h.det_unshifted = to_double(*e.det_unshifted);
    if (e.det_shifted && e.depth <= depth_shifted) h.det_shifted = to_double(*e.det_shifted);
    h.sign_unshifted = e.sign_unshifted;
    h.sign_shifted = e.depth <= depth_shifted ? e.sign_shifted : 0;

    const auto verdict_u = psd_check_matrix(build_unshifted(work, e.depth), tolerance);
    h.psd_unshifted = to_string(verdict_u.status);
    PsdStatus shifted_status = PsdStatus::Yes;
    if (e.depth <= depth_shifted) {
      Eigen::MatrixX<Scalar> s(e.depth + 1, e.depth + 1);
      for (Eigen::Index i = 0; i <= e.depth; ++i)
        for (Eigen::Index j = 0; j <= e.depth; ++j) s(i, j) = work[i + j + 1];
      const auto verdict_s = psd_check_matrix(s, tolerance);
      h.psd_shifted = to_string(verdict_s.status);
      shifted_status = verdict_s.status;
    } else {
      h.psd_shifted = "skipped";
    }

    const bool bad_u = verdict_u.status == PsdStatus::No || h.sign_unshifted < 0;
    const bool bad_s = shifted_status == PsdStatus::No || h.sign_shifted < 0;
    if (bad_u || bad_s) {
      const bool already = std::any_of(report.witnesses.begin(), report.witnesses.end(),
                                       [](const Witness& w) { return w.kind == "hierarchy"; });
      if (!already)
        report.witnesses.push_back(
            {"hierarchy", long(e.depth),
             std::string(bad_u ? "unshifted" : "shifted") + " Hankel matrix not PSD at depth " +
                 std::to_string(e.depth)});
    }
    report.hierarchy.push_back(std::move(h));
  }
}

}  // namespace detail

template <typename Scalar>
ClassicalityReport analyze(const Pnd<Scalar>& pnd, AnalyzeOptions<Scalar> opts = {}) {
  const Scalar tol = opts.tolerance;
  ClassicalityReport report;
  report.mode = to_string(mode_v<Scalar>);
  report.tolerance = to_double(tol);
  report.dichotomy = "not_applicable";

  // Stage 1: zero rule.
  const auto zr = zero_rule(pnd, tol);
  report.zero_rule.outcome = to_string(zr.outcome);
  for (const auto n : zr.witness_indices) report.zero_rule.witness_indices.push_back(long(n));
  for (const auto n : zr.boundary_indices) report.zero_rule.boundary_indices.push_back(long(n));
  if (zr.outcome == ZeroRuleOutcome::Vacuum) {
    report.vacuum = true;
    report.verdict = "consistent_with_classical";
    report.notes.push_back("vacuum state: classical, excluded from further tests");
    return report;
  }
  for (const auto n : zr.witness_indices)
    report.witnesses.push_back(
        {"zero", long(n), "p_" + std::to_string(n) + " = 0 in a nonvacuum state"});
  if (!zr.boundary_indices.empty())
    report.notes.push_back("trailing zeros treated as truncation, not as witnesses; "
                           "flag the record finite-support to make them definitive");

  const bool short_circuit = !opts.exhaustive;
  auto finish = [&]() {
    report.verdict = report.witnesses.empty() ? "consistent_with_classical" : "nonclassical";
    return report;
  };
  if (short_circuit && !report.witnesses.empty()) return finish();

  // Working record: drop the inconclusive trailing zeros.
  Eigen::Index effective_size = pnd.size();
  if (!pnd.finite_support()) {
    while (effective_size > 0 && pnd[effective_size - 1] <= tol) --effective_size;
  }
  if (effective_size == 0) {
    report.notes.push_back("record has no positive entries; nothing to test");
    return finish();
  }
  const Pnd<Scalar> effective(pnd.probabilities().head(effective_size),
                              NormalizationMode::TruncatedTail, tol, pnd.finite_support());
  const auto q = q_from_pnd(effective);

  // Local tests run on the longest zero-free prefix.
  Eigen::Index prefix = 0;
  while (prefix < effective.size() && effective[prefix] > tol) ++prefix;

  std::optional<ThreeTermResult<Scalar>> three;
  if (prefix >= 3) {
    MomentSequence<Scalar> q_prefix = q;
    q_prefix.values = q.values.head(prefix).eval();
    three = local3(q_prefix, tol);
    for (Eigen::Index i = 0; i < three->x.values.size(); ++i)
      report.local3.push_back(
          {long(i + 1), to_double(three->x.values(i)), to_string(three->status[i])});
    for (const auto n : three->failures)
      report.witnesses.push_back(
          {"local3", long(n), "x_" + std::to_string(n) + " < 1 (locally sub-Poissonian)"});
    if (!three->borderline.empty())
      report.notes.push_back("borderline three-term ratios within a few tolerances of 1; "
                             "not counted as witnesses");
    if (short_circuit && !report.witnesses.empty()) return finish();
  }

  // Five-term conditions and the dichotomy apply once the three-term stage
  // has passed.
  if (three && three->failures.empty()) {
    const auto five = local5(three->x, tol);
    for (const auto& c : five) {
      report.local5.push_back({long(c.n), c.pass, to_double(c.slack)});
      if (!c.pass)
        report.witnesses.push_back(
            {"local5", long(c.n), "five-term condition fails at n = " + std::to_string(c.n)});
    }
    if (short_circuit && !report.witnesses.empty()) return finish();

    const auto dich = poisson_dichotomy(three->x, tol);
    report.dichotomy = to_string(dich.kind);
    if (dich.kind == DichotomyKind::Mixed) {
      const bool confirmed =
          std::any_of(five.begin(), five.end(), [&](const FiveTermCheck<Scalar>& c) {
            return !c.pass && std::find(dich.junction_sites.begin(), dich.junction_sites.end(),
                                        c.n) != dich.junction_sites.end();
          });
      report.dichotomy_suspicious = !confirmed;
      if (confirmed)
        report.notes.push_back("mixed Poissonian/super-Poissonian structure confirmed by a "
                               "five-term failure at the junction");
      else
        report.notes.push_back("mixed Poissonian/super-Poissonian structure not confirmed by "
                               "the five-term conditions; flagged suspicious only");
    }
  }

  // Oscillation rules need a zero-free record of at least three entries.
  if (prefix == effective.size() && effective.size() >= 3) {
    const auto osc = oscillation_analysis(q, effective, tol);
    OscillationSummary s;
    s.q_pattern = to_string(osc.q_pattern);
    for (const auto n : osc.q_maxima) s.q_maxima.push_back(long(n));
    for (const auto n : osc.q_minima) s.q_minima.push_back(long(n));
    for (const auto n : osc.q_plateaus) s.q_plateaus.push_back(long(n));
    s.witness = osc.witness;
    for (const auto n : osc.p_maxima) s.p_maxima.push_back(long(n));
    s.p_bound_slack = osc.p_bound_slack;
    for (const auto n : osc.p_periods) s.p_periods.push_back(long(n));
    report.oscillation = std::move(s);
    for (const auto n : osc.q_maxima)
      report.witnesses.push_back(
          {"oscillation", long(n), "local maximum in q at n = " + std::to_string(n)});
    if (osc.q_minima.size() >= 2)
      report.witnesses.push_back({"oscillation", long(osc.q_minima[1]),
                                  "two local minima in q imply an interior maximum"});
    if (short_circuit && !report.witnesses.empty()) return finish();
  }

  // Global stage: determinant/PSD hierarchy to the reachable depth.
  const Eigen::Index J = q.max_order();
  Eigen::Index depth_u = J / 2;
  Eigen::Index depth_s = J >= 1 ? (J - 1) / 2 : -1;
  if (opts.max_depth) {
    if (*opts.max_depth > depth_u)
      throw std::invalid_argument("requested depth exceeds what the record supports");
    depth_u = *opts.max_depth;
    depth_s = std::min(depth_s, depth_u);
  }
  detail::record_hierarchy(report, q, depth_u, depth_s, tol);
  report.depth = long(std::min(depth_u, depth_s));

  // Mandel Q from the truncated factorial moments; diagnostic only unless
  // the record has finite support.
  if (opts.with_mandel && effective.size() >= 3) {
    const auto gamma = gamma_from_pnd(effective, 2);
    if (gamma.moments[1] > Scalar(0)) {
      MandelSummary m;
      m.value = to_double(mandel_q(gamma.moments));
      m.definitive = gamma.moments.tail_exact;
      report.mandel_q = m;
    }
  }
  return finish();
}

}  // namespace pncc
