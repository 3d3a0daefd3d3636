#pragma once

// The two dual moment sequences of a PND: q_n = n! p_n (always finite)
// and the factorial moments gamma_m (finite only for fast-decaying tails),
// plus the Mandel Q parameter, the two-sided factorial-moment inequalities
// and the alternating generating function Lambda(K).

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "pncc/pnd.hpp"
#include "pncc/scalars.hpp"

namespace pncc {

enum class MomentKind { Q, Gamma };

inline const char* to_string(MomentKind k) { return k == MomentKind::Q ? "q" : "gamma"; }

enum class MomentProvenance { FromPnd, ClosedForm, Transformed };

template <typename Scalar>
struct MomentSequence {
  MomentKind kind = MomentKind::Q;
  Eigen::VectorX<Scalar> values;
  MomentProvenance provenance = MomentProvenance::FromPnd;
  // True when the stored values are exact for the underlying state rather
  // than truncated partial sums.
  bool tail_exact = false;

  Eigen::Index max_order() const { return values.size() - 1; }
  const Scalar& operator[](Eigen::Index n) const { return values(n); }
};

template <typename Scalar>
MomentSequence<Scalar> q_from_pnd(const Pnd<Scalar>& pnd) {
  MomentSequence<Scalar> q;
  q.kind = MomentKind::Q;
  q.values.resize(pnd.size());
  for (Eigen::Index n = 0; n < pnd.size(); ++n)
    q.values(n) = factorial_as<Scalar>(n) * pnd[n];
  q.provenance = MomentProvenance::FromPnd;
  q.tail_exact = pnd.finite_support();
  return q;
}

template <typename Scalar>
Pnd<Scalar> pnd_from_q(const Eigen::VectorX<Scalar>& q_values,
                       NormalizationMode mode = NormalizationMode::TruncatedTail,
                       Scalar tolerance = default_tolerance<Scalar>()) {
  Eigen::VectorX<Scalar> p(q_values.size());
  for (Eigen::Index n = 0; n < q_values.size(); ++n)
    p(n) = q_values(n) / factorial_as<Scalar>(n);
  return Pnd<Scalar>(std::move(p), mode, tolerance);
}

// gamma_m = sum_{n=m}^{K} n!/(n-m)! p_n. The partial sums are exact only
// when the record has finite support; otherwise the share of the last term
// is reported as a crude tail diagnostic.
template <typename Scalar>
struct GammaEstimate {
  MomentSequence<Scalar> moments;
  Eigen::VectorX<Scalar> last_term_share;  // |t_K| / gamma_m per order
};

template <typename Scalar>
GammaEstimate<Scalar> gamma_from_pnd(const Pnd<Scalar>& pnd, Eigen::Index max_order) {
  if (max_order < 0) throw std::invalid_argument("gamma_from_pnd: negative order");
  const Eigen::Index K = pnd.truncation_index();
  GammaEstimate<Scalar> out;
  out.moments.kind = MomentKind::Gamma;
  out.moments.provenance = MomentProvenance::FromPnd;
  out.moments.tail_exact = pnd.finite_support();
  out.moments.values.resize(max_order + 1);
  out.last_term_share = Eigen::VectorX<Scalar>::Zero(max_order + 1);
  for (Eigen::Index m = 0; m <= max_order; ++m) {
    CompensatedSum<Scalar> acc;
    Scalar last(0);
    for (Eigen::Index n = m; n <= K; ++n) {
      last = falling_factorial_as<Scalar>(n, m) * pnd[n];
      acc.add(last);
    }
    out.moments.values(m) = acc.value();
    if (acc.value() > Scalar(0)) out.last_term_share(m) = last / acc.value();
  }
  return out;
}

// Exact factorial moments of the intensity distribution behind a state
// specification. Photon-added states over supported bases are summed by a
// converged series (tail_exact stays false for them); everything else is a
// closed form.
template <typename Scalar>
MomentSequence<Scalar> gamma_closed_form(const StateSpec& spec, Eigen::Index max_order) {
  validate_spec(spec);
  MomentSequence<Scalar> g;
  g.kind = MomentKind::Gamma;
  g.provenance = MomentProvenance::ClosedForm;
  g.tail_exact = true;
  g.values.resize(max_order + 1);

  if (const auto* f = spec.get_if<FockSpec>()) {
    for (Eigen::Index m = 0; m <= max_order; ++m)
      g.values(m) = falling_factorial_as<Scalar>(f->occupation, m);
    return g;
  }

  if constexpr (is_exact_v<Scalar>) {
    const std::vector<WeightedIntensity>* parts = nullptr;
    if (const auto* mix = spec.get_if<CoherentMixtureSpec>()) parts = &mix->components;
    if (const auto* at = spec.get_if<AtomicIntensitySpec>()) parts = &at->atoms;
    if (parts) {
      for (Eigen::Index m = 0; m <= max_order; ++m) {
        Scalar v(0);
        for (const auto& c : *parts) {
          Scalar pw(1);
          for (Eigen::Index i = 0; i < m; ++i) pw *= Scalar(c.intensity);
          v += Scalar(c.weight) * pw;
        }
        g.values(m) = v;
      }
      return g;
    }
    throw std::invalid_argument("gamma_closed_form: variant not available in exact mode");
  } else {
    using std::cos;
    using std::exp;
    if (const auto* c = spec.get_if<CoherentSpec>()) {
      const Scalar mu(c->intensity);
      Scalar pw(1);
      for (Eigen::Index m = 0; m <= max_order; ++m, pw *= mu) g.values(m) = pw;
      return g;
    }
    if (const auto* t = spec.get_if<ThermalSpec>()) {
      const Scalar nbar(t->mean_occupation);
      Scalar pw(1);
      for (Eigen::Index m = 0; m <= max_order; ++m, pw *= nbar)
        g.values(m) = factorial_as<Scalar>(m) * pw;
      return g;
    }
    if (const auto* s = spec.get_if<SuperpositionSpec>()) {
      const Scalar mu(s->intensity);
      const Scalar c = Scalar(std::cos(s->relative_phase));
      const Scalar damping = exp(Scalar(-2) * mu) * c;
      Scalar pw(1);
      for (Eigen::Index m = 0; m <= max_order; ++m, pw *= mu) {
        const Scalar parity = (m % 2 == 0) ? Scalar(1) : Scalar(-1);
        g.values(m) = pw * (Scalar(1) + parity * damping) / (Scalar(1) + damping);
      }
      return g;
    }
    const std::vector<WeightedIntensity>* parts = nullptr;
    if (const auto* mix = spec.get_if<CoherentMixtureSpec>()) parts = &mix->components;
    if (const auto* at = spec.get_if<AtomicIntensitySpec>()) parts = &at->atoms;
    if (parts) {
      for (Eigen::Index m = 0; m <= max_order; ++m) {
        CompensatedSum<Scalar> acc;
        for (const auto& c : *parts) {
          Scalar pw(1);
          for (Eigen::Index i = 0; i < m; ++i) pw *= Scalar(c.intensity);
          acc.add(Scalar(c.weight) * pw);
        }
        g.values(m) = acc.value();
      }
      return g;
    }
    // Photon-added over a supported base: factorially convergent series.
    long m_add = 0;
    const StateSpec* base = nullptr;
    detail::flatten_photon_added(spec, m_add, base);
    g.tail_exact = false;
    Eigen::Index window =
        std::max<Eigen::Index>(64, 2 * max_order + 8 * m_add + 32);
    for (int round = 0; round < 16; ++round) {
      const Pnd<Scalar> pnd = generate_pnd<Scalar>(spec, window);
      bool converged = true;
      for (Eigen::Index m = 0; m <= max_order; ++m) {
        CompensatedSum<Scalar> acc;
        for (Eigen::Index n = m; n <= window; ++n)
          acc.add(falling_factorial_as<Scalar>(n, m) * pnd[n]);
        const Scalar last = falling_factorial_as<Scalar>(window, m) * pnd[window];
        using std::abs;
        if (!(abs(last) <= std::numeric_limits<Scalar>::epsilon() * abs(acc.value())))
          converged = false;
        g.values(m) = acc.value();
      }
      if (converged) return g;
      window *= 2;
    }
    throw std::runtime_error("gamma_closed_form: photon-added series did not converge");
  }
}

// Q = (gamma_2 - gamma_1^2) / gamma_1. Negative values certify
// sub-Poissonian statistics, hence nonclassicality.
template <typename Scalar>
Scalar mandel_q(const MomentSequence<Scalar>& gamma) {
  if (gamma.kind != MomentKind::Gamma)
    throw std::invalid_argument("mandel_q: Gamma-kind sequence required");
  if (gamma.max_order() < 2)
    throw std::invalid_argument("mandel_q: orders 0..2 required");
  if (!(gamma[1] > Scalar(0)))
    throw std::domain_error("mandel_q: undefined, gamma_1 = 0 (vacuum)");
  return (gamma[2] - gamma[1] * gamma[1]) / gamma[1];
}

// Two-sided bound gamma_m' gamma_m <= gamma_{m'+m} <= sqrt(gamma_2m' gamma_2m)
// for classical states. The right side is evaluated in squared form so the
// check stays exact for rational scalars.
template <typename Scalar>
struct KlauderResult {
  bool left_ok = false;
  bool right_ok = false;
  Scalar left_slack = Scalar(0);           // gamma_{m'+m} - gamma_m' gamma_m
  Scalar right_slack_squared = Scalar(0);  // gamma_2m' gamma_2m - gamma_{m'+m}^2
  bool definitive = false;                 // input moments exact for the state
};

template <typename Scalar>
KlauderResult<Scalar> klauder_check(const MomentSequence<Scalar>& gamma, Eigen::Index m_prime,
                                    Eigen::Index m, Scalar tolerance = default_tolerance<Scalar>()) {
  if (gamma.kind != MomentKind::Gamma)
    throw std::invalid_argument("klauder_check: Gamma-kind sequence required");
  const Eigen::Index need = std::max(m_prime + m, std::max(2 * m_prime, 2 * m));
  if (gamma.max_order() < need)
    throw std::invalid_argument("klauder_check: insufficient order coverage");
  KlauderResult<Scalar> r;
  const Scalar mid = gamma[m_prime + m];
  r.left_slack = mid - gamma[m_prime] * gamma[m];
  r.right_slack_squared = gamma[2 * m_prime] * gamma[2 * m] - mid * mid;
  const Scalar scale = std::max<Scalar>(Scalar(1), mid * mid);
  r.left_ok = r.left_slack >= -tolerance * std::max<Scalar>(Scalar(1), mid);
  r.right_ok = r.right_slack_squared >= -tolerance * scale;
  r.definitive = gamma.tail_exact;
  return r;
}

// Lambda(K) = sum_n (-K)^n p_n / n!, evaluated with compensated summation.
// The remainder bound uses the first omitted term with p <= 1; finite
// support records have zero remainder.
template <typename Scalar>
struct LambdaResult {
  Eigen::VectorX<Scalar> values;
  Eigen::VectorX<Scalar> remainder_bounds;
};

template <typename Scalar>
LambdaResult<Scalar> lambda_generating(const Pnd<Scalar>& pnd,
                                       const std::vector<Scalar>& arguments) {
  LambdaResult<Scalar> out;
  out.values.resize(Eigen::Index(arguments.size()));
  out.remainder_bounds.resize(Eigen::Index(arguments.size()));
  const Eigen::Index K = pnd.truncation_index();
  for (std::size_t j = 0; j < arguments.size(); ++j) {
    const Scalar& a = arguments[j];
    if (a < Scalar(0) || !is_finite_value(a))
      throw std::invalid_argument("lambda_generating: arguments must be finite and >= 0");
    CompensatedSum<Scalar> acc;
    Scalar power(1);  // (-a)^n / n!
    for (Eigen::Index n = 0; n <= K; ++n) {
      acc.add(power * pnd[n]);
      power *= -a / Scalar(double(n + 1));
    }
    out.values(Eigen::Index(j)) = acc.value();
    using std::abs;
    out.remainder_bounds(Eigen::Index(j)) = pnd.finite_support() ? Scalar(0) : abs(power);
  }
  return out;
}

}  // namespace pncc
