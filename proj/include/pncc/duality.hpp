#pragma once

// The triangular transform connecting the two moment sequences:
// gamma_n = sum_k q_{n+k}/k! and its alternating inverse, together with the
// congruences M = S^{1/2} L (S^{1/2})^T relating the two Hankel families.
// All four transform matrices are upper triangular, share the property of
// being unchanged under deletion of their first row and column, and are
// exactly representable for rational scalars.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "pncc/hankel.hpp"
#include "pncc/moments.hpp"
#include "pncc/scalars.hpp"

namespace pncc {

enum class STransformFamily { S, SInverse, SHalf, SHalfInverse };

// Entry (j,k) is r^{k-j}/(k-j)! for k >= j with ratio r = 1, -1, 1/2, -1/2.
template <typename Scalar>
Eigen::MatrixX<Scalar> s_transform(STransformFamily family, Eigen::Index size) {
  Scalar ratio(1);
  switch (family) {
    case STransformFamily::S: ratio = Scalar(1); break;
    case STransformFamily::SInverse: ratio = Scalar(-1); break;
    case STransformFamily::SHalf: ratio = Scalar(1) / Scalar(2); break;
    case STransformFamily::SHalfInverse: ratio = Scalar(-1) / Scalar(2); break;
  }
  Eigen::MatrixX<Scalar> m = Eigen::MatrixX<Scalar>::Zero(size, size);
  for (Eigen::Index j = 0; j < size; ++j) {
    Scalar entry(1);
    for (Eigen::Index k = j; k < size; ++k) {
      m(j, k) = entry;
      entry *= ratio / Scalar(double(k - j + 1));
    }
  }
  return m;
}

template <typename Scalar>
struct TransformedSequence {
  MomentSequence<Scalar> moments;
  Eigen::VectorX<Scalar> last_term;  // magnitude of the last included term
  std::vector<bool> converged;       // per order
  bool all_converged = false;
};

struct TransformOptions {
  // When set, a non-converged order throws instead of being flagged.
  bool require_converged = true;
};

// gamma_n = sum_{k} q_{n+k}/k! over the available entries. Exact when the
// input tail is exactly zero; otherwise the last included term serves as
// the convergence diagnostic (the true tail decays at least as 1/k! times
// the growth of q).
template <typename Scalar>
TransformedSequence<Scalar> q_to_gamma(const MomentSequence<Scalar>& q, Eigen::Index orders,
                                       TransformOptions options = {},
                                       Scalar tolerance = default_tolerance<Scalar>()) {
  if (q.kind != MomentKind::Q) throw std::invalid_argument("q_to_gamma: Q-kind sequence required");
  if (orders > q.max_order())
    throw std::invalid_argument("q_to_gamma: more orders requested than entries available");
  TransformedSequence<Scalar> out;
  out.moments.kind = MomentKind::Gamma;
  out.moments.provenance = MomentProvenance::Transformed;
  out.moments.tail_exact = q.tail_exact;
  out.moments.values.resize(orders + 1);
  out.last_term.resize(orders + 1);
  out.converged.assign(orders + 1, q.tail_exact);
  out.all_converged = true;
  using std::abs;
  for (Eigen::Index n = 0; n <= orders; ++n) {
    CompensatedSum<Scalar> acc;
    Scalar inv_fact(1);
    Scalar term(0);
    for (Eigen::Index k = 0; n + k <= q.max_order(); ++k) {
      term = q[n + k] * inv_fact;
      acc.add(term);
      inv_fact /= Scalar(double(k + 1));
    }
    out.moments.values(n) = acc.value();
    out.last_term(n) = abs(term);
    if (!q.tail_exact) {
      const Scalar scale = std::max<Scalar>(Scalar(1), abs(acc.value()));
      out.converged[n] = abs(term) <= tolerance * scale;
    }
    if (!out.converged[n]) {
      out.all_converged = false;
      if (options.require_converged)
        throw std::runtime_error("q_to_gamma: series not converged at order " + std::to_string(n) +
                                 "; extend the record or relax require_converged");
    }
  }
  return out;
}

// q_n = sum_k (-1)^k gamma_{n+k}/k! over the available entries. For inputs
// whose tail is exactly zero this is the exact inverse of q_to_gamma on the
// same window (the triangular sums telescope); otherwise the alternating
// structure gives a remainder bracket once the terms decrease.
template <typename Scalar>
TransformedSequence<Scalar> gamma_to_q(const MomentSequence<Scalar>& gamma, Eigen::Index orders,
                                       TransformOptions options = {},
                                       Scalar tolerance = default_tolerance<Scalar>()) {
  if (gamma.kind != MomentKind::Gamma)
    throw std::invalid_argument("gamma_to_q: Gamma-kind sequence required");
  if (orders > gamma.max_order())
    throw std::invalid_argument("gamma_to_q: more orders requested than entries available");
  TransformedSequence<Scalar> out;
  out.moments.kind = MomentKind::Q;
  out.moments.provenance = MomentProvenance::Transformed;
  out.moments.tail_exact = gamma.tail_exact;
  out.moments.values.resize(orders + 1);
  out.last_term.resize(orders + 1);
  out.converged.assign(orders + 1, gamma.tail_exact);
  out.all_converged = true;
  using std::abs;
  for (Eigen::Index n = 0; n <= orders; ++n) {
    CompensatedSum<Scalar> acc;
    Scalar coeff(1);  // (-1)^k / k!
    Scalar term(0);
    Eigen::Index last_increase = -1, last_k = 0;
    Scalar prev_mag(0);
    for (Eigen::Index k = 0; n + k <= gamma.max_order(); ++k) {
      term = gamma[n + k] * coeff;
      acc.add(term);
      if (k > 0 && abs(term) > prev_mag) last_increase = k;
      prev_mag = abs(term);
      last_k = k;
      coeff *= Scalar(-1) / Scalar(double(k + 1));
    }
    out.moments.values(n) = acc.value();
    out.last_term(n) = abs(term);
    if (!gamma.tail_exact) {
      // The alternating remainder bracket applies once the magnitudes are
      // decreasing through the end of the window.
      const bool decreasing_tail = last_increase <= last_k - 2;
      const Scalar scale = std::max<Scalar>(Scalar(1), abs(acc.value()));
      out.converged[n] = decreasing_tail && abs(term) <= tolerance * scale;
    }
    if (!out.converged[n]) {
      out.all_converged = false;
      if (options.require_converged)
        throw std::runtime_error("gamma_to_q: alternating series not converged at order " +
                                 std::to_string(n));
    }
  }
  return out;
}

// Compares S^{1/2} L (S^{1/2})^T against M on the leading block of the
// given order. The L pair must be built on an enlarged section; the excess
// is the padding that controls the finite-section error, which decays like
// the tail of sum 1/s! past the padding.
template <typename Scalar>
struct CongruenceReport {
  Scalar residual_unshifted = Scalar(0);
  Scalar residual_shifted = Scalar(0);
  Scalar tail_bound = Scalar(0);
  bool within_bound = false;
  bool bound_certified = false;  // bound rigorous only for exactly-zero tails
  Eigen::Index compared_order = 0;
  Eigen::Index padding = 0;
};

template <typename Scalar>
CongruenceReport<Scalar> congruence_check(const HankelPair<Scalar>& l_pair,
                                          const HankelPair<Scalar>& m_pair, Eigen::Index order) {
  if (l_pair.kind != MomentKind::Q || m_pair.kind != MomentKind::Gamma)
    throw std::invalid_argument("congruence_check: expected a Q-kind and a Gamma-kind pair");
  if (l_pair.order < order || m_pair.order < order)
    throw std::invalid_argument("congruence_check: pairs too small for the compared order");
  CongruenceReport<Scalar> r;
  r.compared_order = order;
  r.padding = l_pair.order - order;

  const auto s_half = s_transform<Scalar>(STransformFamily::SHalf, l_pair.order + 1);
  const Eigen::MatrixX<Scalar> mu = s_half * l_pair.unshifted * s_half.transpose();
  const Eigen::MatrixX<Scalar> ms = s_half * l_pair.shifted * s_half.transpose();

  using std::abs;
  Scalar ru(0), rs(0);
  for (Eigen::Index i = 0; i <= order; ++i)
    for (Eigen::Index j = 0; j <= order; ++j) {
      ru = std::max<Scalar>(ru, abs(mu(i, j) - m_pair.unshifted(i, j)));
      rs = std::max<Scalar>(rs, abs(ms(i, j) - m_pair.shifted(i, j)));
    }
  r.residual_unshifted = ru;
  r.residual_shifted = rs;

  Scalar q_max(0);
  for (Eigen::Index i = 0; i <= l_pair.order; ++i)
    for (Eigen::Index j = 0; j <= l_pair.order; ++j)
      q_max = std::max<Scalar>(q_max, abs(l_pair.shifted(i, j)));
  for (Eigen::Index i = 0; i <= l_pair.order; ++i)
    q_max = std::max<Scalar>(q_max, abs(l_pair.unshifted(i, 0)));
  Scalar tail(0), inv_fact(1);
  for (Eigen::Index s = 1; s <= r.padding; ++s) inv_fact /= Scalar(double(s));
  // sum_{s > padding} 1/s!  <  2/(padding+1)!
  tail = Scalar(2) * inv_fact / Scalar(double(r.padding + 1));
  r.tail_bound = q_max * tail;
  r.within_bound = ru <= r.tail_bound && rs <= r.tail_bound;
  r.bound_certified = false;
  return r;
}

}  // namespace pncc
