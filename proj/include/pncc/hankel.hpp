#pragma once

// Hankel matrix pairs built from a moment sequence and the positive
// semidefiniteness machinery behind the classicality hierarchy.
//
// Exact mode decides PSD through leading principal minors plus a pivoted
// Schur-complement analysis of the singular case (the finite-support
// situation where the underlying measure is a sum of finitely many atom
// projections). Floating modes use a symmetric eigendecomposition with a
// relative tolerance, after an automatic diagonal rescaling that tames the
// conditioning of growing moment sequences.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "pncc/moments.hpp"
#include "pncc/scalars.hpp"

namespace pncc {

template <typename Scalar>
struct HankelPair {
  Eigen::MatrixX<Scalar> unshifted;  // entries m_{i+j}
  Eigen::MatrixX<Scalar> shifted;    // entries m_{i+j+1}
  Eigen::Index order = 0;            // N; both matrices are (N+1) x (N+1)
  MomentKind kind = MomentKind::Q;
};

template <typename Scalar>
HankelPair<Scalar> build_pair(const MomentSequence<Scalar>& moments, Eigen::Index order) {
  if (order < 0) throw std::invalid_argument("build_pair: negative order");
  if (moments.max_order() < 2 * order + 1)
    throw std::invalid_argument("build_pair: sequence too short for order " +
                                std::to_string(order) + " (need index " +
                                std::to_string(2 * order + 1) + ")");
  HankelPair<Scalar> pair;
  pair.order = order;
  pair.kind = moments.kind;
  pair.unshifted.resize(order + 1, order + 1);
  pair.shifted.resize(order + 1, order + 1);
  for (Eigen::Index i = 0; i <= order; ++i)
    for (Eigen::Index j = 0; j <= order; ++j) {
      pair.unshifted(i, j) = moments[i + j];
      pair.shifted(i, j) = moments[i + j + 1];
    }
  return pair;
}

// Only the unshifted matrix, available one order deeper than the pair when
// the sequence has an even number of entries.
template <typename Scalar>
Eigen::MatrixX<Scalar> build_unshifted(const MomentSequence<Scalar>& moments, Eigen::Index order) {
  if (moments.max_order() < 2 * order)
    throw std::invalid_argument("build_unshifted: sequence too short");
  Eigen::MatrixX<Scalar> h(order + 1, order + 1);
  for (Eigen::Index i = 0; i <= order; ++i)
    for (Eigen::Index j = 0; j <= order; ++j) h(i, j) = moments[i + j];
  return h;
}

enum class PsdStatus { Yes, No, Borderline };

inline const char* to_string(PsdStatus s) {
  switch (s) {
    case PsdStatus::Yes: return "yes";
    case PsdStatus::No: return "no";
    case PsdStatus::Borderline: return "borderline";
  }
  return "unknown";
}

struct PsdVerdict {
  PsdStatus status = PsdStatus::Yes;
  Eigen::Index depth = 0;
  ArithmeticMode mode = ArithmeticMode::Double;
  // Floating modes: smallest eigenvalue of the rescaled matrix.
  // Exact mode: the first nonpositive leading principal minor.
  double metric = 0.0;
  std::optional<Eigen::Index> witness_index;  // minor index / eigenvalue slot
  std::optional<Eigen::Index> rank;           // exact singular analysis
  // Floating modes, status No: eigenvector whose Rayleigh quotient is the
  // negative metric (for the rescaled matrix).
  std::vector<double> witness_vector;
  std::string detail;
};

template <typename Scalar>
Scalar exact_determinant(const Eigen::MatrixX<Scalar>& m) {
  if (m.rows() == 0) return Scalar(1);
  if (m.rows() == 1) return m(0, 0);
  if (m.rows() == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return Eigen::FullPivLU<Eigen::MatrixX<Scalar>>(m).determinant();
}

template <typename Scalar>
Eigen::VectorX<Scalar> leading_principal_minors(const Eigen::MatrixX<Scalar>& m) {
  Eigen::VectorX<Scalar> minors(m.rows());
  for (Eigen::Index k = 0; k < m.rows(); ++k)
    minors(k) = exact_determinant<Scalar>(m.topLeftCorner(k + 1, k + 1));
  return minors;
}

namespace detail {

// Exact PSD decision by pivoted Schur complements. Pivots on the largest
// positive diagonal entry; a negative diagonal entry refutes PSD, and a
// zero diagonal with a nonzero residual row does too (a PSD matrix with a
// zero diagonal entry must vanish along that row and column).
template <typename Scalar>
struct ExactPsdResult {
  bool psd = false;
  Eigen::Index rank = 0;
  std::optional<Eigen::Index> witness_index;
  std::string detail;
};

template <typename Scalar>
ExactPsdResult<Scalar> exact_psd_decide(Eigen::MatrixX<Scalar> a) {
  ExactPsdResult<Scalar> r;
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> active(n);
  for (Eigen::Index i = 0; i < n; ++i) active[i] = i;

  while (!active.empty()) {
    Eigen::Index pivot = -1;
    for (const Eigen::Index i : active) {
      if (a(i, i) < Scalar(0)) {
        r.psd = false;
        r.witness_index = i;
        r.detail = "negative diagonal entry after " + std::to_string(r.rank) + " pivots";
        return r;
      }
      if (a(i, i) > Scalar(0) && (pivot < 0 || a(i, i) > a(pivot, pivot))) pivot = i;
    }
    if (pivot < 0) {
      // All remaining diagonal entries vanish; PSD forces the block to zero.
      for (const Eigen::Index i : active)
        for (const Eigen::Index j : active)
          if (a(i, j) != Scalar(0)) {
            r.psd = false;
            r.witness_index = i;
            r.detail = "zero diagonal with nonzero off-diagonal residual";
            return r;
          }
      r.psd = true;
      r.detail = "rank " + std::to_string(r.rank);
      return r;
    }
    ++r.rank;
    std::vector<Eigen::Index> next;
    next.reserve(active.size() - 1);
    for (const Eigen::Index i : active)
      if (i != pivot) next.push_back(i);
    for (const Eigen::Index i : next)
      for (const Eigen::Index j : next)
        a(i, j) -= a(i, pivot) * a(j, pivot) / a(pivot, pivot);
    active.swap(next);
  }
  r.psd = true;
  r.detail = "rank " + std::to_string(r.rank);
  return r;
}

template <typename Scalar>
PsdVerdict psd_one_exact(const Eigen::MatrixX<Scalar>& m) {
  PsdVerdict v;
  v.depth = m.rows() - 1;
  v.mode = mode_v<Scalar>;
  const auto minors = leading_principal_minors(m);
  for (Eigen::Index k = 0; k < minors.size(); ++k) {
    if (minors(k) > Scalar(0)) continue;
    if (minors(k) < Scalar(0)) {
      v.status = PsdStatus::No;
      v.metric = to_double(minors(k));
      v.witness_index = k;
      v.detail = "leading principal minor D_" + std::to_string(k) + " < 0";
      return v;
    }
    // Zero minor: decide the singular (finite-support) case by rank
    // analysis of the full matrix.
    const auto exact = exact_psd_decide<Scalar>(m);
    v.metric = 0.0;
    v.rank = exact.rank;
    if (exact.psd) {
      v.status = PsdStatus::Yes;
      v.detail = "positive semidefinite, singular (" + exact.detail + ")";
    } else {
      v.status = PsdStatus::No;
      v.witness_index = exact.witness_index.value_or(k);
      v.detail = "singular analysis failed: " + exact.detail;
    }
    return v;
  }
  v.status = PsdStatus::Yes;
  v.metric = to_double(minors(minors.size() - 1));
  v.rank = m.rows();
  v.detail = "positive definite (all leading minors positive)";
  return v;
}

template <typename Scalar>
PsdVerdict psd_one_float(const Eigen::MatrixX<Scalar>& m, const Scalar& tolerance) {
  PsdVerdict v;
  v.depth = m.rows() - 1;
  v.mode = mode_v<Scalar>;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixX<Scalar>> solver(m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("symmetric eigendecomposition failed");
  const Scalar lambda_min = solver.eigenvalues()(0);
  const Scalar lambda_max = solver.eigenvalues()(m.rows() - 1);
  using std::abs;
  const Scalar scale = std::max<Scalar>(Scalar(1), abs(lambda_max));
  v.metric = to_double(lambda_min);
  v.witness_index = 0;
  if (lambda_min < -tolerance * scale) {
    v.status = PsdStatus::No;
    v.detail = "negative eigenvalue beyond tolerance";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      v.witness_vector.push_back(to_double(solver.eigenvectors()(i, 0)));
  } else if (abs(lambda_min) <= tolerance * scale) {
    v.status = PsdStatus::Borderline;
    v.detail = "smallest eigenvalue within tolerance of zero";
  } else {
    v.status = PsdStatus::Yes;
    v.detail = "positive definite within tolerance";
  }
  return v;
}

// Diagonal congruence H -> D H D with D = diag(c^-i), which maps entries
// m_{i+j} -> m_{i+j} / c^{i+j}. PSD status is invariant; conditioning of
// geometric-like sequences improves dramatically.
template <typename Scalar>
Eigen::MatrixX<Scalar> rescale_matrix(const Eigen::MatrixX<Scalar>& m, const Scalar& c,
                                      int extra_shift) {
  const Eigen::Index n = m.rows();
  Eigen::VectorX<Scalar> d(n);
  Scalar acc(1);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i) = acc;
    acc /= c;
  }
  Eigen::MatrixX<Scalar> out = d.asDiagonal() * m * d.asDiagonal();
  if (extra_shift > 0) out /= c;
  return out;
}

// A negative-quadratic-form vector for the rescaled matrix certifies the
// original through the same congruence.
template <typename Scalar>
void unscale_witness(PsdVerdict& v, const Scalar& c) {
  double factor = 1.0;
  for (auto& entry : v.witness_vector) {
    entry *= factor;
    factor /= to_double(c);
  }
}

}  // namespace detail

template <typename Scalar>
PsdVerdict psd_check_matrix(const Eigen::MatrixX<Scalar>& m,
                            Scalar tolerance = default_tolerance<Scalar>()) {
  if (m.rows() != m.cols() || !m.isApprox(m.transpose(), Scalar(0)))
    throw std::invalid_argument("psd_check: matrix not symmetric");
  if constexpr (is_exact_v<Scalar>) {
    (void)tolerance;
    return detail::psd_one_exact(m);
  } else {
    Eigen::MatrixX<Scalar> work = m;
    Scalar c(1);
    if (m.rows() > 1 && m(0, 0) > Scalar(0) && m(0, 1) > Scalar(0)) {
      c = m(0, 1) / m(0, 0);
      work = detail::rescale_matrix(m, c, 0);
    }
    auto verdict = detail::psd_one_float(work, tolerance);
    detail::unscale_witness(verdict, c);
    return verdict;
  }
}

template <typename Scalar>
std::pair<PsdVerdict, PsdVerdict> psd_check(const HankelPair<Scalar>& pair,
                                            Scalar tolerance = default_tolerance<Scalar>()) {
  if constexpr (is_exact_v<Scalar>) {
    return {detail::psd_one_exact(pair.unshifted), detail::psd_one_exact(pair.shifted)};
  } else {
    Eigen::MatrixX<Scalar> u = pair.unshifted;
    Eigen::MatrixX<Scalar> s = pair.shifted;
    Scalar c(1);
    if (pair.unshifted(0, 0) > Scalar(0) && pair.shifted(0, 0) > Scalar(0)) {
      c = pair.shifted(0, 0) / pair.unshifted(0, 0);
      u = detail::rescale_matrix(pair.unshifted, c, 0);
      s = detail::rescale_matrix(pair.shifted, c, 1);
    }
    auto verdict_u = detail::psd_one_float(u, tolerance);
    auto verdict_s = detail::psd_one_float(s, tolerance);
    detail::unscale_witness(verdict_u, c);
    detail::unscale_witness(verdict_s, c);
    return {std::move(verdict_u), std::move(verdict_s)};
  }
}

// Sign of a determinant resolved against a Hadamard-style scale so that a
// numerically tiny value of either sign classifies as zero.
template <typename Scalar>
int classify_sign(const Scalar& det, const Eigen::MatrixX<Scalar>& m, const Scalar& tolerance) {
  if constexpr (is_exact_v<Scalar>) {
    (void)m;
    (void)tolerance;
    return det > Scalar(0) ? 1 : (det < Scalar(0) ? -1 : 0);
  } else {
    Scalar scale(1);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      using std::sqrt;
      scale *= sqrt(m.row(i).squaredNorm());
    }
    using std::abs;
    const Scalar threshold = tolerance * std::max<Scalar>(Scalar(1), scale);
    if (abs(det) <= threshold) return 0;
    return det > Scalar(0) ? 1 : -1;
  }
}

template <typename Scalar>
struct HierarchyEntry {
  Eigen::Index depth = 0;
  std::optional<Scalar> det_unshifted;
  std::optional<Scalar> det_shifted;
  int sign_unshifted = 0;  // -1, 0, +1 after tolerance classification
  int sign_shifted = 0;
};

template <typename Scalar>
struct DeterminantHierarchy {
  std::vector<HierarchyEntry<Scalar>> entries;
  std::optional<Eigen::Index> first_negative_depth;
  bool first_negative_in_shifted = false;
};

// D_N = det L^(N) and the shifted analogue for N = 0..max_order. The first
// negative determinant in either family is the nonclassicality witness
// depth. Floating modes classify signs on the rescaled matrices.
template <typename Scalar>
DeterminantHierarchy<Scalar> determinant_hierarchy(const MomentSequence<Scalar>& moments,
                                                   Eigen::Index max_order,
                                                   Scalar tolerance = default_tolerance<Scalar>()) {
  if (moments.max_order() < 2 * max_order)
    throw std::invalid_argument("determinant_hierarchy: sequence too short for requested depth");
  DeterminantHierarchy<Scalar> h;
  for (Eigen::Index N = 0; N <= max_order; ++N) {
    HierarchyEntry<Scalar> e;
    e.depth = N;
    const auto u = build_unshifted(moments, N);
    const Scalar du = exact_determinant<Scalar>(u);
    e.det_unshifted = du;
    e.sign_unshifted = classify_sign(du, u, tolerance);
    if (moments.max_order() >= 2 * N + 1) {
      Eigen::MatrixX<Scalar> s(N + 1, N + 1);
      for (Eigen::Index i = 0; i <= N; ++i)
        for (Eigen::Index j = 0; j <= N; ++j) s(i, j) = moments[i + j + 1];
      const Scalar ds = exact_determinant<Scalar>(s);
      e.det_shifted = ds;
      e.sign_shifted = classify_sign(ds, s, tolerance);
    }
    if (!h.first_negative_depth) {
      if (e.sign_unshifted < 0) {
        h.first_negative_depth = N;
        h.first_negative_in_shifted = false;
      } else if (e.det_shifted && e.sign_shifted < 0) {
        h.first_negative_depth = N;
        h.first_negative_in_shifted = true;
      }
    }
    h.entries.push_back(std::move(e));
  }
  return h;
}

// m_n -> m_n / c^n with c = m_1/m_0; a diagonal congruence on every Hankel
// matrix, so PSD verdicts are unchanged while entries flatten towards 1.
template <typename Scalar>
struct RescaledSequence {
  MomentSequence<Scalar> moments;
  Scalar scale = Scalar(1);
};

template <typename Scalar>
RescaledSequence<Scalar> rescale_for_conditioning(const MomentSequence<Scalar>& moments) {
  if (moments.values.size() < 2 || !(moments[0] > Scalar(0)) || !(moments[1] > Scalar(0)))
    throw std::invalid_argument("rescale_for_conditioning: needs m_0 > 0 and m_1 > 0");
  RescaledSequence<Scalar> out;
  out.scale = moments[1] / moments[0];
  out.moments = moments;
  Scalar power(1);
  for (Eigen::Index n = 0; n < moments.values.size(); ++n) {
    out.moments.values(n) = moments[n] / power;
    power *= out.scale;
  }
  return out;
}

}  // namespace pncc
