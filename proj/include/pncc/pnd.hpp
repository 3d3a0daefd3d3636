#pragma once

// Photon number distributions: the core finite record type, validation,
// and exact generators for the reference states used throughout the
// library (coherent, thermal, two-component superpositions, coherent
// mixtures, atomic intensity measures, Fock states, photon additions).

#include <Eigen/Core>

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pncc/scalars.hpp"

namespace pncc {

enum class NormalizationMode { Strict, TruncatedTail };

inline const char* to_string(NormalizationMode m) {
  return m == NormalizationMode::Strict ? "strict" : "truncated";
}

template <typename Scalar>
struct ValidationResult {
  bool nonnegative = true;
  std::vector<Eigen::Index> negative_indices;
  Scalar sum = Scalar(0);
  bool strict_ok = false;     // |sum - 1| <= tol
  bool truncated_ok = false;  // sum <= 1 + tol
  bool valid = false;         // for the mode that was requested
  Eigen::Index hankel_depth_unshifted = 0;  // max N with L^(N) buildable
  Eigen::Index hankel_depth_shifted = 0;    // max N with shifted matrix buildable
  std::string message;
};

template <typename Scalar>
ValidationResult<Scalar> validate(const Eigen::VectorX<Scalar>& p, NormalizationMode mode,
                                  Scalar tolerance = default_tolerance<Scalar>()) {
  ValidationResult<Scalar> r;
  if (p.size() == 0) {
    r.valid = false;
    r.message = "empty record";
    return r;
  }
  CompensatedSum<Scalar> acc;
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    if (p(n) < Scalar(0) || !is_finite_value(p(n))) {
      r.nonnegative = false;
      r.negative_indices.push_back(n);
    }
    acc.add(p(n));
  }
  r.sum = acc.value();
  using std::abs;
  r.strict_ok = abs(r.sum - Scalar(1)) <= tolerance;
  r.truncated_ok = r.sum <= Scalar(1) + tolerance;
  r.valid = r.nonnegative && (mode == NormalizationMode::Strict ? r.strict_ok : r.truncated_ok);
  const Eigen::Index K = p.size() - 1;
  r.hankel_depth_unshifted = K / 2;
  r.hankel_depth_shifted = K >= 1 ? (K - 1) / 2 : -1;
  if (!r.nonnegative)
    r.message = "negative entries present";
  else if (!r.valid)
    r.message = mode == NormalizationMode::Strict ? "sum deviates from 1" : "sum exceeds 1";
  else
    r.message = "valid";
  return r;
}

// A finite record p_0..p_K. Strict records must sum to 1 within tolerance;
// truncated-tail records may sum to anything <= 1 + tolerance. The
// finite_support flag asserts that every entry beyond K is exactly zero.
template <typename Scalar>
class Pnd {
 public:
  Pnd(Eigen::VectorX<Scalar> probabilities, NormalizationMode mode,
      Scalar tolerance = default_tolerance<Scalar>(), bool finite_support = false)
      : p_(std::move(probabilities)), mode_(mode), finite_support_(finite_support) {
    const auto check = validate(p_, mode_, tolerance);
    if (!check.valid)
      throw std::invalid_argument("invalid PND: " + check.message);
  }

  const Eigen::VectorX<Scalar>& probabilities() const { return p_; }
  const Scalar& operator[](Eigen::Index n) const { return p_(n); }
  Eigen::Index truncation_index() const { return p_.size() - 1; }
  Eigen::Index size() const { return p_.size(); }
  NormalizationMode mode() const { return mode_; }
  bool finite_support() const { return finite_support_; }

 private:
  Eigen::VectorX<Scalar> p_;
  NormalizationMode mode_;
  bool finite_support_;
};

template <typename Scalar>
ValidationResult<Scalar> validate(const Pnd<Scalar>& pnd,
                                  Scalar tolerance = default_tolerance<Scalar>()) {
  return validate(pnd.probabilities(), pnd.mode(), tolerance);
}

// ---------------------------------------------------------------------------
// Reference state specifications

struct CoherentSpec {
  double intensity = 0.0;  // |z0|^2
};

struct ThermalSpec {
  double mean_occupation = 0.0;  // nbar
};

// (|z0> + e^{i theta} |-z0>) / sqrt(N)
struct SuperpositionSpec {
  double intensity = 0.0;
  double relative_phase = 0.0;  // theta in [0, 2pi)
};

struct WeightedIntensity {
  double weight = 0.0;
  double intensity = 0.0;
};

struct CoherentMixtureSpec {
  std::vector<WeightedIntensity> components;
};

// A finite-atom intensity distribution given directly.
struct AtomicIntensitySpec {
  std::vector<WeightedIntensity> atoms;
};

struct FockSpec {
  long occupation = 0;
};

class StateSpec;

struct PhotonAddedSpec {
  long added_photons = 1;
  std::shared_ptr<const StateSpec> base;
};

using StateSpecVariant = std::variant<CoherentSpec, ThermalSpec, SuperpositionSpec,
                                      CoherentMixtureSpec, AtomicIntensitySpec, FockSpec,
                                      PhotonAddedSpec>;

class StateSpec {
 public:
  StateSpec(StateSpecVariant value, std::string label = {})
      : value_(std::move(value)), label_(std::move(label)) {}

  const StateSpecVariant& value() const { return value_; }
  const std::string& label() const { return label_; }

  template <typename V>
  const V* get_if() const {
    return std::get_if<V>(&value_);
  }

 private:
  StateSpecVariant value_;
  std::string label_;
};

inline void validate_weighted(const std::vector<WeightedIntensity>& parts, const char* what) {
  if (parts.empty())
    throw std::invalid_argument(std::string(what) + ": no components");
  double total = 0.0;
  for (const auto& c : parts) {
    if (!(c.weight > 0.0))
      throw std::invalid_argument(std::string(what) + ": weights must be positive");
    if (!(c.intensity >= 0.0))
      throw std::invalid_argument(std::string(what) + ": intensities must be nonnegative");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument(std::string(what) + ": weights must sum to 1");
}

inline void validate_spec(const StateSpec& spec) {
  std::visit(
      [](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, CoherentSpec>) {
          if (!(v.intensity >= 0.0)) throw std::invalid_argument("coherent: intensity must be >= 0");
        } else if constexpr (std::is_same_v<V, ThermalSpec>) {
          if (!(v.mean_occupation >= 0.0)) throw std::invalid_argument("thermal: nbar must be >= 0");
        } else if constexpr (std::is_same_v<V, SuperpositionSpec>) {
          if (!(v.intensity >= 0.0)) throw std::invalid_argument("superposition: intensity must be >= 0");
          if (v.intensity == 0.0 && std::cos(v.relative_phase) <= -1.0 + 1e-15)
            throw std::invalid_argument("superposition: null state (mu = 0, theta = pi)");
        } else if constexpr (std::is_same_v<V, CoherentMixtureSpec>) {
          validate_weighted(v.components, "coherent mixture");
        } else if constexpr (std::is_same_v<V, AtomicIntensitySpec>) {
          validate_weighted(v.atoms, "atomic intensity");
        } else if constexpr (std::is_same_v<V, FockSpec>) {
          if (v.occupation < 0) throw std::invalid_argument("fock: occupation must be >= 0");
        } else if constexpr (std::is_same_v<V, PhotonAddedSpec>) {
          if (v.added_photons < 1) throw std::invalid_argument("photon-added: m must be >= 1");
          if (!v.base) throw std::invalid_argument("photon-added: missing base state");
          validate_spec(*v.base);
        }
      },
      spec.value());
}

namespace detail {

// Poisson weights e^{-mu} mu^n / n!; mu = 0 degenerates to the vacuum.
template <typename Scalar>
Eigen::VectorX<Scalar> poisson_column(const Scalar& mu, Eigen::Index K) {
  Eigen::VectorX<Scalar> p = Eigen::VectorX<Scalar>::Zero(K + 1);
  if (mu == Scalar(0)) {
    p(0) = Scalar(1);
    return p;
  }
  using std::exp;
  p(0) = exp(-mu);
  for (Eigen::Index n = 1; n <= K; ++n) p(n) = p(n - 1) * mu / Scalar(double(n));
  return p;
}

// Flattens nested photon additions: adding m2 photons to an m1-added state
// is the same state as adding m1+m2 photons to the underlying base.
inline void flatten_photon_added(const StateSpec& spec, long& added, const StateSpec*& base) {
  added = 0;
  base = &spec;
  while (const auto* pa = base->template get_if<PhotonAddedSpec>()) {
    added += pa->added_photons;
    base = pa->base.get();
  }
}

template <typename Scalar>
Scalar coherent_added_norm(const Scalar& mu, long m) {
  // sum_n (n+m)!/n! e^{-mu} mu^n/n!  =  m! L_m(-mu)
  Scalar total(0);
  for (long k = 0; k <= m; ++k) {
    const BigInt binom = factorial_int(m) / (factorial_int(k) * factorial_int(m - k));
    const Scalar coeff = convert_big<Scalar>(factorial_int(m) * binom / factorial_int(k));
    Scalar mu_k(1);
    for (long i = 0; i < k; ++i) mu_k *= mu;
    total += coeff * mu_k;
  }
  return total;
}

template <typename Scalar>
Scalar photon_added_norm(const StateSpec& base, long m);

}  // namespace detail

template <typename Scalar>
Pnd<Scalar> generate_pnd(const StateSpec& spec, Eigen::Index K);

namespace detail {

// Normalisation constant sum_n (n+m)!/n! p_n for the supported bases;
// closed forms where the paper's sums close, a factorially convergent
// series for superposition bases.
template <typename Scalar>
Scalar photon_added_norm(const StateSpec& base, long m) {
  if (const auto* c = base.get_if<CoherentSpec>())
    return coherent_added_norm(Scalar(c->intensity), m);
  if (const auto* t = base.get_if<ThermalSpec>()) {
    Scalar v = factorial_as<Scalar>(m);
    for (long i = 0; i < m; ++i) v *= Scalar(1) + Scalar(t->mean_occupation);
    return v;
  }
  if (const auto* f = base.get_if<FockSpec>())
    return convert_big<Scalar>(factorial_int(f->occupation + m) / factorial_int(f->occupation));
  if (const auto* mix = base.get_if<CoherentMixtureSpec>()) {
    Scalar v(0);
    for (const auto& c : mix->components)
      v += Scalar(c.weight) * coherent_added_norm(Scalar(c.intensity), m);
    return v;
  }
  if (const auto* at = base.get_if<AtomicIntensitySpec>()) {
    Scalar v(0);
    for (const auto& c : at->atoms)
      v += Scalar(c.weight) * coherent_added_norm(Scalar(c.intensity), m);
    return v;
  }
  // Superposition: converged series, the Poissonian envelope decays
  // factorially so doubling the window until the last term is negligible
  // terminates quickly.
  if constexpr (!is_exact_v<Scalar>) {
    const auto* s = base.get_if<SuperpositionSpec>();
    if (s) {
      Eigen::Index window = std::max<Eigen::Index>(32, Eigen::Index(4 * s->intensity) + 8 * m);
      for (int round = 0; round < 20; ++round) {
        const Pnd<Scalar> pnd = generate_pnd<Scalar>(base, window);
        CompensatedSum<Scalar> acc;
        for (Eigen::Index n = 0; n <= window; ++n)
          acc.add(falling_factorial_as<Scalar>(n + m, m) * pnd[n]);
        const Scalar last = falling_factorial_as<Scalar>(window + m, m) * pnd[window];
        using std::abs;
        if (abs(last) <= std::numeric_limits<Scalar>::epsilon() * abs(acc.value()))
          return acc.value();
        window *= 2;
      }
      throw std::runtime_error("photon-added normalisation series did not converge");
    }
  }
  throw std::invalid_argument("photon-added base not supported in this arithmetic mode");
}

}  // namespace detail

// Closed-form PND generation. Exact arithmetic supports only the Fock
// variant (the others involve exponentials); the floating modes support
// the full family. Results are truncated-tail records.
template <typename Scalar>
Pnd<Scalar> generate_pnd(const StateSpec& spec, Eigen::Index K) {
  if (K < 0) throw std::invalid_argument("truncation index must be >= 0");
  validate_spec(spec);

  if (const auto* f = spec.get_if<FockSpec>()) {
    Eigen::VectorX<Scalar> p = Eigen::VectorX<Scalar>::Zero(K + 1);
    if (f->occupation <= K) p(f->occupation) = Scalar(1);
    return Pnd<Scalar>(std::move(p), NormalizationMode::TruncatedTail, default_tolerance<Scalar>(),
                       /*finite_support=*/f->occupation <= K);
  }

  if constexpr (is_exact_v<Scalar>) {
    throw std::invalid_argument(
        "exact arithmetic supports only Fock generators; use a floating mode or supply rational data");
  } else {
    using std::cos;
    using std::exp;
    if (const auto* c = spec.get_if<CoherentSpec>()) {
      return Pnd<Scalar>(detail::poisson_column(Scalar(c->intensity), K),
                         NormalizationMode::TruncatedTail);
    }
    if (const auto* t = spec.get_if<ThermalSpec>()) {
      Eigen::VectorX<Scalar> p(K + 1);
      const Scalar nbar(t->mean_occupation);
      const Scalar ratio = nbar / (Scalar(1) + nbar);
      p(0) = Scalar(1) / (Scalar(1) + nbar);
      for (Eigen::Index n = 1; n <= K; ++n) p(n) = p(n - 1) * ratio;
      return Pnd<Scalar>(std::move(p), NormalizationMode::TruncatedTail);
    }
    if (const auto* s = spec.get_if<SuperpositionSpec>()) {
      const Scalar mu(s->intensity);
      const Scalar c = Scalar(std::cos(s->relative_phase));
      const Scalar denom = Scalar(1) + exp(Scalar(-2) * mu) * c;
      Eigen::VectorX<Scalar> p = detail::poisson_column(mu, K);
      for (Eigen::Index n = 0; n <= K; ++n) {
        const Scalar parity = (n % 2 == 0) ? Scalar(1) : Scalar(-1);
        p(n) *= (Scalar(1) + parity * c) / denom;
      }
      return Pnd<Scalar>(std::move(p), NormalizationMode::TruncatedTail);
    }
    const std::vector<WeightedIntensity>* parts = nullptr;
    if (const auto* mix = spec.get_if<CoherentMixtureSpec>()) parts = &mix->components;
    if (const auto* at = spec.get_if<AtomicIntensitySpec>()) parts = &at->atoms;
    if (parts) {
      Eigen::VectorX<Scalar> p = Eigen::VectorX<Scalar>::Zero(K + 1);
      for (const auto& c : *parts)
        p += Scalar(c.weight) * detail::poisson_column(Scalar(c.intensity), K);
      return Pnd<Scalar>(std::move(p), NormalizationMode::TruncatedTail);
    }
    long m = 0;
    const StateSpec* base = nullptr;
    detail::flatten_photon_added(spec, m, base);
    if (m > K)
      throw std::invalid_argument("truncation index too small for the requested photon addition");
    const Pnd<Scalar> base_pnd = generate_pnd<Scalar>(*base, K - m);
    const Scalar norm = detail::photon_added_norm<Scalar>(*base, m);
    Eigen::VectorX<Scalar> p = Eigen::VectorX<Scalar>::Zero(K + 1);
    for (Eigen::Index n = m; n <= K; ++n)
      p(n) = falling_factorial_as<Scalar>(n, m) * base_pnd[n - m] / norm;
    return Pnd<Scalar>(std::move(p), NormalizationMode::TruncatedTail, default_tolerance<Scalar>(),
                       base_pnd.finite_support());
  }
}

// p'_n = N^{-1} n!/(n-m)! p_{n-m} with N the truncated sum of
// (n+m)!/n! p_n over the available record. The truncated N is only an
// approximation of the true constant unless the input has finite support;
// all downstream sign conditions are invariant under it.
template <typename Scalar>
Pnd<Scalar> photon_add(const Pnd<Scalar>& pnd, long m) {
  if (m < 1) throw std::invalid_argument("photon_add: m must be >= 1");
  const auto& p = pnd.probabilities();
  Scalar norm(0);
  for (Eigen::Index n = 0; n < p.size(); ++n)
    norm += falling_factorial_as<Scalar>(n + m, m) * p(n);
  if (!(norm > Scalar(0)))
    throw std::invalid_argument("photon_add: input has no positive entry");
  if (!is_finite_value(norm))
    throw std::overflow_error("photon_add: normalisation overflow; use a wider arithmetic mode");
  const Eigen::Index K_out = pnd.truncation_index() + m;
  Eigen::VectorX<Scalar> out = Eigen::VectorX<Scalar>::Zero(K_out + 1);
  for (Eigen::Index n = m; n <= K_out; ++n)
    out(n) = falling_factorial_as<Scalar>(n, m) * p(n - m) / norm;
  return Pnd<Scalar>(std::move(out), NormalizationMode::TruncatedTail, default_tolerance<Scalar>(),
                     pnd.finite_support());
}

}  // namespace pncc
