#include <doctest.h>

#include <cmath>

#include "oracle_utils.hpp"
#include "pncc/moments.hpp"

using namespace pncc;

TEST_SUITE("moments") {

TEST_CASE("q_from_pnd on the vacuum") {
  Eigen::VectorXd p(3);
  p << 1.0, 0.0, 0.0;
  const auto q = q_from_pnd(Pnd<double>(p, NormalizationMode::Strict));
  CHECK(q.kind == MomentKind::Q);
  CHECK(q[0] == 1.0);
  CHECK(q[1] == 0.0);
  CHECK(q[2] == 0.0);
}

TEST_CASE("Poissonian q is geometric") {
  const auto pnd = generate_pnd<double>(StateSpec(CoherentSpec{1.0}), 4);
  const auto q = q_from_pnd(pnd);
  const double e1 = std::exp(-1.0);
  for (int n = 0; n <= 4; ++n) CHECK(q[n] == doctest::Approx(e1).epsilon(1e-12));
}

TEST_CASE("Schiller q-values round trip through p exactly in exact mode") {
  const char* digits[] = {"0.44", "0.07", "0.26", "0.30", "1.44", "3.60", "28.80"};
  Eigen::VectorX<Rational> q_in(7);
  for (int n = 0; n < 7; ++n) q_in(n) = parse_exact_decimal(digits[n]);
  const auto pnd = pnd_from_q<Rational>(q_in, NormalizationMode::TruncatedTail, Rational(0));
  CHECK(pnd[6] == Rational(1, 25));  // 28.80 / 720 = 0.04
  const auto q_back = q_from_pnd(pnd);
  for (int n = 0; n < 7; ++n) CHECK(q_back[n] == q_in(n));
}

TEST_CASE("factorial moments of Fock(2)") {
  const auto pnd = generate_pnd<Rational>(StateSpec(FockSpec{2}), 5);
  const auto g = gamma_from_pnd(pnd, 4);
  CHECK(g.moments.tail_exact);
  CHECK(g.moments[0] == Rational(1));
  CHECK(g.moments[1] == Rational(2));
  CHECK(g.moments[2] == Rational(2));
  CHECK(g.moments[3] == Rational(0));
  CHECK(g.moments[4] == Rational(0));
}

TEST_CASE("closed-form factorial moments") {
  SUBCASE("thermal against a quadrature oracle") {
    // gamma_m = int_0^inf I^m e^{-I/nbar}/nbar dI = m! nbar^m
    const auto g = gamma_closed_form<double>(StateSpec(ThermalSpec{1.0}), 3);
    CHECK(g.tail_exact);
    CHECK(g[0] == doctest::Approx(1.0));
    CHECK(g[1] == doctest::Approx(1.0));
    CHECK(g[2] == doctest::Approx(2.0));
    CHECK(g[3] == doctest::Approx(6.0));
    for (int m = 0; m <= 3; ++m) {
      const double numeric = pncc_test::simpson(
          [m](double I) { return std::pow(I, m) * std::exp(-I); }, 40.0, 4000);
      CHECK(g[m] == doctest::Approx(numeric).epsilon(1e-8));
    }
  }
  SUBCASE("coherent and atomic measures") {
    const auto g = gamma_closed_form<double>(StateSpec(CoherentSpec{2.0}), 3);
    CHECK(g[0] == 1.0);
    CHECK(g[1] == 2.0);
    CHECK(g[2] == 4.0);
    CHECK(g[3] == 8.0);
    const auto a = gamma_closed_form<double>(
        StateSpec(AtomicIntensitySpec{{{0.5, 0.0}, {0.5, 2.0}}}), 2);
    CHECK(a[0] == doctest::Approx(1.0));
    CHECK(a[1] == doctest::Approx(1.0));
    CHECK(a[2] == doctest::Approx(2.0));
  }
  SUBCASE("superposition closed form matches the series from the record") {
    const double mu = 1.0;
    for (const double theta : {0.25 * M_PI, M_PI, 0.5}) {
      const auto spec = StateSpec(SuperpositionSpec{mu, theta});
      const auto closed = gamma_closed_form<double>(spec, 5);
      const auto series = gamma_from_pnd(generate_pnd<double>(spec, 60), 5);
      for (int m = 0; m <= 5; ++m)
        CHECK(closed[m] == doctest::Approx(series.moments[m]).epsilon(1e-10));
    }
  }
  SUBCASE("photon-added moments converge via the series") {
    // one photon on a coherent base: gamma_1 = <n> of the added state
    const auto spec = StateSpec(
        PhotonAddedSpec{1, std::make_shared<StateSpec>(StateSpec(CoherentSpec{1.0}))});
    const auto g = gamma_closed_form<double>(spec, 2);
    const auto direct = gamma_from_pnd(generate_pnd<double>(spec, 64), 2);
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(direct.moments[1]).epsilon(1e-10));
    CHECK(g[2] == doctest::Approx(direct.moments[2]).epsilon(1e-10));
  }
}

TEST_CASE("Mandel Q parameter") {
  Eigen::VectorXd coh(3);
  coh << 1.0, 2.0, 4.0;
  MomentSequence<double> g{MomentKind::Gamma, coh, MomentProvenance::ClosedForm, true};
  CHECK(mandel_q(g) == doctest::Approx(0.0));

  const auto th = gamma_closed_form<double>(StateSpec(ThermalSpec{1.0}), 2);
  CHECK(mandel_q(th) == doctest::Approx(1.0));

  const auto fock = gamma_closed_form<double>(StateSpec(FockSpec{2}), 2);
  CHECK(mandel_q(fock) == doctest::Approx(-1.0));

  Eigen::VectorXd vac(3);
  vac << 1.0, 0.0, 0.0;
  MomentSequence<double> gv{MomentKind::Gamma, vac, MomentProvenance::ClosedForm, true};
  CHECK_THROWS_AS(mandel_q(gv), std::domain_error);
}

TEST_CASE("two-sided factorial-moment inequalities") {
  SUBCASE("single atom saturates both sides") {
    const auto g = gamma_closed_form<double>(StateSpec(CoherentSpec{2.0}), 4);
    const auto r = klauder_check(g, 1, 1);
    CHECK(r.left_ok);
    CHECK(r.right_ok);
    CHECK(r.left_slack == doctest::Approx(0.0));
    CHECK(r.right_slack_squared == doctest::Approx(0.0));
    CHECK(r.definitive);
  }
  SUBCASE("Fock(2) violates the left inequality at (1,1)") {
    const auto g = gamma_closed_form<double>(StateSpec(FockSpec{2}), 4);
    const auto r = klauder_check(g, 1, 1);
    CHECK_FALSE(r.left_ok);
    CHECK(r.left_slack == doctest::Approx(-2.0));  // 2 - 2*2
  }
  SUBCASE("two atoms pass strictly, oracle sums") {
    // atoms (1/2, 1), (1/2, 3): gamma_m = (1 + 3^m)/2
    std::vector<pncc_test::Atom<Rational>> atoms = {{Rational(1, 2), Rational(1)},
                                                    {Rational(1, 2), Rational(3)}};
    const auto m = pncc_test::atomic_moments(atoms, 6);
    MomentSequence<Rational> g{MomentKind::Gamma, m, MomentProvenance::ClosedForm, true};
    const auto r11 = klauder_check(g, 1, 1, Rational(0));
    CHECK(r11.left_ok);
    CHECK(r11.right_ok);
    CHECK(r11.left_slack == Rational(1));  // 5 - 4
    const auto r12 = klauder_check(g, 1, 2, Rational(0));
    CHECK(r12.left_ok);
    CHECK(r12.right_ok);
    // left: gamma_3 - gamma_1 gamma_2 = 14 - 10; right^2: gamma_2 gamma_4 - gamma_3^2
    CHECK(r12.left_slack == Rational(4));
    CHECK(r12.right_slack_squared == Rational(5 * 41 - 14 * 14));
  }
}

TEST_CASE("generating function Lambda") {
  SUBCASE("K = 0 returns p_0") {
    const auto pnd = generate_pnd<double>(StateSpec(ThermalSpec{0.7}), 10);
    const auto lam = lambda_generating(pnd, std::vector<double>{0.0});
    CHECK(lam.values(0) == doctest::Approx(pnd[0]));
  }
  SUBCASE("coherent value against the Bessel oracle") {
    // Lambda(K) = e^{-mu} J_0(2 sqrt(mu K)) for a Poissonian record
    const auto pnd = generate_pnd<double>(StateSpec(CoherentSpec{1.0}), 60);
    const auto lam = lambda_generating(pnd, std::vector<double>{1.0});
    const double expected = std::exp(-1.0) * std::cyl_bessel_j(0.0, 2.0);
    CHECK(lam.values(0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(lam.remainder_bounds(0) < 1e-60);
  }
  SUBCASE("single-term record") {
    Eigen::VectorXd p(2);
    p << 0.0, 1.0;
    const auto lam = lambda_generating(Pnd<double>(p, NormalizationMode::Strict),
                                       std::vector<double>{2.0});
    CHECK(lam.values(0) == doctest::Approx(-2.0));
  }
  SUBCASE("partial sums bracket the limit once terms decrease") {
    const double mu = 1.0, K = 1.0;
    const auto pnd = generate_pnd<double>(StateSpec(CoherentSpec{mu}), 40);
    std::vector<double> partial;
    double acc = 0.0, power = 1.0;
    for (int n = 0; n <= 40; ++n) {
      acc += power * pnd[n];
      partial.push_back(acc);
      power *= -K / (n + 1);
    }
    const double limit = std::exp(-mu) * std::cyl_bessel_j(0.0, 2.0 * std::sqrt(mu * K));
    for (int n = 2; n < 12; ++n) {
      const bool below = partial[n] <= limit + 1e-15;
      const bool above = partial[n] >= limit - 1e-15;
      CHECK(((partial[n - 1] >= limit - 1e-15 && below) ||
             (partial[n - 1] <= limit + 1e-15 && above)));
    }
  }
}

TEST_CASE("factorial overflow escalates instead of wrapping") {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(180);
  p(0) = 1.0;
  const Pnd<double> pnd(p, NormalizationMode::Strict);
  CHECK_THROWS_AS(q_from_pnd(pnd), std::overflow_error);
  // the wider mode handles the same record
  Eigen::VectorX<Float50> pw = Eigen::VectorX<Float50>::Zero(180);
  pw(0) = Float50(1);
  CHECK_NOTHROW(q_from_pnd(Pnd<Float50>(pw, NormalizationMode::Strict)));
}

TEST_CASE("Mandel Q is nonnegative for every classical generator") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> mu(0.05, 8.0);
  for (int trial = 0; trial < 30; ++trial) {
    StateSpec spec = [&]() -> StateSpec {
      switch (trial % 3) {
        case 0: return StateSpec(CoherentSpec{mu(rng)});
        case 1: return StateSpec(ThermalSpec{mu(rng)});
        default:
          return StateSpec(AtomicIntensitySpec{{{0.3, mu(rng)}, {0.3, mu(rng)}, {0.4, mu(rng)}}});
      }
    }();
    const auto g = gamma_closed_form<double>(spec, 2);
    CHECK(mandel_q(g) >= -1e-12);
  }
}

TEST_CASE("atomic closed form equals brute-force atom sums exactly") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto atoms = pncc_test::random_atoms(rng, 3);
    double total = 0.0;
    std::vector<WeightedIntensity> parts;
    for (const auto& a : atoms) parts.push_back({to_double(a.weight), to_double(a.intensity)});
    for (auto& p : parts) total += p.weight;
    for (auto& p : parts) p.weight /= total;
    const auto g = gamma_closed_form<double>(StateSpec(AtomicIntensitySpec{parts}), 5);
    for (int m = 0; m <= 5; ++m) {
      double oracle = 0.0;
      for (const auto& p : parts) oracle += p.weight * std::pow(p.intensity, m);
      CHECK(g[m] == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
}

}  // TEST_SUITE
