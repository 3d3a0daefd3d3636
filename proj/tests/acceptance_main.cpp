// Acceptance suite: one check per release criterion, each printed as a
// single pass/fail line. Returns nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle_utils.hpp"
#include "pncc/classicality.hpp"
#include "pncc/duality.hpp"
#include "pncc/io.hpp"

using namespace pncc;

namespace {

class Checker {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PNCC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status < 0) return -1;
  return WEXITSTATUS(status);
}

nlohmann::json load_preset(const std::string& name) {
  const std::string path = std::string(PNCC_PRESET_DIR) + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing preset " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

// --------------------------------------------------------------------------
// 1. Schiller data reproduction: exactly the two violations q1 q3 < q2^2 and
//    q3 q5 < q4^2, exact-rational arithmetic at zero tolerance, < 1 s.
void criterion_schiller(Checker& c) {
  const char* digits[] = {"0.44", "0.07", "0.26", "0.30", "1.44", "3.60", "28.80"};
  Eigen::VectorX<Rational> q(7);
  for (int n = 0; n < 7; ++n) q(n) = parse_exact_decimal(digits[n]);
  const auto pnd = pnd_from_q<Rational>(q, NormalizationMode::TruncatedTail, Rational(0));
  AnalyzeOptions<Rational> opts;
  opts.tolerance = Rational(0);
  const auto report = analyze(pnd, opts);
  c.require(report.verdict == "nonclassical", "verdict must be nonclassical");
  c.require(report.witnesses.size() == 2, "exactly two violations expected");
  bool has2 = false, has4 = false;
  for (const auto& w : report.witnesses) {
    if (w.kind == "local3" && w.index == 2) has2 = true;  // q1 q3 < q2^2
    if (w.kind == "local3" && w.index == 4) has4 = true;  // q3 q5 < q4^2
  }
  c.require(has2 && has4, "violations must be x_2 < 1 and x_4 < 1");
  c.require(q(1) * q(3) < q(2) * q(2), "q1 q3 < q2^2 must hold on the raw data");
  c.require(q(3) * q(5) < q(4) * q(4), "q3 q5 < q4^2 must hold on the raw data");

  const int code = run_cli(
      "analyze --q \"0.44,0.07,0.26,0.30,1.44,3.60,28.80\" --mode exact --tol 0");
  c.require(code == 2, "CLI exit status must be 2 (nonclassical), got " + std::to_string(code));
}

// --------------------------------------------------------------------------
// 2. Cat-state family sweep at mu = 1 over theta in [0, 2pi).
void criterion_cat_sweep(Checker& c) {
  const double mu = 1.0;
  const int samples = 24;
  for (int k = 0; k < samples; ++k) {
    if (k == samples / 4 || k == 3 * samples / 4) continue;  // theta = +-pi/2
    const double theta = 2.0 * M_PI * k / samples;
    const auto pnd = generate_pnd<double>(StateSpec(SuperpositionSpec{mu, theta}), 12);
    const auto report = analyze(pnd);
    c.require(report.nonclassical(), "theta=" + std::to_string(theta) + " must be nonclassical");
    const double cos_t = std::cos(theta);
    if (k == 0 || k == samples / 2) {
      c.require(!report.witnesses.empty() && report.witnesses.front().kind == "zero",
                "theta in {0, pi} must be witnessed by the zero rule");
      continue;
    }
    // Parity rule: f_n < 1 for even n when |theta| < pi/2, odd n otherwise,
    // with f_n = ((1 - (-1)^n cos)/(1 + (-1)^n cos))^2.
    const auto q = q_from_pnd(pnd);
    const auto t3 = local3(q);
    for (Eigen::Index n = 1; n <= t3.x.max_n; ++n) {
      const double parity = (n % 2 == 0) ? 1.0 : -1.0;
      const double f = std::pow((1.0 - parity * cos_t) / (1.0 + parity * cos_t), 2.0);
      c.require(std::abs(to_double(t3.x.at(n)) - f) < 1e-9,
                "x_n must match f_n(theta) at n=" + std::to_string(n));
      const bool fails = std::find(t3.failures.begin(), t3.failures.end(), n) != t3.failures.end();
      c.require(fails == (f < 1.0), "failure parity mismatch at n=" + std::to_string(n));
      const bool even_side = cos_t > 0.0;
      c.require(fails == (even_side ? n % 2 == 0 : n % 2 == 1),
                "parity rule mismatch at n=" + std::to_string(n));
    }
  }
  for (const double theta : {M_PI_2, -M_PI_2}) {
    const auto pnd = generate_pnd<double>(StateSpec(SuperpositionSpec{mu, theta}), 12);
    AnalyzeOptions<double> opts;
    opts.exhaustive = true;
    const auto report = analyze(pnd, opts);
    c.require(report.verdict == "consistent_with_classical",
              "Yurke-Stoler record must stay consistent");
    c.require(report.dichotomy == "poissonian", "Yurke-Stoler must be Poissonian throughout");
    const auto t3 = local3(q_from_pnd(pnd));
    for (Eigen::Index n = 1; n <= std::min<Eigen::Index>(10, t3.x.max_n); ++n)
      c.require(std::abs(to_double(t3.x.at(n)) - 1.0) < 1e-10,
                "|x_n - 1| < 1e-10 required at n=" + std::to_string(n));
  }
}

// --------------------------------------------------------------------------
// 3. Figure presets: classical records with the documented oscillation
//    patterns, hierarchy depth >= 4 in extended precision.
void criterion_figures(Checker& c) {
  using clock = std::chrono::steady_clock;
  {
    const auto t0 = clock::now();
    const auto spec = statespec_from_json(load_preset("fig1.json"));
    const auto pnd = generate_pnd<Float50>(spec, 160);
    AnalyzeOptions<Float50> opts;
    opts.exhaustive = true;
    opts.max_depth = 6;
    const auto report = analyze(pnd, opts);
    c.require(report.verdict == "consistent_with_classical", "fig1 must pass every test");
    c.require(report.depth >= 4, "fig1 hierarchy depth must reach at least 4");
    c.require(report.oscillation.has_value(), "fig1 oscillation report missing");
    if (report.oscillation) {
      c.require(report.oscillation->q_maxima.empty(), "fig1 q-sequence must have no local maxima");
      c.require(report.oscillation->p_maxima.size() >= 2,
                "fig1 p-sequence must have at least two local maxima");
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    c.require(secs < 5.0, "fig1 analysis must finish within 5 s");
  }
  {
    const auto t0 = clock::now();
    const auto spec = statespec_from_json(load_preset("fig3.json"));
    const auto pnd = generate_pnd<Float50>(spec, 13);
    AnalyzeOptions<Float50> opts;
    opts.exhaustive = true;
    const auto report = analyze(pnd, opts);
    c.require(report.verdict == "consistent_with_classical", "fig3 must pass every test");
    c.require(report.depth >= 4, "fig3 hierarchy depth must reach at least 4");
    c.require(report.oscillation.has_value(), "fig3 oscillation report missing");
    if (report.oscillation) {
      c.require(report.oscillation->q_maxima.empty(), "fig3 q-sequence must have no local maxima");
      bool period_two = false;
      for (const auto gap : report.oscillation->p_periods) period_two |= gap == 2;
      c.require(period_two, "fig3 p-sequence must oscillate with period two");
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    c.require(secs < 5.0, "fig3 analysis must finish within 5 s");
  }
  const std::string csv = "/tmp/pncc_fig3.csv";
  const int code = run_cli("figure --state " + std::string(PNCC_PRESET_DIR) +
                           "/fig3.json --K 13 --plot " + csv);
  c.require(code == 0, "figure subcommand must succeed");
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  c.require(header == "n,p,q", "CSV header must be n,p,q");
}

// --------------------------------------------------------------------------
// 4. Moment-problem oracle equivalence on randomized atomic measures, and
//    single-site perturbations detected by both the local and global tests.
void criterion_oracle(Checker& c) {
  std::mt19937 rng(2026);
  for (int trial = 0; trial < 200; ++trial) {
    const int n_atoms = 1 + trial % 5;
    const auto atoms_gamma = pncc_test::random_atoms(rng, n_atoms, trial % 7 == 0);
    auto atoms_q = atoms_gamma;
    for (auto& a : atoms_q) a.weight = pncc_test::random_positive_rational(rng);
    MomentSequence<Rational> q{MomentKind::Q, pncc_test::atomic_moments(atoms_q, 9),
                               MomentProvenance::ClosedForm, false};
    MomentSequence<Rational> g{MomentKind::Gamma, pncc_test::atomic_moments(atoms_gamma, 9),
                               MomentProvenance::ClosedForm, true};
    for (Eigen::Index N = 0; N <= 4; ++N) {
      const auto [qu, qs] = psd_check(build_pair(q, N), Rational(0));
      const auto [gu, gs] = psd_check(build_pair(g, N), Rational(0));
      c.require(qu.status == PsdStatus::Yes && qs.status == PsdStatus::Yes,
                "Q-side hierarchy must be PSD at depth " + std::to_string(N));
      c.require(gu.status == PsdStatus::Yes && gs.status == PsdStatus::Yes,
                "Gamma-side hierarchy must be PSD at depth " + std::to_string(N));
    }
  }

  std::uniform_int_distribution<int> site(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto atoms = pncc_test::random_atoms(rng, 1 + trial % 5);
    auto m = pncc_test::atomic_moments(atoms, 9);
    const int n = site(rng);
    m(n) = m(n - 1) + m(n + 1);  // single x_n < 1 injection
    MomentSequence<Rational> q{MomentKind::Q, m, MomentProvenance::ClosedForm, false};
    const auto t3 = local3(q, Rational(0));
    c.require(t3.failures.size() == 1 && t3.failures[0] == n,
              "exactly one local violation expected at n=" + std::to_string(n));
    Eigen::Index failure_depth = -1;
    for (Eigen::Index N = 0; N <= 4 && failure_depth < 0; ++N) {
      const auto [u, s] = psd_check(build_pair(q, N), Rational(0));
      if (u.status == PsdStatus::No || s.status == PsdStatus::No) failure_depth = N;
    }
    c.require(failure_depth >= 0, "PSD hierarchy must detect the injected violation");
    c.require(failure_depth <= n, "PSD failure depth must not exceed the witness position");
  }
}

// --------------------------------------------------------------------------
// 5. Duality identities and round trips.
void criterion_duality(Checker& c) {
  const Eigen::Index n = 13;  // order 12
  const auto s = s_transform<Rational>(STransformFamily::S, n);
  const auto half = s_transform<Rational>(STransformFamily::SHalf, n);
  const auto half_inv = s_transform<Rational>(STransformFamily::SHalfInverse, n);
  c.require(Eigen::MatrixX<Rational>(half * half) == s, "(S^1/2)^2 = S at order 12");
  c.require(Eigen::MatrixX<Rational>(half * half_inv) ==
                Eigen::MatrixX<Rational>(Eigen::MatrixX<Rational>::Identity(n, n)),
            "S^1/2 S^-1/2 = I at order 12");

  // thermal nbar = 1 round trip through order 6
  MomentSequence<Float50> q;
  q.kind = MomentKind::Q;
  q.values.resize(21);
  for (Eigen::Index i = 0; i <= 20; ++i)
    q.values(i) = factorial_as<Float50>(i) / convert_big<Float50>(BigInt(1) << (i + 1));
  q.tail_exact = true;  // finite-section self-consistency
  const auto gamma = q_to_gamma(q, 20);
  const auto back = gamma_to_q(gamma.moments, 6);
  for (int i = 0; i <= 6; ++i)
    c.require(to_double(abs(back.moments[i] - q[i])) < 1e-10,
              "thermal round trip must agree to 1e-10 at order " + std::to_string(i));

  // congruence: exact zero for Fock(2), < 1e-10 for coherent at padding 15
  MomentSequence<Rational> fock;
  fock.kind = MomentKind::Q;
  fock.values = Eigen::VectorX<Rational>::Zero(18);
  fock.values(2) = Rational(2);
  fock.tail_exact = true;
  const auto fock_gamma = q_to_gamma(fock, 17);
  const auto fr = congruence_check(build_pair(fock, 8), build_pair(fock_gamma.moments, 8), 2);
  c.require(fr.residual_unshifted == Rational(0) && fr.residual_shifted == Rational(0),
            "Fock(2) congruence residual must be exactly zero");

  const auto pnd = generate_pnd<Float50>(StateSpec(CoherentSpec{1.0}), 35);
  const auto cq = q_from_pnd(pnd);
  const auto cg = gamma_closed_form<Float50>(StateSpec(CoherentSpec{1.0}), 6);
  const auto cr = congruence_check(build_pair(cq, 17), build_pair(cg, 2), 2);
  c.require(cr.padding == 15, "coherent congruence must use padding 15");
  c.require(to_double(cr.residual_unshifted) < 1e-10 && to_double(cr.residual_shifted) < 1e-10,
            "coherent congruence residual must be below 1e-10");
}

// --------------------------------------------------------------------------
// 6. Refined dichotomy: a saturated site between strict neighbours fails the
//    five-term condition at the junction; thermal and coherent classify.
void criterion_dichotomy(Checker& c) {
  XSequence<double> x;
  x.values.resize(5);
  x.values << 1.3, 1.2, 1.0, 1.2, 1.3;
  x.max_n = 5;
  const auto five = local5(x);
  bool fail2 = false, fail4 = false;
  for (const auto& e : five) {
    if (e.n == 2 && !e.pass) fail2 = true;
    if (e.n == 4 && !e.pass) fail4 = true;
  }
  c.require(fail2 && fail4, "five-term condition must fail at the junctions n = 2, 4");
  const auto dich = poisson_dichotomy(x);
  c.require(dich.kind == DichotomyKind::Mixed, "synthetic sequence must classify as mixed");
  c.require(dich.junction_sites == std::vector<Eigen::Index>{2, 4},
            "junction sites must be n = 2 and n = 4");

  const auto thermal = generate_pnd<double>(StateSpec(ThermalSpec{1.0}), 14);
  AnalyzeOptions<double> opts;
  opts.exhaustive = true;
  c.require(analyze(thermal, opts).dichotomy == "superpoissonian",
            "thermal record must be super-Poissonian throughout");
  const auto coherent = generate_pnd<double>(StateSpec(CoherentSpec{2.0}), 14);
  c.require(analyze(coherent, opts).dichotomy == "poissonian",
            "coherent record must be Poissonian throughout");
}

// --------------------------------------------------------------------------
// 7. Known values: Mandel Q, the factorial-moment inequality for Fock(2),
//    photon-added states flagged through the zero rule.
void criterion_known_values(Checker& c) {
  const auto coh = gamma_closed_form<double>(StateSpec(CoherentSpec{2.0}), 2);
  c.require(std::abs(mandel_q(coh)) < 1e-12, "Mandel Q of a coherent state must be 0");
  for (const double nbar : {1.0, 2.5}) {
    const auto th = gamma_closed_form<double>(StateSpec(ThermalSpec{nbar}), 2);
    c.require(std::abs(mandel_q(th) - nbar) < 1e-12, "Mandel Q of thermal must equal nbar");
  }
  const auto fock = gamma_closed_form<double>(StateSpec(FockSpec{2}), 4);
  c.require(std::abs(mandel_q(fock) + 1.0) < 1e-12, "Mandel Q of Fock(2) must be -1");
  const auto kl = klauder_check(fock, 1, 1);
  c.require(!kl.left_ok, "Fock(2) must violate the left factorial-moment inequality at (1,1)");

  for (int m = 1; m <= 2; ++m) {
    const auto added_th = generate_pnd<double>(
        StateSpec(PhotonAddedSpec{m, std::make_shared<StateSpec>(StateSpec(ThermalSpec{1.0}))}),
        30);
    const auto rth = analyze(added_th);
    c.require(rth.nonclassical() && rth.witnesses.front().kind == "zero",
              "photon-added thermal must be flagged by the zero rule");
    const auto added_coh = generate_pnd<double>(
        StateSpec(PhotonAddedSpec{m, std::make_shared<StateSpec>(StateSpec(CoherentSpec{1.0}))}),
        30);
    const auto rcoh = analyze(added_coh);
    c.require(rcoh.nonclassical() && rcoh.witnesses.front().kind == "zero",
              "photon-added coherent must be flagged by the zero rule");
    c.require(int(rcoh.zero_rule.witness_indices.size()) == m,
              "m added photons must produce m vanishing leading entries");
  }
}

struct Criterion {
  int id;
  const char* label;
  double time_limit_s;
  std::function<void(Checker&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Schiller data reproduction (exact mode, zero tolerance)", 1.0, criterion_schiller},
      {2, "cat-state family sweep over the relative phase", 1.0, criterion_cat_sweep},
      {3, "figure presets: classical oscillation patterns", 11.0, criterion_figures},
      {4, "moment-problem oracle equivalence on random atomic measures", 30.0, criterion_oracle},
      {5, "duality identities and round trips", 5.0, criterion_duality},
      {6, "refined dichotomy and five-term junction failures", 5.0, criterion_dichotomy},
      {7, "known-values suite (Mandel Q, Klauder, photon addition)", 5.0, criterion_known_values},
  };

  int failed = 0;
  for (const auto& criterion : criteria) {
    Checker checker;
    std::string error;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criterion.run(checker);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool time_ok = secs <= criterion.time_limit_s;
    const bool ok = checker.failures().empty() && error.empty() && time_ok;
    std::printf("[%s] criterion %d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", criterion.id,
                criterion.label, secs);
    if (!error.empty()) std::printf("       exception: %s\n", error.c_str());
    if (!time_ok)
      std::printf("       time limit exceeded: %.2f s > %.2f s\n", secs, criterion.time_limit_s);
    for (const auto& f : checker.failures()) std::printf("       %s\n", f.c_str());
    if (!ok) ++failed;
  }
  if (failed == 0)
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  else
    std::printf("%d acceptance criteria FAILED\n", failed);
  return failed == 0 ? 0 : 1;
}
