// Command-line front end: classify a photon number distribution as
// nonclassical or consistent-with-classical, and emit plot data for the
// bundled reference states.
//
// Exit codes: 0 consistent with classical, 2 nonclassical witnessed,
// 1 input or processing error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "pncc/classicality.hpp"
#include "pncc/io.hpp"

namespace {

struct Options {
  std::string pnd_path;
  std::string state_path;
  std::string q_values;
  std::string mode = "double";
  std::optional<long> depth;
  std::optional<double> tolerance;
  bool exhaustive = false;
  std::string json_path;
  std::string plot_path;
  long truncation = 32;
};

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return j;
}

template <typename Scalar>
int run_analysis(const Options& opt) {
  const Scalar tol =
      opt.tolerance ? Scalar(*opt.tolerance) : pncc::default_tolerance<Scalar>();

  std::optional<pncc::Pnd<Scalar>> pnd;
  if (!opt.pnd_path.empty()) {
    pnd = pncc::pnd_from_json<Scalar>(load_json(opt.pnd_path), tol);
  } else if (!opt.state_path.empty()) {
    const auto spec = pncc::statespec_from_json(load_json(opt.state_path));
    pnd = pncc::generate_pnd<Scalar>(spec, opt.truncation);
  } else {
    const auto q_values = pncc::parse_value_list<Scalar>(opt.q_values);
    pnd = pncc::pnd_from_q<Scalar>(q_values, pncc::NormalizationMode::TruncatedTail, tol);
  }

  pncc::AnalyzeOptions<Scalar> a;
  a.tolerance = tol;
  a.exhaustive = opt.exhaustive;
  if (opt.depth) a.max_depth = *opt.depth;
  const auto report = pncc::analyze(*pnd, a);

  std::cout << pncc::report_to_text(report);
  if (!opt.json_path.empty()) {
    std::ofstream out(opt.json_path);
    if (!out) throw std::runtime_error("cannot write '" + opt.json_path + "'");
    auto j = pncc::report_to_json(report);
    j["q"] = pncc::moments_to_json(pncc::q_from_pnd(*pnd));
    out << j.dump(2) << "\n";
  }
  if (!opt.plot_path.empty()) {
    std::ofstream out(opt.plot_path);
    if (!out) throw std::runtime_error("cannot write '" + opt.plot_path + "'");
    pncc::write_figure_csv(out, *pnd, pncc::q_from_pnd(*pnd));
  }
  return report.nonclassical() ? 2 : 0;
}

template <typename Scalar>
int run_figure(const Options& opt) {
  const auto spec = pncc::statespec_from_json(load_json(opt.state_path));
  const auto pnd = pncc::generate_pnd<Scalar>(spec, opt.truncation);
  std::ofstream out(opt.plot_path);
  if (!out) throw std::runtime_error("cannot write '" + opt.plot_path + "'");
  pncc::write_figure_csv(out, pnd, pncc::q_from_pnd(pnd));
  std::cout << "wrote " << opt.plot_path << " (n = 0.." << opt.truncation << ")\n";
  return 0;
}

template <typename Func>
int dispatch_mode(const std::string& mode, Func&& f) {
  if (mode == "double") return f(double{});
  if (mode == "extended") return f(pncc::Float50{});
  if (mode == "exact") return f(pncc::Rational{});
  throw std::runtime_error("unknown arithmetic mode '" + mode + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classicality analysis of photon number distributions"};
  app.require_subcommand(1);

  Options opt;

  auto* analyze = app.add_subcommand("analyze", "Run the classicality test hierarchy");
  auto* src_pnd = analyze->add_option("--pnd", opt.pnd_path, "PND record (JSON)");
  auto* src_state = analyze->add_option("--state", opt.state_path, "state specification (JSON)");
  auto* src_q = analyze->add_option("--q", opt.q_values, "inline comma-separated q_n values");
  src_pnd->excludes(src_state)->excludes(src_q);
  src_state->excludes(src_q);
  analyze->add_option("--depth", opt.depth, "maximum Hankel order (default: all the data supports)");
  analyze->add_option("--mode", opt.mode, "arithmetic mode: double, extended, exact")
      ->check(CLI::IsMember({"double", "extended", "exact"}));
  analyze->add_flag("--exhaustive", opt.exhaustive, "run every test instead of short-circuiting");
  analyze->add_option("--json", opt.json_path, "write the report as JSON to this path");
  analyze->add_option("--plot", opt.plot_path, "write n,p,q plot data (CSV) to this path");
  analyze->add_option("--tol", opt.tolerance, "tolerance override");
  analyze->add_option("--K", opt.truncation, "truncation index for --state inputs");

  auto* figure = app.add_subcommand("figure", "Emit plot data for a state specification");
  figure->add_option("--state", opt.state_path, "state specification (JSON)")->required();
  figure->add_option("--K", opt.truncation, "truncation index")->required();
  figure->add_option("--plot", opt.plot_path, "output CSV path")->required();
  figure->add_option("--mode", opt.mode, "arithmetic mode: double, extended, exact")
      ->check(CLI::IsMember({"double", "extended", "exact"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(analyze)) {
      if (opt.pnd_path.empty() && opt.state_path.empty() && opt.q_values.empty())
        throw std::runtime_error("one of --pnd, --state, --q is required");
      return dispatch_mode(opt.mode, [&](auto scalar) {
        return run_analysis<decltype(scalar)>(opt);
      });
    }
    return dispatch_mode(opt.mode, [&](auto scalar) {
      return run_figure<decltype(scalar)>(opt);
    });
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
