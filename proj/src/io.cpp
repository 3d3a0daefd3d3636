#include "pncc/io.hpp"

#include <sstream>

namespace pncc {

namespace {

std::vector<WeightedIntensity> weighted_from_json(const nlohmann::json& arr, const char* key) {
  std::vector<WeightedIntensity> parts;
  for (const auto& e : arr) {
    WeightedIntensity w;
    w.weight = e.at("weight").get<double>();
    w.intensity = e.at(key).get<double>();
    parts.push_back(w);
  }
  return parts;
}

nlohmann::json weighted_to_json(const std::vector<WeightedIntensity>& parts, const char* key) {
  auto arr = nlohmann::json::array();
  for (const auto& w : parts) arr.push_back({{"weight", w.weight}, {key, w.intensity}});
  return arr;
}

}  // namespace

StateSpec statespec_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  const std::string label = j.value("label", std::string{});
  if (type == "coherent")
    return StateSpec(CoherentSpec{j.at("intensity").get<double>()}, label);
  if (type == "thermal")
    return StateSpec(ThermalSpec{j.at("nbar").get<double>()}, label);
  if (type == "superposition")
    return StateSpec(
        SuperpositionSpec{j.at("intensity").get<double>(), j.at("theta").get<double>()}, label);
  if (type == "coherent_mixture")
    return StateSpec(CoherentMixtureSpec{weighted_from_json(j.at("components"), "intensity")},
                     label);
  if (type == "atomic_intensity")
    return StateSpec(AtomicIntensitySpec{weighted_from_json(j.at("atoms"), "intensity")}, label);
  if (type == "fock")
    return StateSpec(FockSpec{j.at("n").get<long>()}, label);
  if (type == "photon_added") {
    PhotonAddedSpec pa;
    pa.added_photons = j.at("m").get<long>();
    pa.base = std::make_shared<StateSpec>(statespec_from_json(j.at("base")));
    return StateSpec(std::move(pa), label);
  }
  throw std::invalid_argument("state spec JSON: unknown type '" + type + "'");
}

nlohmann::json statespec_to_json(const StateSpec& spec) {
  nlohmann::json j;
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, CoherentSpec>) {
          j["type"] = "coherent";
          j["intensity"] = v.intensity;
        } else if constexpr (std::is_same_v<V, ThermalSpec>) {
          j["type"] = "thermal";
          j["nbar"] = v.mean_occupation;
        } else if constexpr (std::is_same_v<V, SuperpositionSpec>) {
          j["type"] = "superposition";
          j["intensity"] = v.intensity;
          j["theta"] = v.relative_phase;
        } else if constexpr (std::is_same_v<V, CoherentMixtureSpec>) {
          j["type"] = "coherent_mixture";
          j["components"] = weighted_to_json(v.components, "intensity");
        } else if constexpr (std::is_same_v<V, AtomicIntensitySpec>) {
          j["type"] = "atomic_intensity";
          j["atoms"] = weighted_to_json(v.atoms, "intensity");
        } else if constexpr (std::is_same_v<V, FockSpec>) {
          j["type"] = "fock";
          j["n"] = v.occupation;
        } else if constexpr (std::is_same_v<V, PhotonAddedSpec>) {
          j["type"] = "photon_added";
          j["m"] = v.added_photons;
          j["base"] = statespec_to_json(*v.base);
        }
      },
      spec.value());
  if (!spec.label().empty()) j["label"] = spec.label();
  return j;
}

namespace {

nlohmann::json witness_to_json(const Witness& w) {
  return {{"kind", w.kind}, {"index", w.index}, {"detail", w.detail}};
}

Witness witness_from_json(const nlohmann::json& j) {
  return {j.at("kind").get<std::string>(), j.at("index").get<long>(),
          j.at("detail").get<std::string>()};
}

}  // namespace

nlohmann::json report_to_json(const ClassicalityReport& r) {
  nlohmann::json j;
  j["verdict"] = r.verdict;
  j["vacuum"] = r.vacuum;
  j["depth"] = r.depth;
  auto& wit = j["witnesses"] = nlohmann::json::array();
  for (const auto& w : r.witnesses) wit.push_back(witness_to_json(w));
  j["zero_rule"] = {{"outcome", r.zero_rule.outcome},
                    {"witness_indices", r.zero_rule.witness_indices},
                    {"boundary_indices", r.zero_rule.boundary_indices}};
  auto& l3 = j["local3"] = nlohmann::json::array();
  for (const auto& e : r.local3)
    l3.push_back({{"n", e.n}, {"x", e.x}, {"status", e.status}});
  auto& l5 = j["local5"] = nlohmann::json::array();
  for (const auto& e : r.local5)
    l5.push_back({{"n", e.n}, {"pass", e.pass}, {"slack", e.slack}});
  j["dichotomy"] = r.dichotomy;
  j["dichotomy_suspicious"] = r.dichotomy_suspicious;
  if (r.oscillation) {
    const auto& o = *r.oscillation;
    j["oscillation"] = {{"q_pattern", o.q_pattern},   {"q_maxima", o.q_maxima},
                        {"q_minima", o.q_minima},     {"q_plateaus", o.q_plateaus},
                        {"witness", o.witness},       {"p_maxima", o.p_maxima},
                        {"p_bound_slack", o.p_bound_slack}, {"p_periods", o.p_periods},
                        {"note", o.note}};
  }
  auto& hi = j["hierarchy"] = nlohmann::json::array();
  for (const auto& e : r.hierarchy) {
    nlohmann::json h = {{"depth", e.depth},
                        {"sign_unshifted", e.sign_unshifted},
                        {"sign_shifted", e.sign_shifted},
                        {"psd_unshifted", e.psd_unshifted},
                        {"psd_shifted", e.psd_shifted}};
    if (e.det_unshifted) h["det_unshifted"] = *e.det_unshifted;
    if (e.det_shifted) h["det_shifted"] = *e.det_shifted;
    hi.push_back(std::move(h));
  }
  if (r.hierarchy_scale) j["hierarchy_scale"] = *r.hierarchy_scale;
  if (r.mandel_q)
    j["mandel_q"] = {{"value", r.mandel_q->value}, {"definitive", r.mandel_q->definitive}};
  j["mode"] = r.mode;
  j["tolerance"] = r.tolerance;
  j["notes"] = r.notes;
  return j;
}

ClassicalityReport report_from_json(const nlohmann::json& j) {
  ClassicalityReport r;
  r.verdict = j.at("verdict").get<std::string>();
  r.vacuum = j.at("vacuum").get<bool>();
  r.depth = j.at("depth").get<long>();
  for (const auto& w : j.at("witnesses")) r.witnesses.push_back(witness_from_json(w));
  const auto& z = j.at("zero_rule");
  r.zero_rule.outcome = z.at("outcome").get<std::string>();
  r.zero_rule.witness_indices = z.at("witness_indices").get<std::vector<long>>();
  r.zero_rule.boundary_indices = z.at("boundary_indices").get<std::vector<long>>();
  for (const auto& e : j.at("local3"))
    r.local3.push_back({e.at("n").get<long>(), e.at("x").get<double>(),
                        e.at("status").get<std::string>()});
  for (const auto& e : j.at("local5"))
    r.local5.push_back(
        {e.at("n").get<long>(), e.at("pass").get<bool>(), e.at("slack").get<double>()});
  r.dichotomy = j.at("dichotomy").get<std::string>();
  r.dichotomy_suspicious = j.at("dichotomy_suspicious").get<bool>();
  if (j.contains("oscillation")) {
    const auto& o = j["oscillation"];
    OscillationSummary s;
    s.q_pattern = o.at("q_pattern").get<std::string>();
    s.q_maxima = o.at("q_maxima").get<std::vector<long>>();
    s.q_minima = o.at("q_minima").get<std::vector<long>>();
    s.q_plateaus = o.at("q_plateaus").get<std::vector<long>>();
    s.witness = o.at("witness").get<bool>();
    s.p_maxima = o.at("p_maxima").get<std::vector<long>>();
    s.p_bound_slack = o.at("p_bound_slack").get<std::vector<double>>();
    s.p_periods = o.at("p_periods").get<std::vector<long>>();
    s.note = o.at("note").get<std::string>();
    r.oscillation = std::move(s);
  }
  for (const auto& h : j.at("hierarchy")) {
    HierarchyEntryReport e;
    e.depth = h.at("depth").get<long>();
    if (h.contains("det_unshifted")) e.det_unshifted = h["det_unshifted"].get<double>();
    if (h.contains("det_shifted")) e.det_shifted = h["det_shifted"].get<double>();
    e.sign_unshifted = h.at("sign_unshifted").get<int>();
    e.sign_shifted = h.at("sign_shifted").get<int>();
    e.psd_unshifted = h.at("psd_unshifted").get<std::string>();
    e.psd_shifted = h.at("psd_shifted").get<std::string>();
    r.hierarchy.push_back(std::move(e));
  }
  if (j.contains("hierarchy_scale")) r.hierarchy_scale = j["hierarchy_scale"].get<double>();
  if (j.contains("mandel_q"))
    r.mandel_q = MandelSummary{j["mandel_q"].at("value").get<double>(),
                               j["mandel_q"].at("definitive").get<bool>()};
  r.mode = j.at("mode").get<std::string>();
  r.tolerance = j.at("tolerance").get<double>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

std::string report_to_text(const ClassicalityReport& r) {
  std::ostringstream os;
  os << "verdict: " << r.verdict;
  if (r.vacuum) os << " (vacuum state)";
  os << "\n";
  os << "mode: " << r.mode << ", tolerance: " << r.tolerance << "\n";
  if (!r.vacuum) {
    if (r.depth >= 0)
      os << "depth checked (both Hankel families): " << r.depth << "\n";
    else if (r.hierarchy.empty())
      os << "hierarchy: not reached (short-circuited; rerun with --exhaustive)\n";
  }
  if (!r.witnesses.empty()) {
    os << "witnesses:\n";
    for (const auto& w : r.witnesses)
      os << "  [" << w.kind << "] n=" << w.index << ": " << w.detail << "\n";
  }
  os << "zero rule: " << r.zero_rule.outcome << "\n";
  if (!r.local3.empty()) {
    os << "three-term ratios x_n:";
    int shown = 0;
    for (const auto& e : r.local3) {
      if (shown++ == 8) {
        os << " ...";
        break;
      }
      os << " x_" << e.n << "=" << e.x << "(" << e.status << ")";
    }
    os << "\n";
  }
  if (r.dichotomy != "not_applicable") {
    os << "dichotomy: " << r.dichotomy;
    if (r.dichotomy_suspicious) os << " (suspicious, unconfirmed)";
    os << "\n";
  }
  if (r.oscillation) {
    os << "q-pattern: " << r.oscillation->q_pattern;
    if (!r.oscillation->p_maxima.empty()) {
      os << "; p-maxima at";
      for (const auto n : r.oscillation->p_maxima) os << " " << n;
    }
    os << "\n";
  }
  if (!r.hierarchy.empty()) {
    os << "hierarchy:";
    for (const auto& e : r.hierarchy) {
      os << " N=" << e.depth << "[" << e.psd_unshifted;
      if (e.psd_shifted != "skipped") os << "/" << e.psd_shifted;
      os << "]";
    }
    os << "\n";
  }
  if (r.mandel_q)
    os << "Mandel Q: " << r.mandel_q->value
       << (r.mandel_q->definitive ? "" : " (from truncated sums, not definitive)") << "\n";
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  return os.str();
}

}  // namespace pncc
