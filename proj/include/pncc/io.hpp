#pragma once

// JSON schemas for PND records, state specifications, moment sequences and
// analysis reports, plus the CSV plot-data writer. Numeric entries in PND
// files may be given as JSON numbers or as strings; strings are parsed
// exactly in the exact arithmetic mode.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pncc/moments.hpp"
#include "pncc/pnd.hpp"
#include "pncc/report.hpp"
#include "pncc/scalars.hpp"

namespace pncc {

// ---------------------------------------------------------------------------
// PND files: { "p": [...], "mode": "strict"|"truncated",
//              "label": optional, "finite_support": optional }

template <typename Scalar>
Pnd<Scalar> pnd_from_json(const nlohmann::json& j,
                          Scalar tolerance = default_tolerance<Scalar>()) {
  if (!j.contains("p") || !j["p"].is_array())
    throw std::invalid_argument("PND JSON: missing array field 'p'");
  const auto& arr = j["p"];
  Eigen::VectorX<Scalar> p(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (arr[i].is_string())
      p(Eigen::Index(i)) = parse_scalar<Scalar>(arr[i].template get<std::string>());
    else if (arr[i].is_number())
      p(Eigen::Index(i)) = parse_scalar<Scalar>(arr[i].dump());
    else
      throw std::invalid_argument("PND JSON: entries of 'p' must be numbers or strings");
  }
  NormalizationMode mode = NormalizationMode::TruncatedTail;
  if (j.contains("mode")) {
    const std::string m = j["mode"].template get<std::string>();
    if (m == "strict")
      mode = NormalizationMode::Strict;
    else if (m == "truncated")
      mode = NormalizationMode::TruncatedTail;
    else
      throw std::invalid_argument("PND JSON: mode must be 'strict' or 'truncated'");
  }
  const bool finite_support = j.value("finite_support", false);
  return Pnd<Scalar>(std::move(p), mode, tolerance, finite_support);
}

template <typename Scalar>
nlohmann::json pnd_to_json(const Pnd<Scalar>& pnd, const std::string& label = {}) {
  nlohmann::json j;
  auto& arr = j["p"] = nlohmann::json::array();
  for (Eigen::Index n = 0; n < pnd.size(); ++n) {
    if constexpr (is_exact_v<Scalar>)
      arr.push_back(scalar_to_string(pnd[n]));
    else
      arr.push_back(to_double(pnd[n]));
  }
  j["mode"] = to_string(pnd.mode());
  if (pnd.finite_support()) j["finite_support"] = true;
  if (!label.empty()) j["label"] = label;
  return j;
}

template <typename Scalar>
nlohmann::json moments_to_json(const MomentSequence<Scalar>& m) {
  nlohmann::json j;
  j["kind"] = to_string(m.kind);
  auto& arr = j["values"] = nlohmann::json::array();
  for (Eigen::Index n = 0; n < m.values.size(); ++n) {
    if constexpr (is_exact_v<Scalar>)
      arr.push_back(scalar_to_string(m[n]));
    else
      arr.push_back(to_double(m[n]));
  }
  j["tail_exact"] = m.tail_exact;
  return j;
}

// ---------------------------------------------------------------------------
// State specifications

StateSpec statespec_from_json(const nlohmann::json& j);
nlohmann::json statespec_to_json(const StateSpec& spec);

// ---------------------------------------------------------------------------
// Analysis reports

nlohmann::json report_to_json(const ClassicalityReport& report);
ClassicalityReport report_from_json(const nlohmann::json& j);
std::string report_to_text(const ClassicalityReport& report);

// ---------------------------------------------------------------------------
// Plot data: columns n, p_n, q_n at full precision.

template <typename Scalar>
void write_figure_csv(std::ostream& os, const Pnd<Scalar>& pnd,
                      const MomentSequence<Scalar>& q) {
  os << "n,p,q\n";
  char buf[80];
  for (Eigen::Index n = 0; n < pnd.size(); ++n) {
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g\n", long(n), to_double(pnd[n]),
                  to_double(q[n]));
    os << buf;
  }
}

// Comma-separated inline values ("0.44,0.07,...").
template <typename Scalar>
Eigen::VectorX<Scalar> parse_value_list(const std::string& text) {
  std::vector<Scalar> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string token = text.substr(start, end - start);
    const auto a = token.find_first_not_of(" \t");
    const auto b = token.find_last_not_of(" \t");
    if (a == std::string::npos) throw std::invalid_argument("empty value in list");
    values.push_back(parse_scalar<Scalar>(token.substr(a, b - a + 1)));
    start = end + 1;
    if (end == text.size()) break;
  }
  Eigen::VectorX<Scalar> out(Eigen::Index(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out(Eigen::Index(i)) = values[i];
  return out;
}

}  // namespace pncc
