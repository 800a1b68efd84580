#pragma once

// JSON encodings. Complex numbers are [re, im]; vectors are arrays of
// those. Decoders report the offending field path on malformed input.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kjet/circle.hpp"
#include "kjet/disc.hpp"
#include "kjet/domain.hpp"
#include "kjet/errors.hpp"
#include "kjet/jets.hpp"
#include "kjet/kobayashi.hpp"
#include "kjet/stationarity.hpp"

namespace kjet::io {

using json = nlohmann::ordered_json;

[[noreturn]] inline void bad(const std::string& path, const std::string& what) {
  detail::fail(Errc::InvalidInput, "at " + path + ": " + what);
}

// ---- encoders ----

inline json encode(cplx z) { return json::array({z.real(), z.imag()}); }

inline json encode(const CVec& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(encode(z));
  return out;
}

inline json encode(const Poly& p) {
  json out = json::array();
  for (const auto& z : p) out.push_back(encode(z));
  return out;
}

inline json encode(const JetVector& xi) {
  json comps = json::array();
  for (const auto& c : xi.components) comps.push_back(encode(c));
  return {{"point", encode(xi.point)}, {"components", std::move(comps)}};
}

inline json encode(const AnalyticDisc& f) {
  json comps = json::array();
  for (const auto& rc : f.components()) comps.push_back({{"num", encode(rc.num)}, {"den", encode(rc.den)}});
  return {{"dim", f.dim()}, {"components", std::move(comps)}};
}

inline json encode(const DomainSpec& s) {
  json out = {{"kind", s.kind}, {"coeffs", s.coeffs}};
  if (!s.exponents.empty()) out["exponents"] = s.exponents;
  return out;
}

inline json encode(const SolverConfig& c) {
  return {{"degree", c.degree},         {"grid", c.grid},     {"bisection_tol", c.bisection_tol},
          {"inner_max_iter", c.inner_max_iter}, {"margin", c.margin}, {"seed", c.seed},
          {"lambda_max", c.lambda_max}, {"max_outer", c.max_outer}, {"multistart", c.multistart}};
}

inline json encode(const StationarityConfig& c) {
  return {{"grid", c.grid},
          {"harmonics", c.resolved_harmonics()},
          {"stat_tol", c.stat_tol},
          {"boundary_tol", c.boundary_tol},
          {"max_iter", c.max_iter}};
}

inline json encode(const SolverReport& r) {
  return {{"outer_iterations", r.outer_iterations}, {"inner_iterations", r.inner_iterations},
          {"lambda_lo", r.lambda_lo},               {"lambda_hi", r.lambda_hi},
          {"boundary_margin", r.boundary_margin},   {"fine_grid_max_rho", r.fine_grid_max_rho},
          {"jet_residual", r.jet_residual}};
}

inline json encode(const MetricResult& r) {
  return {{"value", r.value},
          {"bracket", json::array({r.value_lower(), r.value_upper()})},
          {"lambda", r.lambda},
          {"report", encode(r.report)},
          {"extremal", encode(r.extremal)},
          {"config", encode(r.config)}};
}

inline json real_samples(const CircleFunction& u) {
  json out = json::array();
  for (std::size_t m = 0; m < u.size(); ++m) out.push_back(u(m).real());
  return out;
}

inline json encode(const StationarityCertificate& c) {
  json out = {{"k", c.k},
              {"residual", c.residual},
              {"tolerance", c.tolerance},
              {"boundary_defect", c.boundary_defect},
              {"harmonics", c.harmonics},
              {"winding", c.winding ? json(*c.winding) : json(nullptr)},
              {"grid", c.c.size()},
              {"c", real_samples(c.c)},
              {"lift", encode(c.lift)}};
  return out;
}

inline json encode(const ExtremalityReport& r) {
  json fam = json::array();
  for (const auto& [lambda, v] : r.family) fam.push_back({{"lambda", lambda}, {"signed_pairing", v}});
  json out = {{"passed", r.passed},
              {"best_mu", r.best_mu},
              {"mu_upper", r.mu_upper},
              {"min_convexity_pairing", r.min_convexity_pairing},
              {"competitor_sign", r.competitor_sign},
              {"family", std::move(fam)},
              {"s_at_one", r.s_at_one},
              {"certificate", encode(r.certificate)}};
  if (r.best_mu > 0.0) out["competitor"] = encode(r.competitor);
  return out;
}

inline json encode(const EulerLagrangeConfig& c) {
  return {{"grid", c.grid},
          {"harmonics", c.harmonics ? c.harmonics : c.grid / 4},
          {"properness_tol", c.properness_tol},
          {"properness_fraction", c.properness_fraction},
          {"el_tol", c.el_tol},
          {"max_iter", c.max_iter}};
}

inline json encode(const EulerLagrangeReport& r) {
  return {{"passed", r.passed},     {"properness", r.properness}, {"residual", r.residual},
          {"max_rho", r.max_rho},   {"min_rho", r.min_rho},       {"c", real_samples(r.c)}};
}

inline json encode(const PoletskyReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back(
        {{"name", e.name}, {"order", e.order}, {"index", e.index}, {"value", e.value}, {"target", e.target}});
  return {{"j0", r.j0},
          {"tolerance", r.tolerance},
          {"functional_verdict", r.functional_verdict},
          {"direct_verdict", r.direct_verdict},
          {"mu", r.mu},
          {"entries", std::move(entries)}};
}

inline json encode(const PropertySuiteReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"violation", c.violation}});
  return {{"passed", r.passed},
          {"allowance", r.allowance},
          {"worst_violation", r.checks.empty() ? json(nullptr) : json(r.worst_violation)},
          {"checks", std::move(checks)}};
}

// ---- decoders ----

inline double decode_real(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

inline cplx decode_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) bad(path, "expected [re, im]");
  return {decode_real(j[0], path + "[0]"), decode_real(j[1], path + "[1]")};
}

inline bool is_complex(const json& j) { return j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number()); }

inline CVec decode_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a non-empty array of [re, im]");
  // a bare [re, im] is read as a one-component vector
  if (j.size() == 2 && j[0].is_number() && j[1].is_number()) return CVec::Constant(1, decode_complex(j, path));
  CVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = decode_complex(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

inline Poly decode_poly(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a non-empty coefficient array");
  Poly p;
  for (std::size_t i = 0; i < j.size(); ++i) p.push_back(decode_complex(j[i], path + "[" + std::to_string(i) + "]"));
  return p;
}

/// {"point": [...], "components": [[...], ...]}, or the bare components
/// array, with the base point supplied separately (default: origin).
inline JetVector decode_jet(const json& j, const std::string& path, const CVec* point = nullptr) {
  json comps;
  CVec p;
  if (j.is_object()) {
    if (!j.contains("components")) bad(path, "missing field 'components'");
    comps = j["components"];
    if (j.contains("point")) p = decode_vector(j["point"], path + ".point");
  } else {
    comps = j;
  }
  if (!comps.is_array() || comps.empty()) bad(path, "jet needs at least one component");
  std::vector<CVec> xi;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string at = path + "[" + std::to_string(i) + "]";
    xi.push_back(is_complex(comps[i]) ? CVec::Constant(1, decode_complex(comps[i], at)) : decode_vector(comps[i], at));
  }
  if (p.size() == 0) p = point ? *point : CVec::Zero(xi.front().size());
  for (std::size_t i = 0; i < xi.size(); ++i)
    if (xi[i].size() != p.size())
      bad(path + "[" + std::to_string(i) + "]", "dimension " + std::to_string(xi[i].size()) +
                                                    " differs from base point dimension " + std::to_string(p.size()));
  return JetVector(std::move(p), std::move(xi));
}

/// {"components": [{"num": [...], "den": [...]}, ...]} or a bare array of
/// scalar polynomial coefficients.
inline AnalyticDisc decode_disc(const json& j, const std::string& path) {
  if (j.is_array()) return AnalyticDisc::scalar(decode_poly(j, path));
  if (!j.is_object() || !j.contains("components") || !j["components"].is_array())
    bad(path, "expected an object with a 'components' array");
  std::vector<RationalComponent> comps;
  const json& arr = j["components"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = path + ".components[" + std::to_string(i) + "]";
    if (!arr[i].is_object() || !arr[i].contains("num")) bad(at, "missing field 'num'");
    RationalComponent rc{decode_poly(arr[i]["num"], at + ".num")};
    if (arr[i].contains("den")) rc.den = decode_poly(arr[i]["den"], at + ".den");
    comps.push_back(std::move(rc));
  }
  if (comps.empty()) bad(path + ".components", "empty");
  return AnalyticDisc(std::move(comps));
}

inline std::vector<double> decode_reals(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(decode_real(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

/// {"kind": "disc" | "ball" | "ellipsoid" | "complex_ellipsoid", "coeffs": [...],
/// "exponents": [...]}; "ball" also accepts "n" in place of coeffs.
inline Domain decode_domain(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) bad(path, "expected an object with 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  std::vector<double> coeffs;
  if (j.contains("coeffs")) coeffs = decode_reals(j["coeffs"], path + ".coeffs");
  if (kind == "disc") return make_unit_disc();
  if (kind == "ball") {
    std::size_t n = coeffs.empty() ? 2 : coeffs.size();
    if (j.contains("n")) {
      if (!j["n"].is_number_unsigned() || j["n"].get<std::size_t>() < 1) bad(path + ".n", "expected an integer >= 1");
      n = j["n"].get<std::size_t>();
    }
    return make_ball(n);
  }
  if (kind == "ellipsoid") {
    if (coeffs.empty()) bad(path + ".coeffs", "ellipsoid needs coefficients");
    return make_ellipsoid(coeffs);
  }
  if (kind == "complex_ellipsoid") {
    if (!j.contains("exponents") || !j["exponents"].is_array()) bad(path + ".exponents", "missing");
    std::vector<int> m;
    for (std::size_t i = 0; i < j["exponents"].size(); ++i) {
      const json& e = j["exponents"][i];
      if (!e.is_number_integer()) bad(path + ".exponents[" + std::to_string(i) + "]", "expected an integer");
      m.push_back(e.get<int>());
    }
    return make_complex_ellipsoid(m, coeffs);
  }
  bad(path + ".kind", "unknown domain kind '" + kind + "'");
}

/// Parses JSON text, mapping syntax errors to InvalidInput at `path`.
inline json parse(const std::string& text, const std::string& path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(path, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace kjet::io
