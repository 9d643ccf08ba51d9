#pragma once

// JSON encoding of spaces, point sets, certificates, reports and search results.
//
// Decoders are strict: wrong types, missing keys and unknown config keys raise
// InvalidInput. Doubles are written by nlohmann's shortest round-trip printer.

#include "bsa/construct.hpp"
#include "bsa/search.hpp"

#include <json.hpp>  // vendored nlohmann/json

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace bsa::io {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void malformed(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) malformed(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing key '") + key + "'");
  return *it;
}

inline double number(const Json& j, const char* what) {
  if (!j.is_number()) malformed(std::string(what) + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) malformed(std::string(what) + ": non-finite number");
  return x;
}

inline std::size_t index(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) malformed(std::string(what) + ": expected an index");
  return j.get<std::size_t>();
}

}  // namespace detail

inline Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Vector vector_from_json(const Json& j, const char* what = "vector") {
  if (!j.is_array()) detail::malformed(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = detail::number(j[i], what);
  return v;
}

inline std::vector<Vector> vectors_from_json(const Json& j, const char* what) {
  if (!j.is_array()) detail::malformed(std::string(what) + ": expected an array of vectors");
  std::vector<Vector> out;
  for (const auto& v : j) out.push_back(vector_from_json(v, what));
  return out;
}

inline Json vectors_to_json(const std::vector<Vector>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(to_json(v));
  return out;
}

// ---------------------------------------------------------------------------
// spaces

inline Json to_json(const NormSpec& s) {
  if (s.is_lp()) {
    const auto& lp = s.lp_data();
    Json p = lp.p.is_infinite() ? Json("inf") : Json(lp.p.value());
    return {{"type", "lp"}, {"p", p}, {"dim", lp.dim}};
  }
  return {{"type", "polytope"}, {"vertices", vectors_to_json(s.vertices())}};
}

/// Parses and validates (and so canonicalizes) a space.
inline NormSpec space_from_json(const Json& j) {
  const Json& type = detail::field(j, "type");
  if (type == "lp") {
    const Json& p = detail::field(j, "p");
    const Json& dim = detail::field(j, "dim");
    if (!dim.is_number_integer() || dim.get<long long>() < 1) detail::malformed("space.dim: expected a positive integer");
    const auto n = static_cast<Eigen::Index>(dim.get<long long>());
    if (p.is_string()) {
      if (p != "inf") detail::malformed("space.p: the only string value is \"inf\"");
      return validate_space(NormSpec::lp_inf(n));
    }
    return validate_space(NormSpec::lp(detail::number(p, "space.p"), n));
  }
  if (type == "polytope") {
    auto verts = vectors_from_json(detail::field(j, "vertices"), "space.vertices");
    if (verts.empty()) detail::malformed("space.vertices: empty");
    for (const auto& v : verts) require_same_dim(v.size(), verts.front().size(), "space.vertices");
    return NormSpec::polytope(std::move(verts));
  }
  detail::malformed("space.type: expected \"lp\" or \"polytope\"");
}

/// Any object with "space" and "points"; certificates and families qualify.
inline PointSet set_from_json(const Json& j) {
  return PointSet(space_from_json(detail::field(j, "space")), vectors_from_json(detail::field(j, "points"), "points"));
}

// ---------------------------------------------------------------------------
// certificates

inline Json to_json(const BsaCertificate& c) {
  Json pairs = Json::array();
  for (const auto& pc : c.pairs) {
    pairs.push_back({{"upper", pc.upper}, {"lower", pc.lower}, {"f", to_json(pc.functional.coeffs)}, {"margin", pc.margin}});
  }
  return {{"space", to_json(c.set.space())},
          {"points", vectors_to_json(c.set.points())},
          {"pairs", pairs},
          {"c1", c.c1},
          {"c2", c.c2},
          {"d", c.d}};
}

inline BsaCertificate certificate_from_json(const Json& j) {
  PointSet set = set_from_json(j);
  std::vector<PairCertificate> pairs;
  const Json& pj = detail::field(j, "pairs");
  if (!pj.is_array()) detail::malformed("pairs: expected an array");
  for (const auto& p : pj) {
    PairCertificate pc;
    pc.upper = detail::index(detail::field(p, "upper"), "pairs.upper");
    pc.lower = detail::index(detail::field(p, "lower"), "pairs.lower");
    if (pc.upper >= set.size() || pc.lower >= set.size()) {
      throw Error(ErrorCode::IndexError, "pair index out of range");
    }
    Vector f = vector_from_json(detail::field(p, "f"), "pairs.f");
    require_same_dim(f.size(), set.dim(), "pairs.f");
    pc.functional = Functional::make(set.space(), std::move(f));
    pc.margin = detail::number(detail::field(p, "margin"), "pairs.margin");
    pairs.push_back(std::move(pc));
  }
  return {std::move(set), std::move(pairs), detail::number(detail::field(j, "c1"), "c1"),
          detail::number(detail::field(j, "c2"), "c2"), detail::number(detail::field(j, "d"), "d")};
}

inline Json to_json(const MarginReport& r) {
  Json margins = Json::array();
  for (const auto& m : r.margins) {
    margins.push_back({{"upper", m.upper}, {"lower", m.lower}, {"margin", m.margin}, {"distance", m.distance}});
  }
  return {{"margins", margins}, {"d", r.d},           {"separation", r.separation}, {"c1", r.c1},
          {"ka_lower", r.ka_lower}, {"k_lower", r.k_lower}, {"approximate", r.approximate}};
}

inline MarginReport report_from_json(const Json& j) {
  MarginReport r;
  const Json& mj = detail::field(j, "margins");
  if (!mj.is_array()) detail::malformed("margins: expected an array");
  for (const auto& m : mj) {
    r.margins.push_back({detail::index(detail::field(m, "upper"), "margins.upper"),
                         detail::index(detail::field(m, "lower"), "margins.lower"),
                         detail::number(detail::field(m, "margin"), "margins.margin"),
                         detail::number(detail::field(m, "distance"), "margins.distance")});
  }
  r.d = detail::number(detail::field(j, "d"), "d");
  r.separation = detail::number(detail::field(j, "separation"), "separation");
  r.c1 = detail::number(detail::field(j, "c1"), "c1");
  r.ka_lower = detail::number(detail::field(j, "ka_lower"), "ka_lower");
  r.k_lower = detail::number(detail::field(j, "k_lower"), "k_lower");
  const Json& approx = detail::field(j, "approximate");
  if (!approx.is_boolean()) detail::malformed("approximate: expected a boolean");
  r.approximate = approx.get<bool>();
  return r;
}

inline Json to_json(const Verdict& v) {
  Json violations = Json::array();
  for (const auto& x : v.violations) {
    Json e = {{"pair", x.pair ? Json::array({x.pair->first, x.pair->second}) : Json(nullptr)},
              {"inequality", x.inequality},
              {"slack", x.slack}};
    if (x.point) e["point"] = *x.point;
    violations.push_back(std::move(e));
  }
  return {{"valid", v.valid}, {"separated", v.separated}, {"violations", violations}};
}

inline Json to_json(const NamedFamily& f) {
  Json out = to_json(f.certificate());
  out["provenance"] = f.provenance;
  Json params = Json::object();
  for (const auto& [k, v] : f.parameters) params[k] = v;
  out["parameters"] = params;
  return out;
}

// ---------------------------------------------------------------------------
// search

inline Json to_json(const SearchConfig& c) {
  return {{"seed", c.seed},
          {"restarts", c.restarts},
          {"iterations", c.iterations},
          {"initial_temperature", c.initial_temperature},
          {"decay", c.decay},
          {"decay_every", c.decay_every},
          {"step_scale", c.step_scale},
          {"tolerance", c.tolerance}};
}

/// Missing keys keep the values already in `base`; unknown keys are rejected.
inline SearchConfig config_from_json(const Json& j, SearchConfig base = {}) {
  if (!j.is_object()) detail::malformed("config: expected an object");
  auto integer = [](const Json& v, const char* key) {
    if (!v.is_number_integer()) detail::malformed(std::string("config.") + key + ": expected an integer");
    return v.get<long long>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        detail::malformed("config.seed: expected a non-negative integer");
      }
      base.seed = v.get<std::uint64_t>();
    } else if (key == "restarts") {
      base.restarts = static_cast<int>(integer(v, "restarts"));
    } else if (key == "iterations") {
      base.iterations = static_cast<int>(integer(v, "iterations"));
    } else if (key == "decay_every") {
      base.decay_every = static_cast<int>(integer(v, "decay_every"));
    } else if (key == "initial_temperature") {
      base.initial_temperature = detail::number(v, "config.initial_temperature");
    } else if (key == "decay") {
      base.decay = detail::number(v, "config.decay");
    } else if (key == "step_scale") {
      base.step_scale = detail::number(v, "config.step_scale");
    } else if (key == "tolerance") {
      base.tolerance = detail::number(v, "config.tolerance");
    } else {
      detail::malformed("config: unknown key '" + key + "'");
    }
  }
  validate_config(base);
  return base;
}

inline Json search_to_json(const SearchConfig& config, const MarginReport& report, const BsaCertificate& witness,
                           std::optional<double> wall_time = std::nullopt) {
  Json out = {{"config", to_json(config)}, {"report", to_json(report)}, {"witness", to_json(witness)}};
  if (wall_time) out["wall_time"] = *wall_time;
  return out;
}

inline Json error_to_json(ErrorCode code, const std::string& message) {
  return {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}};
}

}  // namespace bsa::io
