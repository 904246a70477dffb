#pragma once

// JSON encoding of norms, operators and certificates (nlohmann::json).
// Every parse problem surfaces as ValidationError.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "planenorm/certificate.hpp"
#include "planenorm/construct.hpp"
#include "planenorm/ellipsoid.hpp"
#include "planenorm/norm2d.hpp"
#include "planenorm/numeric.hpp"
#include "planenorm/operators.hpp"
#include "planenorm/quotient.hpp"

namespace planenorm {

using json = nlohmann::json;

namespace detail {

inline double number(const json& j, const char* what) {
  if (!j.is_number()) throw ValidationError(std::string(what) + ": expected a number");
  return j.get<double>();
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

}  // namespace detail

inline json to_json(Vec2 v) { return json::array({v.x, v.y}); }
inline json to_json(Functional2 f) { return json::array({f.a1, f.a2}); }
inline json to_json(const Mat2& m) { return json::array({json::array({m.a, m.b}), json::array({m.c, m.d})}); }

inline Vec2 vec2_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("expected a pair [x, y]");
  return {detail::number(j[0], "vector"), detail::number(j[1], "vector")};
}

inline Functional2 functional_from_json(const json& j) {
  const Vec2 v = vec2_from_json(j);
  return {v.x, v.y};
}

inline Mat2 mat2_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("expected a 2x2 matrix [[a, b], [c, d]]");
  const Vec2 r0 = vec2_from_json(j[0]);
  const Vec2 r1 = vec2_from_json(j[1]);
  return {r0.x, r0.y, r1.x, r1.y};
}

// --- norms -------------------------------------------------------------------

inline json to_json(const Norm2& n) {
  if (const LpNorm* lp = n.as_lp()) {
    return lp->infinite ? json{{"type", "lp"}, {"p", "inf"}} : json{{"type", "lp"}, {"p", lp->p}};
  }
  if (const PolygonNorm* p = n.as_polygon()) {
    json vs = json::array();
    for (Vec2 v : p->vertices) vs.push_back(to_json(v));
    return {{"type", "polygon"}, {"vertices", vs}};
  }
  return {{"type", "ellipse"}, {"matrix", to_json(n.as_ellipse()->m)}};
}

inline double p_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw ValidationError("p must be a number or \"inf\"");
  }
  return detail::number(j, "p");
}

inline Norm2 norm2_from_json(const json& j) {
  const json& type = detail::field(j, "type");
  if (!type.is_string()) throw ValidationError("norm type must be a string");
  const std::string t = type.get<std::string>();
  if (t == "lp") return Norm2::lp(p_from_json(detail::field(j, "p")));
  if (t == "polygon") {
    const json& vs = detail::field(j, "vertices");
    if (!vs.is_array()) throw ValidationError("polygon vertices must be an array");
    std::vector<Vec2> pts;
    for (const json& v : vs) pts.push_back(vec2_from_json(v));
    return Norm2::polygon(std::move(pts));
  }
  if (t == "ellipse") return Norm2::ellipse(mat2_from_json(detail::field(j, "matrix")));
  throw ValidationError("unknown norm type \"" + t + "\"");
}

inline json to_json(const VecN& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const MatN& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(VecN(m.row(i).transpose())));
  return a;
}

inline VecN vecn_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("expected a non-empty vector");
  VecN v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = detail::number(j[i], "vector");
  return v;
}

inline MatN matn_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("expected a non-empty matrix");
  MatN m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(vecn_from_json(j[0]).size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const VecN r = vecn_from_json(j[i]);
    if (r.size() != m.cols()) throw ValidationError("matrix rows differ in length");
    m.row(static_cast<Eigen::Index>(i)) = r.transpose();
  }
  return m;
}

/// Ambient vectors given as an array of arrays.
inline std::vector<VecN> basis_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("basis must be an array of vectors");
  std::vector<VecN> out;
  for (const json& v : j) out.push_back(vecn_from_json(v));
  return out;
}

inline json to_json(const NormN& n) {
  switch (n.kind()) {
    case NormN::Kind::Lp:
      return n.infinite() ? json{{"type", "lp"}, {"dim", n.dim()}, {"p", "inf"}}
                          : json{{"type", "lp"}, {"dim", n.dim()}, {"p", n.p()}};
    case NormN::Kind::Polytope: {
      json fs = json::array();
      for (const VecN& f : n.facets()) fs.push_back(to_json(f));
      return {{"type", "polytope"}, {"dim", n.dim()}, {"facets", fs}};
    }
    default:
      return {{"type", "ellipsoid"}, {"dim", n.dim()}, {"matrix", to_json(n.matrix())}};
  }
}

inline NormN normn_from_json(const json& j) {
  const json& type = detail::field(j, "type");
  if (!type.is_string()) throw ValidationError("norm type must be a string");
  const std::string t = type.get<std::string>();
  const json& dj = detail::field(j, "dim");
  if (!dj.is_number_integer() || dj.get<int>() < 2) throw ValidationError("dim must be an integer >= 2");
  const int dim = dj.get<int>();
  NormN out = NormN::lp(2, 2.0);
  if (t == "lp") {
    out = NormN::lp(dim, p_from_json(detail::field(j, "p")));
  } else if (t == "polytope") {
    const json& fj = detail::field(j, "facets");
    if (!fj.is_array()) throw ValidationError("facets must be an array");
    std::vector<VecN> fs;
    for (const json& f : fj) fs.push_back(vecn_from_json(f));
    out = NormN::polytope(std::move(fs));
  } else if (t == "ellipsoid") {
    out = NormN::ellipsoid(matn_from_json(detail::field(j, "matrix")));
  } else {
    throw ValidationError("unknown ambient norm type \"" + t + "\"");
  }
  if (out.dim() != dim) throw ValidationError("dim does not match the payload");
  return out;
}

// --- operators -----------------------------------------------------------------

inline json to_json(const Operator2& t) {
  return {{"matrix", to_json(t.matrix)}, {"domain", to_json(t.domain)}, {"codomain", to_json(t.codomain)}};
}

inline Operator2 operator_from_json(const json& j) {
  return make_operator(mat2_from_json(detail::field(j, "matrix")), norm2_from_json(detail::field(j, "domain")),
                       norm2_from_json(detail::field(j, "codomain")));
}

inline json to_json(const JohnEllipse& je) {
  json cs = json::array();
  for (Vec2 c : je.contacts) cs.push_back(to_json(c));
  return {{"A", to_json(je.a)},
          {"det", je.a.det()},
          {"contacts", cs},
          {"contact_angles", je.contact_angles},
          {"violation", je.violation}};
}

// --- certificates --------------------------------------------------------------

namespace detail {

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? to_json(*v) : json(nullptr);
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace detail

inline json to_json(const ConstructionTrace& tr) {
  return {{"kind", to_string(tr.kind)},
          {"subcase", to_string(tr.subcase)},
          {"epsilon", tr.epsilon},
          {"x1", to_json(tr.x1)},
          {"x2", to_json(tr.x2)},
          {"y1", to_json(tr.y1)},
          {"y2", to_json(tr.y2)},
          {"shrink", tr.shrink},
          {"a", tr.a},
          {"b", tr.b},
          {"half_arc", tr.half_arc},
          {"arc_start", tr.arc_start},
          {"t1", tr.t1},
          {"t2", tr.t2},
          {"t3", tr.t3},
          {"s", tr.s},
          {"s1", tr.s1},
          {"s2", tr.s2},
          {"s3", tr.s3},
          {"lambda0", detail::optional_json(tr.lambda0)},
          {"S", detail::optional_json(tr.s_op)},
          {"T1", detail::optional_json(tr.t1_op)},
          {"T", to_json(tr.t_op)},
          {"grid", tr.grid}};
}

inline ConstructionTrace trace_from_json(const json& j) {
  ConstructionTrace tr;
  const std::string kind = detail::field(j, "kind").get<std::string>();
  if (kind == "hilbert") tr.kind = CaseKind::Hilbert;
  else if (kind == "non-hilbert") tr.kind = CaseKind::NonHilbert;
  else throw ValidationError("unknown trace kind \"" + kind + "\"");
  const std::string sub = detail::field(j, "subcase").get<std::string>();
  if (sub == "a=b") tr.subcase = Subcase::AEqualsB;
  else if (sub == "a<b") tr.subcase = Subcase::ALessB;
  else if (sub == "none") tr.subcase = Subcase::None;
  else throw ValidationError("unknown subcase \"" + sub + "\"");
  auto num = [&](const char* k) { return detail::number(detail::field(j, k), k); };
  tr.epsilon = num("epsilon");
  tr.x1 = vec2_from_json(detail::field(j, "x1"));
  tr.x2 = vec2_from_json(detail::field(j, "x2"));
  tr.y1 = vec2_from_json(detail::field(j, "y1"));
  tr.y2 = vec2_from_json(detail::field(j, "y2"));
  tr.shrink = num("shrink");
  tr.a = num("a");
  tr.b = num("b");
  tr.half_arc = static_cast<int>(num("half_arc"));
  tr.arc_start = num("arc_start");
  tr.t1 = num("t1");
  tr.t2 = num("t2");
  tr.t3 = num("t3");
  tr.s = num("s");
  tr.s1 = num("s1");
  tr.s2 = num("s2");
  tr.s3 = num("s3");
  if (!detail::field(j, "lambda0").is_null()) tr.lambda0 = num("lambda0");
  if (!detail::field(j, "S").is_null()) tr.s_op = mat2_from_json(j.at("S"));
  if (!detail::field(j, "T1").is_null()) tr.t1_op = mat2_from_json(j.at("T1"));
  tr.t_op = mat2_from_json(detail::field(j, "T"));
  tr.grid = static_cast<std::size_t>(num("grid"));
  return tr;
}

inline json to_json(const CounterexampleSeed& s) {
  return {{"T", to_json(s.t)},
          {"x0", to_json(s.x0)},
          {"x_y1", to_json(s.x_y1)},
          {"y1", to_json(s.y1)},
          {"y2", to_json(s.y2)},
          {"y1star", to_json(s.y1_star)},
          {"delta", s.delta},
          {"face_distance", s.face_distance},
          {"trace", to_json(s.trace)}};
}

inline CounterexampleSeed seed_from_json(const json& j) {
  CounterexampleSeed s;
  s.t = operator_from_json(detail::field(j, "T"));
  s.x0 = vec2_from_json(detail::field(j, "x0"));
  s.x_y1 = vec2_from_json(detail::field(j, "x_y1"));
  s.y1 = vec2_from_json(detail::field(j, "y1"));
  s.y2 = vec2_from_json(detail::field(j, "y2"));
  s.y1_star = functional_from_json(detail::field(j, "y1star"));
  s.delta = detail::number(detail::field(j, "delta"), "delta");
  s.face_distance = detail::number(detail::field(j, "face_distance"), "face_distance");
  s.trace = trace_from_json(detail::field(j, "trace"));
  return s;
}

/// Certificate plus the verification outcome recorded at write time.
inline json to_json(const Certificate& c, bool verified) {
  json ops = json::array();
  for (const Operator2& t : c.operators) ops.push_back(to_json(t.matrix));
  json att = json::array();
  for (const AttainingReport& a : c.attaining) {
    json arcs = json::array();
    for (const ArcInterval& arc : a.arcs) arcs.push_back(json::array({arc.lo, arc.hi}));
    att.push_back({{"arcs", arcs}, {"min_dist", a.min_dist}, {"min_face_value", a.min_face_value}});
  }
  return {{"seed", to_json(c.seed)},
          {"lambdas", c.lambdas},
          {"operators", ops},
          {"values", c.values},
          {"attaining", att},
          {"renormalized", c.renormalized},
          {"valid", c.valid},
          {"witness", c.witness},
          {"tol", c.tol},
          {"verified", verified}};
}

/// Operators share the seed's domain and codomain.
inline Certificate certificate_from_json(const json& j) {
  Certificate c;
  c.seed = seed_from_json(detail::field(j, "seed"));
  auto doubles = [&](const char* key) {
    const json& a = detail::field(j, key);
    if (!a.is_array()) throw ValidationError(std::string(key) + " must be an array");
    std::vector<double> out;
    for (const json& v : a) out.push_back(detail::number(v, key));
    return out;
  };
  c.lambdas = doubles("lambdas");
  c.values = doubles("values");
  if (j.contains("renormalized")) c.renormalized = doubles("renormalized");
  const json& ops = detail::field(j, "operators");
  if (!ops.is_array()) throw ValidationError("operators must be an array");
  for (const json& m : ops) c.operators.push_back(make_operator(mat2_from_json(m), c.seed.t.domain, c.seed.t.codomain));
  if (j.contains("attaining")) {
    for (const json& a : j.at("attaining")) {
      AttainingReport r;
      for (const json& arc : detail::field(a, "arcs")) {
        const Vec2 v = vec2_from_json(arc);
        r.arcs.push_back({v.x, v.y});
      }
      r.min_dist = detail::number(detail::field(a, "min_dist"), "min_dist");
      if (a.contains("min_face_value")) r.min_face_value = detail::number(a.at("min_face_value"), "min_face_value");
      c.attaining.push_back(std::move(r));
    }
  }
  if (j.contains("valid")) c.valid = j.at("valid").get<bool>();
  if (j.contains("witness")) c.witness = j.at("witness").get<std::string>();
  if (j.contains("tol")) c.tol = detail::number(j.at("tol"), "tol");
  return c;
}

inline json to_json(const LiftReport& r) {
  json ops = json::array();
  for (const MatN& m : r.operators) ops.push_back(to_json(m));
  return {{"x0_hat", to_json(r.x0_hat)},
          {"x0_class_norm", r.x0_class_norm},
          {"operators", ops},
          {"norms_2d", r.norms_2d},
          {"ambient_norms", r.ambient_norms},
          {"values", r.values},
          {"distances", r.distances},
          {"delta", r.delta},
          {"slack", r.slack},
          {"delta_prime", r.delta_prime},
          {"scanned", r.scanned},
          {"pass", r.pass},
          {"detail", r.detail}};
}

// --- files -----------------------------------------------------------------------

/// Parses `source` as JSON text when it starts with '{' or '[', else reads it
/// as a file path.
inline json load_json(const std::string& source) {
  std::string text;
  const auto first = source.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (source[first] == '{' || source[first] == '[')) {
    text = source;
  } else {
    std::ifstream in(source);
    if (!in) throw ValidationError("cannot read " + source);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

inline void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace planenorm
