#pragma once

// JSON instance and certificate files. Parsing is strict: unknown fields are
// rejected and required fields have no defaults.

#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/sha.h>

#include "spirality/error.hpp"
#include "spirality/jsj_graph.hpp"
#include "spirality/lattice.hpp"
#include "spirality/phi_surface.hpp"
#include "spirality/semicover.hpp"

namespace spirality::io {

using json = nlohmann::json;

enum class InputErrorKind { SyntaxError, ReferenceError, InvariantError };

constexpr std::string_view to_string(InputErrorKind k) {
  switch (k) {
    case InputErrorKind::SyntaxError: return "SyntaxError";
    case InputErrorKind::ReferenceError: return "ReferenceError";
    case InputErrorKind::InvariantError: return "InvariantError";
  }
  return "Unknown";
}

struct InputError {
  InputErrorKind kind = InputErrorKind::InvariantError;
  std::string message;
  /// SyntaxError only, 1-based.
  std::size_t line = 0;
  std::size_t column = 0;
  /// ReferenceError only: the name that did not resolve.
  std::string name;

  std::string to_string() const {
    std::string head(io::to_string(kind));
    if (kind == InputErrorKind::SyntaxError)
      head += "(" + std::to_string(line) + ":" + std::to_string(column) + ")";
    else if (kind == InputErrorKind::ReferenceError)
      head += "(" + name + ")";
    return head + ": " + message;
  }
};

template <class T>
struct Parsed {
  std::optional<T> value;
  std::vector<InputError> errors;

  bool ok() const { return value.has_value(); }
};

namespace detail {

struct SchemaFailure {
  std::string message;
};

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& m) const { throw SchemaFailure{(path_.empty() ? "/" : path_) + ": " + m}; }

  void object(std::initializer_list<std::string_view> required, std::initializer_list<std::string_view> optional) const {
    if (!j_.is_object()) fail("expected an object");
    for (auto key : required)
      if (!j_.contains(std::string(key))) fail("missing field \"" + std::string(key) + "\"");
    for (const auto& [key, _] : j_.items()) {
      bool known = false;
      for (auto k : required) known = known || k == key;
      for (auto k : optional) known = known || k == key;
      if (!known) fail("unknown field \"" + key + "\"");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  Reader at(const std::string& key) const { return Reader(j_.at(key), path_ + "/" + key); }
  Reader at(std::size_t i) const { return Reader(j_.at(i), path_ + "/" + std::to_string(i)); }
  const json& raw() const { return j_; }

  std::string str() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected a boolean");
    return j_.get<bool>();
  }
  std::int64_t integer() const {
    if (j_.is_number_integer() && !j_.is_number_unsigned()) return j_.get<std::int64_t>();
    if (j_.is_number_unsigned()) {
      auto u = j_.get<std::uint64_t>();
      if (u <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) return static_cast<std::int64_t>(u);
      fail("integer out of 64-bit range");
    }
    fail("expected an integer");
  }
  BigInt big() const {
    std::string s = str();
    bool ok = !s.empty();
    for (std::size_t i = 0; i < s.size(); ++i) ok = ok && (std::isdigit(static_cast<unsigned char>(s[i])) || (i == 0 && s[i] == '-' && s.size() > 1));
    if (!ok) fail("expected a decimal integer string");
    return BigInt(s);
  }
  std::size_t array(std::optional<std::size_t> exact = std::nullopt) const {
    if (!j_.is_array()) fail("expected an array");
    if (exact && j_.size() != *exact) fail("expected " + std::to_string(*exact) + " entries");
    return j_.size();
  }
  std::vector<std::string> keys() const {
    if (!j_.is_object()) fail("expected an object");
    std::vector<std::string> out;
    for (const auto& [k, _] : j_.items()) out.push_back(k);
    return out;
  }
  IVec vec() const {
    array(2);
    return {at(0).integer(), at(1).integer()};
  }
  Slope slope() const {
    IVec v = vec();
    try {
      return Slope::from_vector(v.x, v.y);
    } catch (const Error&) {
      fail("slope (" + std::to_string(v.x) + "," + std::to_string(v.y) + ") is not primitive");
    }
  }
  std::pair<std::string, std::string> pair() const {
    array(2);
    return {at(0).str(), at(1).str()};
  }

 private:
  const json& j_;
  std::string path_;
};

inline std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline Parsed<json> parse_json(std::string_view text) {
  Parsed<json> out;
  try {
    out.value = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte);
    out.errors.push_back({InputErrorKind::SyntaxError, e.what(), line, col, {}});
  }
  return out;
}

inline json slope_json(const Slope& s) { return json::array({s.p(), s.q()}); }
inline json vec_json(const IVec& v) { return json::array({v.x, v.y}); }
inline json big_json(const BigInt& x) { return spirality::detail::to_decimal(x); }

inline Piece read_piece(const Reader& r) {
  r.object({"id", "kind", "boundary"}, {"fiber_slopes", "degeneracy_slopes"});
  Piece p;
  p.id = r.at("id").str();
  auto kind = piece_kind_from_string(r.at("kind").str());
  if (!kind) r.at("kind").fail("unknown piece kind");
  p.kind = *kind;
  Reader b = r.at("boundary");
  for (std::size_t i = 0, n = b.array(); i < n; ++i) {
    Reader c = b.at(i);
    c.object({"id", "genus"}, {});
    std::int64_t genus = c.at("genus").integer();
    if (genus < std::numeric_limits<int>::min() || genus > std::numeric_limits<int>::max()) c.at("genus").fail("genus out of range");
    p.boundary.push_back({c.at("id").str(), static_cast<int>(genus)});
  }
  for (const char* key : {"fiber_slopes", "degeneracy_slopes"}) {
    if (!r.has(key)) continue;
    Reader m = r.at(key);
    auto& dest = std::string_view(key) == "fiber_slopes" ? p.fiber_slopes : p.degeneracy_slopes;
    for (const auto& k : m.keys()) dest.emplace(k, m.at(k).slope());
  }
  return p;
}

inline JsjGraph read_jsj(const Reader& r) {
  r.object({"pieces", "edges", "is_sol", "trivial_decomposition"}, {});
  JsjGraph g;
  Reader ps = r.at("pieces");
  for (std::size_t i = 0, n = ps.array(); i < n; ++i) g.pieces.push_back(read_piece(ps.at(i)));
  Reader es = r.at("edges");
  for (std::size_t i = 0, n = es.array(); i < n; ++i) {
    Reader e = es.at(i);
    e.object({"id", "end_a", "end_b", "gluing"}, {});
    Edge edge;
    edge.id = e.at("id").str();
    auto [pa, ta] = e.at("end_a").pair();
    auto [pb, tb] = e.at("end_b").pair();
    edge.end_a = {pa, ta};
    edge.end_b = {pb, tb};
    Reader m = e.at("gluing");
    m.array(4);
    try {
      edge.gluing = Gluing::from_rows(m.at(0).integer(), m.at(1).integer(), m.at(2).integer(), m.at(3).integer());
    } catch (const Error& err) {
      m.fail(err.what());
    }
    g.edges.push_back(std::move(edge));
  }
  g.is_sol = r.at("is_sol").boolean();
  g.trivial_decomposition = r.at("trivial_decomposition").boolean();
  return g;
}

inline PhiGraph read_phi(const Reader& r) {
  r.object({"vertices", "edges"}, {});
  PhiGraph g;
  Reader vs = r.at("vertices");
  for (std::size_t i = 0, n = vs.array(); i < n; ++i) {
    Reader v = vs.at(i);
    v.object({"id", "piece", "kind", "circles"}, {"planes"});
    PhiVertex pv;
    pv.id = v.at("id").str();
    pv.piece = v.at("piece").str();
    auto kind = phi_vertex_kind_from_string(v.at("kind").str());
    if (!kind) v.at("kind").fail("unknown phi vertex kind");
    pv.kind = *kind;
    Reader cs = v.at("circles");
    for (std::size_t k = 0, m = cs.array(); k < m; ++k) {
      Reader c = cs.at(k);
      c.object({"id", "torus"}, {"seifert_intersection", "cusp_degree", "core"});
      BoundaryCircle bc;
      bc.id = c.at("id").str();
      bc.torus = c.at("torus").str();
      if (c.has("seifert_intersection")) bc.seifert_intersection = c.at("seifert_intersection").integer();
      if (c.has("cusp_degree")) bc.cusp_degree = c.at("cusp_degree").integer();
      if (c.has("core")) bc.core = c.at("core").vec();
      pv.circles.push_back(std::move(bc));
    }
    if (v.has("planes")) {
      Reader ps = v.at("planes");
      for (std::size_t k = 0, m = ps.array(); k < m; ++k) {
        Reader p = ps.at(k);
        p.object({"id", "torus"}, {});
        pv.planes.push_back({p.at("id").str(), p.at("torus").str()});
      }
    }
    g.vertices.push_back(std::move(pv));
  }
  Reader es = r.at("edges");
  for (std::size_t i = 0, n = es.array(); i < n; ++i) {
    Reader e = es.at(i);
    e.object({"id", "end_a", "end_b", "jsj_edge"}, {});
    auto [va, ca] = e.at("end_a").pair();
    auto [vb, cb] = e.at("end_b").pair();
    g.edges.push_back({e.at("id").str(), {va, ca}, {vb, cb}, e.at("jsj_edge").str()});
  }
  return g;
}

inline CoverSection read_cover(const Reader& r) {
  r.object({"vertices", "edges"}, {});
  CoverSection s;
  Reader vs = r.at("vertices");
  for (std::size_t i = 0, n = vs.array(); i < n; ++i) {
    Reader v = vs.at(i);
    v.object({"id", "piece", "kind", "ends"}, {});
    CoverVertex cv;
    cv.id = v.at("id").str();
    cv.piece = v.at("piece").str();
    auto kind = cover_vertex_kind_from_string(v.at("kind").str());
    if (!kind) v.at("kind").fail("unknown cover vertex kind");
    cv.kind = *kind;
    Reader es = v.at("ends");
    for (std::size_t k = 0, m = es.array(); k < m; ++k) {
      Reader e = es.at(k);
      e.object({"id", "torus", "type"}, {"core", "lattice"});
      CoverEnd ce;
      ce.id = e.at("id").str();
      ce.torus = e.at("torus").str();
      auto type = end_type_from_string(e.at("type").str());
      if (!type) e.at("type").fail("unknown end type");
      ce.type = *type;
      if (e.has("core")) ce.core = e.at("core").vec();
      if (e.has("lattice")) {
        Reader l = e.at("lattice");
        l.array(4);
        ce.lattice = std::array<std::int64_t, 4>{l.at(0).integer(), l.at(1).integer(), l.at(2).integer(), l.at(3).integer()};
      }
      cv.ends.push_back(std::move(ce));
    }
    s.vertices.push_back(std::move(cv));
  }
  Reader es = r.at("edges");
  for (std::size_t i = 0, n = es.array(); i < n; ++i) {
    Reader e = es.at(i);
    e.object({"id", "type", "end_a", "end_b", "jsj_edge"}, {});
    CoverEdge ce;
    ce.id = e.at("id").str();
    auto type = end_type_from_string(e.at("type").str());
    if (!type) e.at("type").fail("unknown edge type");
    ce.type = *type;
    auto [va, sa] = e.at("end_a").pair();
    auto [vb, sb] = e.at("end_b").pair();
    ce.end_a = {va, sa};
    ce.end_b = {vb, sb};
    ce.jsj_edge = e.at("jsj_edge").str();
    s.edges.push_back(std::move(ce));
  }
  return s;
}

inline ConstantInput read_constants(const Reader& r) {
  r.object({}, {"vertex", "cusp", "extra_factor"});
  ConstantInput c;
  if (r.has("vertex")) {
    Reader v = r.at("vertex");
    for (const auto& k : v.keys()) c.vertex[k] = v.at(k).integer();
  }
  if (r.has("cusp")) {
    Reader cu = r.at("cusp");
    for (const auto& k : cu.keys()) {
      Reader per = cu.at(k);
      auto& dest = c.cusp[k];
      for (const auto& ck : per.keys()) dest[ck] = per.at(ck).integer();
    }
  }
  if (r.has("extra_factor")) {
    c.extra_factor = r.at("extra_factor").integer();
    c.has_extra_factor = true;
  }
  return c;
}

inline std::vector<InputError> reference_errors(const Instance& inst) {
  std::vector<InputError> out;
  auto missing = [&](const std::string& name, const std::string& where) {
    out.push_back({InputErrorKind::ReferenceError, where + " refers to unknown " + name, 0, 0, name});
  };
  const JsjGraph& jsj = inst.jsj;
  auto torus_of = [&](const std::string& piece, const std::string& torus, const std::string& where) {
    const Piece* p = jsj.find_piece(piece);
    if (p == nullptr)
      missing(piece, where);
    else if (p->find_boundary(torus) == nullptr)
      missing(piece + "/" + torus, where);
  };
  for (const auto& p : jsj.pieces)
    for (const auto* m : {&p.fiber_slopes, &p.degeneracy_slopes})
      for (const auto& [bid, _] : *m)
        if (p.find_boundary(bid) == nullptr) missing(p.id + "/" + bid, "piece " + p.id);
  for (const auto& e : jsj.edges) {
    torus_of(e.end_a.piece, e.end_a.boundary, "jsj edge " + e.id);
    torus_of(e.end_b.piece, e.end_b.boundary, "jsj edge " + e.id);
  }
  for (const auto& v : inst.phi.vertices) {
    if (jsj.find_piece(v.piece) == nullptr) {
      missing(v.piece, "phi vertex " + v.id);
      continue;
    }
    for (const auto& c : v.circles) torus_of(v.piece, c.torus, "phi circle " + v.id + "/" + c.id);
    for (const auto& p : v.planes) torus_of(v.piece, p.torus, "phi plane " + v.id + "/" + p.id);
  }
  for (const auto& e : inst.phi.edges) {
    if (jsj.find_edge(e.jsj_edge) == nullptr) missing(e.jsj_edge, "phi edge " + e.id);
    for (const CircleRef* end : {&e.end_a, &e.end_b}) {
      const PhiVertex* v = inst.phi.find_vertex(end->vertex);
      if (v == nullptr)
        missing(end->vertex, "phi edge " + e.id);
      else if (v->find_circle(end->circle) == nullptr)
        missing(end->vertex + "/" + end->circle, "phi edge " + e.id);
    }
  }
  std::set<std::string> gk_vertices;
  for (const auto& v : inst.phi.vertices) gk_vertices.insert(v.id);
  if (inst.cover) {
    for (const auto& v : inst.cover->vertices) {
      gk_vertices.insert(v.id);
      if (jsj.find_piece(v.piece) == nullptr) {
        missing(v.piece, "cover vertex " + v.id);
        continue;
      }
      for (const auto& e : v.ends) torus_of(v.piece, e.torus, "cover end " + v.id + "/" + e.id);
    }
    for (const auto& e : inst.cover->edges) {
      if (jsj.find_edge(e.jsj_edge) == nullptr) missing(e.jsj_edge, "cover edge " + e.id);
      for (const SlotRef* end : {&e.end_a, &e.end_b}) {
        if (!gk_vertices.contains(end->vertex)) {
          missing(end->vertex, "cover edge " + e.id);
          continue;
        }
        bool found = false;
        if (const PhiVertex* pv = inst.phi.find_vertex(end->vertex))
          found = pv->find_circle(end->slot) || pv->find_plane(end->slot);
        for (const auto& cv : inst.cover->vertices)
          if (cv.id == end->vertex) found = found || cv.find_end(end->slot);
        if (!found) missing(end->vertex + "/" + end->slot, "cover edge " + e.id);
      }
    }
  }
  if (inst.constants) {
    for (const auto& [vid, _] : inst.constants->vertex)
      if (!gk_vertices.contains(vid)) missing(vid, "constants");
    for (const auto& [vid, per] : inst.constants->cusp) {
      const PhiVertex* v = inst.phi.find_vertex(vid);
      if (v == nullptr) {
        missing(vid, "constants");
        continue;
      }
      for (const auto& [cid, __] : per)
        if (v->find_circle(cid) == nullptr) missing(vid + "/" + cid, "constants");
    }
  }
  return out;
}

}  // namespace detail

/// Parses and fully validates an instance file.
inline Parsed<Instance> parse_instance(std::string_view text) {
  Parsed<Instance> out;
  Parsed<json> j = detail::parse_json(text);
  if (!j.ok()) {
    out.errors = std::move(j.errors);
    return out;
  }
  Instance inst;
  try {
    detail::Reader r(*j.value, "");
    r.object({"version", "jsj", "phi", "subgroup"}, {"cover", "constants"});
    if (r.at("version").str() != "1") r.at("version").fail("unsupported version");
    inst.jsj = detail::read_jsj(r.at("jsj"));
    inst.phi = detail::read_phi(r.at("phi"));
    if (r.has("cover")) inst.cover = detail::read_cover(r.at("cover"));
    if (r.has("constants")) inst.constants = detail::read_constants(r.at("constants"));
    detail::Reader s = r.at("subgroup");
    s.object({"infinite_index"}, {});
    inst.infinite_index = s.at("infinite_index").boolean();
  } catch (const detail::SchemaFailure& f) {
    out.errors.push_back({InputErrorKind::InvariantError, f.message, 0, 0, {}});
    return out;
  }
  out.errors = detail::reference_errors(inst);
  if (!out.errors.empty()) return out;
  auto add = [&](const std::vector<std::string>& vs) {
    for (const auto& v : vs) out.errors.push_back({InputErrorKind::InvariantError, v, 0, 0, {}});
  };
  add(validate(inst.jsj));
  if (out.errors.empty()) add(validate_phi(inst.jsj, inst.phi));
  if (out.errors.empty()) add(validate_cover(inst));
  if (out.errors.empty()) out.value = std::move(inst);
  return out;
}

inline json to_json(const Instance& inst) {
  json pieces = json::array();
  for (const auto& p : inst.jsj.pieces) {
    json b = json::array();
    for (const auto& c : p.boundary) b.push_back({{"id", c.id}, {"genus", c.genus}});
    json jp = {{"id", p.id}, {"kind", to_string(p.kind)}, {"boundary", b}};
    for (const auto& [key, m] : {std::pair{"fiber_slopes", &p.fiber_slopes}, std::pair{"degeneracy_slopes", &p.degeneracy_slopes}}) {
      if (m->empty()) continue;
      json o = json::object();
      for (const auto& [bid, s] : *m) o[bid] = detail::slope_json(s);
      jp[key] = o;
    }
    pieces.push_back(jp);
  }
  json edges = json::array();
  for (const auto& e : inst.jsj.edges) {
    const auto& m = e.gluing.entries();
    edges.push_back({{"id", e.id},
                     {"end_a", {e.end_a.piece, e.end_a.boundary}},
                     {"end_b", {e.end_b.piece, e.end_b.boundary}},
                     {"gluing", {m[0], m[1], m[2], m[3]}}});
  }
  json vertices = json::array();
  for (const auto& v : inst.phi.vertices) {
    json circles = json::array();
    for (const auto& c : v.circles) {
      json jc = {{"id", c.id}, {"torus", c.torus}};
      if (c.seifert_intersection) jc["seifert_intersection"] = *c.seifert_intersection;
      if (c.cusp_degree) jc["cusp_degree"] = *c.cusp_degree;
      if (c.core) jc["core"] = detail::vec_json(*c.core);
      circles.push_back(jc);
    }
    json jv = {{"id", v.id}, {"piece", v.piece}, {"kind", to_string(v.kind)}, {"circles", circles}};
    if (!v.planes.empty()) {
      json planes = json::array();
      for (const auto& p : v.planes) planes.push_back({{"id", p.id}, {"torus", p.torus}});
      jv["planes"] = planes;
    }
    vertices.push_back(jv);
  }
  json phi_edges = json::array();
  for (const auto& e : inst.phi.edges)
    phi_edges.push_back({{"id", e.id},
                         {"end_a", {e.end_a.vertex, e.end_a.circle}},
                         {"end_b", {e.end_b.vertex, e.end_b.circle}},
                         {"jsj_edge", e.jsj_edge}});
  json out = {{"version", "1"},
              {"jsj",
               {{"pieces", pieces},
                {"edges", edges},
                {"is_sol", inst.jsj.is_sol},
                {"trivial_decomposition", inst.jsj.trivial_decomposition}}},
              {"phi", {{"vertices", vertices}, {"edges", phi_edges}}},
              {"subgroup", {{"infinite_index", inst.infinite_index}}}};
  if (inst.cover) {
    json cv = json::array();
    for (const auto& v : inst.cover->vertices) {
      json ends = json::array();
      for (const auto& e : v.ends) {
        json je = {{"id", e.id}, {"torus", e.torus}, {"type", to_string(e.type)}};
        if (e.core) je["core"] = detail::vec_json(*e.core);
        if (e.lattice) je["lattice"] = *e.lattice;
        ends.push_back(je);
      }
      cv.push_back({{"id", v.id}, {"piece", v.piece}, {"kind", to_string(v.kind)}, {"ends", ends}});
    }
    json ce = json::array();
    for (const auto& e : inst.cover->edges)
      ce.push_back({{"id", e.id},
                    {"type", to_string(e.type)},
                    {"end_a", {e.end_a.vertex, e.end_a.slot}},
                    {"end_b", {e.end_b.vertex, e.end_b.slot}},
                    {"jsj_edge", e.jsj_edge}});
    out["cover"] = {{"vertices", cv}, {"edges", ce}};
  }
  if (inst.constants) {
    json c = json::object();
    if (!inst.constants->vertex.empty()) c["vertex"] = inst.constants->vertex;
    if (!inst.constants->cusp.empty()) c["cusp"] = inst.constants->cusp;
    if (inst.constants->has_extra_factor) c["extra_factor"] = inst.constants->extra_factor;
    out["constants"] = c;
  }
  return out;
}

inline std::string serialize_instance(const Instance& inst) { return to_json(inst).dump(2) + "\n"; }

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  std::ostringstream os;
  for (unsigned char b : digest) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
  return os.str();
}

/// Digest of the canonical form: sorted keys, no whitespace.
inline std::string instance_digest(std::string_view text) { return sha256_hex(json::parse(text).dump()); }

struct CertificateFile {
  std::string instance_sha256;
  CoverCertificate certificate;

  friend bool operator==(const CertificateFile&, const CertificateFile&) = default;
};

namespace detail {

inline json cycle_json(const Cycle& c) {
  json out = json::array();
  for (const auto& oe : c) out.push_back({{"edge", oe.edge}, {"forward", oe.forward}});
  return out;
}

inline json big_map(const std::map<std::string, BigInt>& m) {
  json o = json::object();
  for (const auto& [k, v] : m) o[k] = big_json(v);
  return o;
}

inline json side_json(const SideAssignment& s) {
  json o = {{"vertex", s.slot.vertex},
            {"slot", s.slot.slot},
            {"lattice", {big_json(s.lattice.a()), big_json(s.lattice.b()), big_json(s.lattice.d())}}};
  if (s.slopes.t) o["t"] = slope_json(*s.slopes.t);
  if (s.slopes.u) o["u"] = slope_json(*s.slopes.u);
  if (s.slopes.v) o["v"] = slope_json(*s.slopes.v);
  return o;
}

inline std::map<std::string, BigInt> read_big_map(const Reader& r) {
  std::map<std::string, BigInt> m;
  for (const auto& k : r.keys()) m[k] = r.at(k).big();
  return m;
}

inline SideAssignment read_side(const Reader& r) {
  r.object({"vertex", "slot", "lattice"}, {"t", "u", "v"});
  SideAssignment s;
  s.slot = {r.at("vertex").str(), r.at("slot").str()};
  if (r.has("t")) s.slopes.t = r.at("t").slope();
  if (r.has("u")) s.slopes.u = r.at("u").slope();
  if (r.has("v")) s.slopes.v = r.at("v").slope();
  Reader l = r.at("lattice");
  l.array(3);
  try {
    s.lattice = Lattice::from_hnf(l.at(0).big(), l.at(1).big(), l.at(2).big());
  } catch (const Error& e) {
    l.fail(e.what());
  }
  return s;
}

}  // namespace detail

inline json to_json(const CertificateFile& f) {
  const CoverCertificate& c = f.certificate;
  json cusp = json::object();
  for (const auto& [v, per] : c.constants.cusp) cusp[v] = detail::big_map(per);
  json compat = json::object();
  for (const auto& [e, bb] : c.constants.compat) compat[e] = {detail::big_json(bb.first), detail::big_json(bb.second)};
  json chords = json::array();
  for (const auto& ch : c.tree.chords) {
    json jc = {{"edge", ch.edge}, {"condition", ch.condition}};
    if (ch.cycle) jc["cycle"] = detail::cycle_json(*ch.cycle);
    chords.push_back(jc);
  }
  json params = json::object();
  for (const auto& [v, p] : c.parameters) {
    json jp = json::object();
    if (p.alpha) jp["alpha"] = detail::big_json(*p.alpha);
    if (!p.cylinder.empty()) jp["cylinder"] = detail::big_map(p.cylinder);
    if (!p.plane_u.empty()) jp["plane_u"] = detail::big_map(p.plane_u);
    if (!p.plane_v.empty()) jp["plane_v"] = detail::big_map(p.plane_v);
    params[v] = jp;
  }
  json edges = json::array();
  for (const auto& e : c.edges)
    edges.push_back({{"id", e.id},
                     {"type", to_string(e.type)},
                     {"side_a", detail::side_json(e.sides[0])},
                     {"side_b", detail::side_json(e.sides[1])}});
  return {{"version", "1"},
          {"instance_sha256", f.instance_sha256},
          {"frak_a", detail::big_json(c.constants.frak_a)},
          {"constants",
           {{"vertex", detail::big_map(c.constants.vertex)},
            {"cusp", cusp},
            {"compat", compat},
            {"extra_factor", detail::big_json(c.constants.extra_factor)}}},
          {"tree", {{"order", c.tree.order}, {"edges", c.tree.edges}, {"chords", chords}}},
          {"parameters", params},
          {"edges", edges}};
}

inline std::string serialize_certificate(const CertificateFile& f) { return to_json(f).dump(2) + "\n"; }

inline Parsed<CertificateFile> parse_certificate(std::string_view text) {
  Parsed<CertificateFile> out;
  Parsed<json> j = detail::parse_json(text);
  if (!j.ok()) {
    out.errors = std::move(j.errors);
    return out;
  }
  CertificateFile f;
  CoverCertificate& c = f.certificate;
  try {
    detail::Reader r(*j.value, "");
    r.object({"version", "instance_sha256", "frak_a", "constants", "tree", "parameters", "edges"}, {});
    if (r.at("version").str() != "1") r.at("version").fail("unsupported version");
    f.instance_sha256 = r.at("instance_sha256").str();
    c.constants.frak_a = r.at("frak_a").big();
    detail::Reader k = r.at("constants");
    k.object({"vertex", "cusp", "compat", "extra_factor"}, {});
    c.constants.vertex = detail::read_big_map(k.at("vertex"));
    detail::Reader cusp = k.at("cusp");
    for (const auto& v : cusp.keys()) c.constants.cusp[v] = detail::read_big_map(cusp.at(v));
    detail::Reader compat = k.at("compat");
    for (const auto& e : compat.keys()) {
      detail::Reader p = compat.at(e);
      p.array(2);
      c.constants.compat[e] = {p.at(0).big(), p.at(1).big()};
    }
    c.constants.extra_factor = k.at("extra_factor").big();

    detail::Reader t = r.at("tree");
    t.object({"order", "edges", "chords"}, {});
    detail::Reader order = t.at("order");
    for (std::size_t i = 0, n = order.array(); i < n; ++i) {
      detail::Reader comp = order.at(i);
      std::vector<std::string> ids;
      for (std::size_t j2 = 0, m = comp.array(); j2 < m; ++j2) ids.push_back(comp.at(j2).str());
      c.tree.order.push_back(std::move(ids));
    }
    detail::Reader te = t.at("edges");
    for (std::size_t i = 0, n = te.array(); i < n; ++i) c.tree.edges.push_back(te.at(i).str());
    detail::Reader chords = t.at("chords");
    for (std::size_t i = 0, n = chords.array(); i < n; ++i) {
      detail::Reader ch = chords.at(i);
      ch.object({"edge", "condition"}, {"cycle"});
      Chord chord;
      chord.edge = ch.at("edge").str();
      std::int64_t cond = ch.at("condition").integer();
      if (cond < 1 || cond > 3) ch.at("condition").fail("condition must be 1, 2 or 3");
      chord.condition = static_cast<int>(cond);
      if (ch.has("cycle")) {
        detail::Reader cy = ch.at("cycle");
        Cycle cycle;
        for (std::size_t j2 = 0, m = cy.array(); j2 < m; ++j2) {
          detail::Reader oe = cy.at(j2);
          oe.object({"edge", "forward"}, {});
          cycle.push_back({oe.at("edge").str(), oe.at("forward").boolean()});
        }
        chord.cycle = std::move(cycle);
      }
      c.tree.chords.push_back(std::move(chord));
    }

    detail::Reader ps = r.at("parameters");
    for (const auto& v : ps.keys()) {
      detail::Reader p = ps.at(v);
      p.object({}, {"alpha", "cylinder", "plane_u", "plane_v"});
      VertexParameters vp;
      if (p.has("alpha")) vp.alpha = p.at("alpha").big();
      if (p.has("cylinder")) vp.cylinder = detail::read_big_map(p.at("cylinder"));
      if (p.has("plane_u")) vp.plane_u = detail::read_big_map(p.at("plane_u"));
      if (p.has("plane_v")) vp.plane_v = detail::read_big_map(p.at("plane_v"));
      c.parameters[v] = std::move(vp);
    }

    detail::Reader es = r.at("edges");
    for (std::size_t i = 0, n = es.array(); i < n; ++i) {
      detail::Reader e = es.at(i);
      e.object({"id", "type", "side_a", "side_b"}, {});
      EdgeAssignment ea;
      ea.id = e.at("id").str();
      auto type = end_type_from_string(e.at("type").str());
      if (!type) e.at("type").fail("unknown edge type");
      ea.type = *type;
      ea.sides[0] = detail::read_side(e.at("side_a"));
      ea.sides[1] = detail::read_side(e.at("side_b"));
      c.edges.push_back(std::move(ea));
    }
  } catch (const detail::SchemaFailure& fail) {
    out.errors.push_back({InputErrorKind::InvariantError, fail.message, 0, 0, {}});
    return out;
  }
  out.value = std::move(f);
  return out;
}

}  // namespace spirality::io
