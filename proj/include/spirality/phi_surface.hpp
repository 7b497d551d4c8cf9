#pragma once

// The almost fibered surface as a graph over the JSJ graph, and the spirality
// character on its cycles.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spirality/error.hpp"
#include "spirality/jsj_graph.hpp"
#include "spirality/lattice.hpp"
#include "spirality/rational.hpp"

namespace spirality {

enum class PhiVertexKind { SeifertVirtuallyFibered, SeifertPartiallyFibered, HypVirtuallyFibered };

constexpr std::string_view to_string(PhiVertexKind k) {
  switch (k) {
    case PhiVertexKind::SeifertVirtuallyFibered: return "SeifertVirtuallyFibered";
    case PhiVertexKind::SeifertPartiallyFibered: return "SeifertPartiallyFibered";
    case PhiVertexKind::HypVirtuallyFibered: return "HypVirtuallyFibered";
  }
  return "Unknown";
}

inline std::optional<PhiVertexKind> phi_vertex_kind_from_string(std::string_view s) {
  for (PhiVertexKind k : {PhiVertexKind::SeifertVirtuallyFibered, PhiVertexKind::SeifertPartiallyFibered,
                          PhiVertexKind::HypVirtuallyFibered})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline bool is_seifert(PhiVertexKind k) { return k != PhiVertexKind::HypVirtuallyFibered; }

struct BoundaryCircle {
  std::string id;
  std::string torus;
  std::optional<std::int64_t> seifert_intersection;
  std::optional<std::int64_t> cusp_degree;
  /// Image of the circle in the torus, in the piece's torus basis. May be a
  /// proper multiple of a slope.
  std::optional<IVec> core;

  friend bool operator==(const BoundaryCircle&, const BoundaryCircle&) = default;
};

/// A plane boundary component of a partially fibered vertex.
struct PlaneBoundary {
  std::string id;
  std::string torus;

  friend bool operator==(const PlaneBoundary&, const PlaneBoundary&) = default;
};

struct PhiVertex {
  std::string id;
  std::string piece;
  PhiVertexKind kind = PhiVertexKind::SeifertVirtuallyFibered;
  std::vector<BoundaryCircle> circles;
  std::vector<PlaneBoundary> planes;

  const BoundaryCircle* find_circle(std::string_view cid) const {
    for (const auto& c : circles)
      if (c.id == cid) return &c;
    return nullptr;
  }

  const PlaneBoundary* find_plane(std::string_view pid) const {
    for (const auto& p : planes)
      if (p.id == pid) return &p;
    return nullptr;
  }

  friend bool operator==(const PhiVertex&, const PhiVertex&) = default;
};

struct CircleRef {
  std::string vertex;
  std::string circle;

  friend bool operator==(const CircleRef&, const CircleRef&) = default;
  friend auto operator<=>(const CircleRef&, const CircleRef&) = default;
};

struct PhiEdge {
  std::string id;
  CircleRef end_a;
  CircleRef end_b;
  std::string jsj_edge;

  friend bool operator==(const PhiEdge&, const PhiEdge&) = default;
};

struct PhiGraph {
  std::vector<PhiVertex> vertices;
  std::vector<PhiEdge> edges;

  const PhiVertex* find_vertex(std::string_view vid) const {
    for (const auto& v : vertices)
      if (v.id == vid) return &v;
    return nullptr;
  }

  const PhiEdge* find_edge(std::string_view eid) const {
    for (const auto& e : edges)
      if (e.id == eid) return &e;
    return nullptr;
  }

  friend bool operator==(const PhiGraph&, const PhiGraph&) = default;
};

/// An edge traversed from end_a to end_b (forward) or back.
struct OrientedEdge {
  std::string edge;
  bool forward = true;

  OrientedEdge reversed() const { return {edge, !forward}; }

  friend bool operator==(const OrientedEdge&, const OrientedEdge&) = default;
};

using Cycle = std::vector<OrientedEdge>;

inline Cycle reverse_cycle(const Cycle& c) {
  Cycle out;
  for (auto it = c.rbegin(); it != c.rend(); ++it) out.push_back(it->reversed());
  return out;
}

/// "e1,-e2" style rendering; a leading '-' marks a backward traversal.
inline std::string format_cycle(const Cycle& c) {
  std::string s = "[";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ',';
    if (!c[i].forward) s += '-';
    s += c[i].edge;
  }
  return s + "]";
}

inline const CircleRef& tail(const PhiEdge& e, bool forward) { return forward ? e.end_a : e.end_b; }
inline const CircleRef& head(const PhiEdge& e, bool forward) { return forward ? e.end_b : e.end_a; }

/// Ratio for a proper path that starts on `c_ini` and ends on `c_ter`:
/// fiber intersection numbers for Seifert vertices, cusp covering degrees
/// for hyperbolic ones.
inline SpiralityValue s_delta(const PhiVertex& v, std::string_view c_ini, std::string_view c_ter) {
  const BoundaryCircle* a = v.find_circle(c_ini);
  const BoundaryCircle* b = v.find_circle(c_ter);
  if (a == nullptr || b == nullptr)
    throw Error(ErrorCode::UnknownCircle,
                "vertex " + v.id + " has no circle " + std::string(a == nullptr ? c_ini : c_ter));
  if (is_seifert(v.kind)) {
    if (!a->seifert_intersection || !b->seifert_intersection)
      throw Error(ErrorCode::MissingData, "vertex " + v.id + ": missing seifert_intersection");
    return SpiralityValue(*a->seifert_intersection, *b->seifert_intersection);
  }
  if (!a->cusp_degree || !b->cusp_degree) throw Error(ErrorCode::MissingData, "vertex " + v.id + ": missing cusp_degree");
  return SpiralityValue(*a->cusp_degree, *b->cusp_degree);
}

inline SpiralityValue spirality_on_cycle(const PhiGraph& phi, const Cycle& cycle) {
  SpiralityValue value;
  const std::size_t n = cycle.size();
  std::vector<const PhiEdge*> edges;
  for (const auto& oe : cycle) {
    const PhiEdge* e = phi.find_edge(oe.edge);
    if (e == nullptr) throw Error(ErrorCode::NotAClosedPath, "unknown edge " + oe.edge);
    edges.push_back(e);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const CircleRef& in = head(*edges[i], cycle[i].forward);
    const CircleRef& out = tail(*edges[(i + 1) % n], cycle[(i + 1) % n].forward);
    if (in.vertex != out.vertex)
      throw Error(ErrorCode::NotAClosedPath, "edge " + cycle[i].edge + " does not end where the next edge starts");
    value *= s_delta(*phi.find_vertex(in.vertex), in.circle, out.circle);
  }
  return value;
}

namespace detail {

struct TreeAdjacency {
  // vertex -> (neighbor, oriented edge leading there)
  std::map<std::string, std::vector<std::pair<std::string, OrientedEdge>>> adj;

  void add(const PhiEdge& e) {
    adj[e.end_a.vertex].push_back({e.end_b.vertex, OrientedEdge{e.id, true}});
    adj[e.end_b.vertex].push_back({e.end_a.vertex, OrientedEdge{e.id, false}});
  }

  /// Oriented edges of the unique tree path from `from` to `to`.
  Cycle path(const std::string& from, const std::string& to) const {
    std::map<std::string, std::pair<std::string, OrientedEdge>> parent;
    std::deque<std::string> queue{from};
    std::set<std::string> seen{from};
    while (!queue.empty()) {
      std::string x = queue.front();
      queue.pop_front();
      if (x == to) break;
      auto it = adj.find(x);
      if (it == adj.end()) continue;
      for (const auto& [y, oe] : it->second) {
        if (!seen.insert(y).second) continue;
        parent[y] = {x, oe};
        queue.push_back(y);
      }
    }
    if (!seen.contains(to)) throw Error(ErrorCode::InternalInconsistency, "tree path does not exist");
    Cycle out;
    for (std::string x = to; x != from; x = parent.at(x).first) out.push_back(parent.at(x).second);
    std::reverse(out.begin(), out.end());
    return out;
  }
};

}  // namespace detail

/// The cycle made of `chord` (forward) followed by the tree path back to its
/// start. `tree_edges` must form a forest containing both chord endpoints in
/// one component.
inline Cycle fundamental_cycle(const PhiGraph& phi, const std::set<std::string>& tree_edges, const std::string& chord) {
  detail::TreeAdjacency tree;
  for (const auto& e : phi.edges)
    if (tree_edges.contains(e.id)) tree.add(e);
  const PhiEdge* c = phi.find_edge(chord);
  if (c == nullptr) throw Error(ErrorCode::InvalidGraph, "unknown edge " + chord);
  Cycle cycle{OrientedEdge{chord, true}};
  if (c->end_a.vertex != c->end_b.vertex) {
    Cycle back = tree.path(c->end_b.vertex, c->end_a.vertex);
    cycle.insert(cycle.end(), back.begin(), back.end());
  }
  return cycle;
}

/// Spanning forest chosen greedily in `edge_order` (default: sorted ids).
inline std::set<std::string> spanning_forest(const PhiGraph& phi, std::vector<std::string> edge_order = {}) {
  if (edge_order.empty()) {
    for (const auto& e : phi.edges) edge_order.push_back(e.id);
    std::sort(edge_order.begin(), edge_order.end());
  }
  std::map<std::string, std::size_t> index;
  for (const auto& v : phi.vertices) index.emplace(v.id, index.size());
  detail::UnionFind uf(index.size());
  std::set<std::string> tree;
  for (const auto& id : edge_order) {
    const PhiEdge* e = phi.find_edge(id);
    if (e == nullptr) throw Error(ErrorCode::InvalidGraph, "unknown edge " + id);
    if (uf.unite(index.at(e->end_a.vertex), index.at(e->end_b.vertex))) tree.insert(id);
  }
  return tree;
}

/// One fundamental cycle per chord of the spanning forest, in chord id order;
/// each cycle is rotated to begin at its smallest edge id.
inline std::vector<Cycle> cycle_basis(const PhiGraph& phi, std::vector<std::string> edge_order = {}) {
  std::set<std::string> tree = spanning_forest(phi, std::move(edge_order));
  std::vector<std::string> chords;
  for (const auto& e : phi.edges)
    if (!tree.contains(e.id)) chords.push_back(e.id);
  std::sort(chords.begin(), chords.end());
  std::vector<Cycle> basis;
  for (const auto& chord : chords) {
    Cycle c = fundamental_cycle(phi, tree, chord);
    auto first = std::min_element(c.begin(), c.end(),
                                  [](const OrientedEdge& a, const OrientedEdge& b) { return a.edge < b.edge; });
    std::rotate(c.begin(), first, c.end());
    basis.push_back(std::move(c));
  }
  return basis;
}

struct AspiralityVerdict {
  bool aspiral = true;
  std::optional<Cycle> witness;
  std::optional<SpiralityValue> value;
};

inline AspiralityVerdict is_aspiral(const PhiGraph& phi, std::vector<std::string> edge_order = {}) {
  for (const Cycle& c : cycle_basis(phi, std::move(edge_order))) {
    SpiralityValue v = spirality_on_cycle(phi, c);
    if (!v.is_one()) return {false, c, v};
  }
  return {};
}

/// True iff the intersection-number ratio and the covering-degree ratio agree
/// for every ordered pair of circles of a Seifert vertex carrying both.
inline bool check_mixed_definition(const PhiVertex& v) {
  if (!is_seifert(v.kind)) throw Error(ErrorCode::MissingData, "vertex " + v.id + " is not a Seifert vertex");
  for (const auto& c : v.circles)
    if (!c.seifert_intersection || !c.cusp_degree)
      throw Error(ErrorCode::MissingData, "vertex " + v.id + ", circle " + c.id + ": both data are required");
  for (const auto& a : v.circles) {
    for (const auto& b : v.circles) {
      SpiralityValue by_fiber(*a.seifert_intersection, *b.seifert_intersection);
      SpiralityValue by_degree(*a.cusp_degree, *b.cusp_degree);
      if (by_fiber != by_degree) return false;
    }
  }
  return true;
}

/// Structural checks of a phi graph against its JSJ graph.
inline std::vector<std::string> validate_phi(const JsjGraph& jsj, const PhiGraph& phi) {
  std::vector<std::string> out;
  std::set<std::string> vids;
  for (const auto& v : phi.vertices) {
    const std::string at = "phi vertex " + v.id + ": ";
    if (!vids.insert(v.id).second) out.push_back("duplicate phi vertex id " + v.id);
    const Piece* p = jsj.find_piece(v.piece);
    if (p == nullptr) {
      out.push_back(at + "unknown piece " + v.piece);
      continue;
    }
    const bool kind_ok = is_seifert(v.kind) ? p->kind == PieceKind::SeifertFibered
                                            : p->kind == PieceKind::HyperbolicFiniteVolume;
    if (!kind_ok) out.push_back(at + "kind does not match piece kind");

    std::set<std::string> slot_ids;
    std::set<std::string> tori;
    for (const auto& c : v.circles) {
      if (!slot_ids.insert(c.id).second) out.push_back(at + "duplicate boundary id " + c.id);
      const BoundaryComponent* b = p->find_boundary(c.torus);
      if (b == nullptr || b->genus != 1) {
        out.push_back(at + "circle " + c.id + " attached to unknown torus " + c.torus);
        continue;
      }
      if (!tori.insert(c.torus).second) out.push_back(at + "two circles on torus " + c.torus);
      if (is_seifert(v.kind)) {
        if (!c.seifert_intersection || *c.seifert_intersection <= 0)
          out.push_back(at + "circle " + c.id + " needs a positive seifert_intersection");
        if (c.cusp_degree && (v.kind != PhiVertexKind::SeifertVirtuallyFibered || *c.cusp_degree <= 0))
          out.push_back(at + "circle " + c.id + ": cusp_degree not allowed here");
      } else {
        if (!c.cusp_degree || *c.cusp_degree <= 0) out.push_back(at + "circle " + c.id + " needs a positive cusp_degree");
        if (c.seifert_intersection) out.push_back(at + "circle " + c.id + ": seifert_intersection on a hyperbolic vertex");
      }
      if (c.core) {
        if (c.core->x == 0 && c.core->y == 0) {
          out.push_back(at + "circle " + c.id + " has a zero core");
        } else if (is_seifert(v.kind) && c.seifert_intersection && p->fiber_slopes.contains(c.torus)) {
          const Slope& h = p->fiber_slopes.at(c.torus);
          if (detail::iabs(det(*c.core, h.vector())) != *c.seifert_intersection)
            out.push_back(at + "circle " + c.id + ": core does not meet the fiber seifert_intersection times");
        }
      }
    }
    for (const auto& pl : v.planes) {
      if (!slot_ids.insert(pl.id).second) out.push_back(at + "duplicate boundary id " + pl.id);
      const BoundaryComponent* b = p->find_boundary(pl.torus);
      if (b == nullptr || b->genus != 1) out.push_back(at + "plane " + pl.id + " attached to unknown torus " + pl.torus);
    }
    if (v.kind != PhiVertexKind::SeifertPartiallyFibered) {
      if (!v.planes.empty()) out.push_back(at + "only partially fibered vertices have planes");
      for (const auto& b : p->boundary)
        if (b.genus == 1 && !tori.contains(b.id)) out.push_back(at + "no circle on torus " + b.id);
    }
  }

  std::set<std::string> eids;
  std::set<CircleRef> used;
  for (const auto& e : phi.edges) {
    const std::string at = "phi edge " + e.id + ": ";
    if (!eids.insert(e.id).second) out.push_back("duplicate phi edge id " + e.id);
    const Edge* je = jsj.find_edge(e.jsj_edge);
    if (je == nullptr) out.push_back(at + "unknown jsj edge " + e.jsj_edge);
    const BoundaryCircle* circles[2] = {nullptr, nullptr};
    int i = 0;
    for (const CircleRef* end : {&e.end_a, &e.end_b}) {
      const EdgeEnd* jend = je ? (i == 0 ? &je->end_a : &je->end_b) : nullptr;
      const PhiVertex* v = phi.find_vertex(end->vertex);
      if (v == nullptr) {
        out.push_back(at + "unknown vertex " + end->vertex);
      } else if ((circles[i] = v->find_circle(end->circle)) == nullptr) {
        out.push_back(at + "unknown circle " + end->vertex + "/" + end->circle);
      } else {
        if (jend && (v->piece != jend->piece || circles[i]->torus != jend->boundary))
          out.push_back(at + "endpoint " + end->vertex + "/" + end->circle + " does not lie over the jsj edge end");
        if (!used.insert(*end).second) out.push_back(at + "circle " + end->vertex + "/" + end->circle + " glued twice");
      }
      ++i;
    }
    if (je && circles[0] && circles[1] && circles[0]->core && circles[1]->core) {
      IVec moved = je->gluing.apply(*circles[0]->core);
      IVec other = *circles[1]->core;
      if (!(moved == other) && !(moved == IVec{-other.x, -other.y}))
        out.push_back(at + "cores do not match across the gluing");
    }
  }
  return out;
}

/// Graph covering of a phi graph. Every lifted circle records its base circle
/// and the degree of the circle cover.
struct PhiCover {
  struct Vertex {
    std::string id;
    std::string base;
  };
  struct Circle {
    std::string vertex;
    std::string id;
    std::string base_circle;
    std::int64_t degree = 1;
  };
  struct Edge {
    std::string id;
    std::string base;
    CircleRef end_a;
    CircleRef end_b;
  };
  std::vector<Vertex> vertices;
  std::vector<Circle> circles;
  std::vector<Edge> edges;
};

/// Builds the lifted phi graph, scaling circle data by circle degrees.
inline PhiGraph lift_phi(const PhiGraph& phi, const PhiCover& cover) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::NotACovering, m); };
  std::map<std::string, const PhiVertex*> base_of;
  for (const auto& cv : cover.vertices) {
    const PhiVertex* b = phi.find_vertex(cv.base);
    if (b == nullptr) fail("lifted vertex " + cv.id + " over unknown vertex " + cv.base);
    if (!base_of.emplace(cv.id, b).second) fail("duplicate lifted vertex " + cv.id);
  }
  std::map<CircleRef, const PhiCover::Circle*> circle_of;
  // lifted vertex -> base circle -> total degree
  std::map<std::string, std::map<std::string, std::int64_t>> degree_sum;
  for (const auto& c : cover.circles) {
    auto it = base_of.find(c.vertex);
    if (it == base_of.end()) fail("circle " + c.id + " on unknown lifted vertex " + c.vertex);
    if (it->second->find_circle(c.base_circle) == nullptr)
      fail("circle " + c.vertex + "/" + c.id + " over a circle of another vertex");
    if (c.degree < 1) fail("circle " + c.vertex + "/" + c.id + " has non-positive degree");
    if (!circle_of.emplace(CircleRef{c.vertex, c.id}, &c).second) fail("duplicate lifted circle " + c.vertex + "/" + c.id);
    degree_sum[c.vertex][c.base_circle] += c.degree;
  }

  std::map<std::string, std::int64_t> sheets;  // base vertex -> total degree
  for (const auto& cv : cover.vertices) {
    const PhiVertex* b = base_of.at(cv.id);
    std::optional<std::int64_t> d;
    for (const auto& bc : b->circles) {
      std::int64_t s = degree_sum[cv.id][bc.id];
      if (s == 0) fail("lifted vertex " + cv.id + " misses circle " + bc.id);
      if (d && *d != s) fail("lifted vertex " + cv.id + " covers its circles with unequal degrees");
      d = s;
    }
    sheets[b->id] += d.value_or(1);
  }
  std::optional<std::int64_t> total;
  for (const auto& v : phi.vertices) {
    std::int64_t s = sheets[v.id];
    if (s == 0 || (total && *total != s)) fail("fiber over vertex " + v.id + " has the wrong size");
    total = s;
  }

  std::set<CircleRef> glued;
  std::set<std::string> lifted_edge_ids;
  for (const auto& le : cover.edges) {
    const PhiEdge* be = phi.find_edge(le.base);
    if (be == nullptr) fail("lifted edge " + le.id + " over unknown edge " + le.base);
    if (!lifted_edge_ids.insert(le.id).second) fail("duplicate lifted edge " + le.id);
    std::int64_t deg[2];
    int i = 0;
    for (auto [lend, bend] : {std::pair{&le.end_a, &be->end_a}, std::pair{&le.end_b, &be->end_b}}) {
      auto it = circle_of.find(*lend);
      if (it == circle_of.end()) fail("lifted edge " + le.id + " ends on unknown circle");
      if (base_of.at(lend->vertex)->id != bend->vertex || it->second->base_circle != bend->circle)
        fail("lifted edge " + le.id + " does not lie over " + be->id);
      if (!glued.insert(*lend).second) fail("lifted circle " + lend->vertex + "/" + lend->circle + " glued twice");
      deg[i++] = it->second->degree;
    }
    if (deg[0] != deg[1]) fail("lifted edge " + le.id + " glues circles of different degrees");
  }
  for (const auto& be : phi.edges) {
    for (const CircleRef* bend : {&be.end_a, &be.end_b}) {
      for (const auto& c : cover.circles) {
        if (c.base_circle == bend->circle && base_of.at(c.vertex)->id == bend->vertex &&
            !glued.contains(CircleRef{c.vertex, c.id}))
          fail("lifted circle " + c.vertex + "/" + c.id + " over a glued circle is not glued");
      }
    }
  }

  PhiGraph out;
  for (const auto& cv : cover.vertices) {
    const PhiVertex* b = base_of.at(cv.id);
    PhiVertex v{cv.id, b->piece, b->kind, {}, b->planes};
    for (const auto& c : cover.circles) {
      if (c.vertex != cv.id) continue;
      const BoundaryCircle* bc = b->find_circle(c.base_circle);
      BoundaryCircle lc{c.id, bc->torus, std::nullopt, std::nullopt, std::nullopt};
      if (bc->seifert_intersection) lc.seifert_intersection = *bc->seifert_intersection * c.degree;
      if (bc->cusp_degree) lc.cusp_degree = *bc->cusp_degree * c.degree;
      if (bc->core) lc.core = IVec{bc->core->x * c.degree, bc->core->y * c.degree};
      v.circles.push_back(std::move(lc));
    }
    out.vertices.push_back(std::move(v));
  }
  for (const auto& le : cover.edges)
    out.edges.push_back(PhiEdge{le.id, le.end_a, le.end_b, phi.find_edge(le.base)->jsj_edge});
  return out;
}

struct SeparabilityVerdict {
  bool separable = true;
  std::optional<Cycle> witness;
  std::optional<SpiralityValue> value;
};

/// Separable exactly when the subgroup is aspiral, for infinite-index
/// subgroups of a non-geometric, non-Sol manifold.
inline SeparabilityVerdict separability_verdict(const JsjGraph& jsj, const PhiGraph& phi, bool infinite_index = true) {
  require_valid(jsj);
  if (jsj.trivial_decomposition)
    throw Error(ErrorCode::HypothesesViolated, "the manifold has a trivial torus decomposition");
  if (jsj.is_sol) throw Error(ErrorCode::HypothesesViolated, "the manifold is a Sol manifold");
  if (!infinite_index) throw Error(ErrorCode::HypothesesViolated, "the subgroup has finite index");
  auto violations = validate_phi(jsj, phi);
  if (!violations.empty()) throw Error(ErrorCode::InvalidGraph, violations.front());
  AspiralityVerdict a = is_aspiral(phi);
  return {a.aspiral, a.witness, a.value};
}

}  // namespace spirality
