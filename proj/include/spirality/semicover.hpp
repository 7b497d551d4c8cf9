#pragma once

// Combinatorial assembly of a finite semi-cover over the graph G_K: pick
// slopes on every decomposition torus met by K, fix the global constant, grow
// covers along a spanning tree with the exponent schedule, then reconcile the
// chords. The result is a certificate listing one lattice per edge side,
// which verify_certificate re-checks from scratch.

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "spirality/error.hpp"
#include "spirality/jsj_graph.hpp"
#include "spirality/lattice.hpp"
#include "spirality/phi_surface.hpp"
#include "spirality/rational.hpp"

namespace spirality {

/// Vertices of G_K that do not contribute to the phi graph.
enum class CoverVertexKind { HypGeometricallyFinite, SeifertCircleBundle, SeifertPartiallyFibered, FiniteCover };

constexpr std::string_view to_string(CoverVertexKind k) {
  switch (k) {
    case CoverVertexKind::HypGeometricallyFinite: return "HypGeometricallyFinite";
    case CoverVertexKind::SeifertCircleBundle: return "SeifertCircleBundle";
    case CoverVertexKind::SeifertPartiallyFibered: return "SeifertPartiallyFibered";
    case CoverVertexKind::FiniteCover: return "FiniteCover";
  }
  return "Unknown";
}

inline std::optional<CoverVertexKind> cover_vertex_kind_from_string(std::string_view s) {
  for (CoverVertexKind k : {CoverVertexKind::HypGeometricallyFinite, CoverVertexKind::SeifertCircleBundle,
                            CoverVertexKind::SeifertPartiallyFibered, CoverVertexKind::FiniteCover})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

enum class EndType { Torus, Cylinder, Plane };

constexpr std::string_view to_string(EndType t) {
  switch (t) {
    case EndType::Torus: return "torus";
    case EndType::Cylinder: return "cylinder";
    case EndType::Plane: return "plane";
  }
  return "unknown";
}

inline std::optional<EndType> end_type_from_string(std::string_view s) {
  for (EndType t : {EndType::Torus, EndType::Cylinder, EndType::Plane})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

struct CoverEnd {
  std::string id;
  std::string torus;
  EndType type = EndType::Torus;
  /// Cylinders: image of the core in the torus basis.
  std::optional<IVec> core;
  /// Tori: the subgroup the boundary torus covers, as generator columns of a
  /// row-major 2x2 matrix.
  std::optional<std::array<std::int64_t, 4>> lattice;

  friend bool operator==(const CoverEnd&, const CoverEnd&) = default;
};

struct CoverVertex {
  std::string id;
  std::string piece;
  CoverVertexKind kind = CoverVertexKind::HypGeometricallyFinite;
  std::vector<CoverEnd> ends;

  const CoverEnd* find_end(std::string_view eid) const {
    for (const auto& e : ends)
      if (e.id == eid) return &e;
    return nullptr;
  }

  friend bool operator==(const CoverVertex&, const CoverVertex&) = default;
};

/// A boundary slot of a G_K vertex: a circle or plane of a phi vertex, or an
/// end of a cover vertex.
struct SlotRef {
  std::string vertex;
  std::string slot;

  friend bool operator==(const SlotRef&, const SlotRef&) = default;
  friend auto operator<=>(const SlotRef&, const SlotRef&) = default;
};

struct CoverEdge {
  std::string id;
  EndType type = EndType::Torus;
  SlotRef end_a;
  SlotRef end_b;
  std::string jsj_edge;

  friend bool operator==(const CoverEdge&, const CoverEdge&) = default;
};

struct CoverSection {
  std::vector<CoverVertex> vertices;
  std::vector<CoverEdge> edges;

  friend bool operator==(const CoverSection&, const CoverSection&) = default;
};

/// Opaque per-piece covering constants; anything absent defaults to 1.
struct ConstantInput {
  std::map<std::string, std::int64_t> vertex;
  std::map<std::string, std::map<std::string, std::int64_t>> cusp;
  std::int64_t extra_factor = 1;
  bool has_extra_factor = false;

  friend bool operator==(const ConstantInput&, const ConstantInput&) = default;
};

struct Instance {
  JsjGraph jsj;
  PhiGraph phi;
  std::optional<CoverSection> cover;
  std::optional<ConstantInput> constants;
  bool infinite_index = true;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Unified vertex kind on G_K.
enum class GkKind {
  HypVirtuallyFibered,
  SeifertVirtuallyFibered,
  SeifertPartiallyFibered,
  HypGeometricallyFinite,
  SeifertCircleBundle,
  FiniteCover,
};

inline bool is_fibered(GkKind k) {
  return k == GkKind::HypVirtuallyFibered || k == GkKind::SeifertVirtuallyFibered ||
         k == GkKind::SeifertPartiallyFibered;
}

inline GkKind gk_kind(PhiVertexKind k) {
  switch (k) {
    case PhiVertexKind::SeifertVirtuallyFibered: return GkKind::SeifertVirtuallyFibered;
    case PhiVertexKind::SeifertPartiallyFibered: return GkKind::SeifertPartiallyFibered;
    case PhiVertexKind::HypVirtuallyFibered: return GkKind::HypVirtuallyFibered;
  }
  return GkKind::FiniteCover;
}

inline GkKind gk_kind(CoverVertexKind k) {
  switch (k) {
    case CoverVertexKind::HypGeometricallyFinite: return GkKind::HypGeometricallyFinite;
    case CoverVertexKind::SeifertCircleBundle: return GkKind::SeifertCircleBundle;
    case CoverVertexKind::SeifertPartiallyFibered: return GkKind::SeifertPartiallyFibered;
    case CoverVertexKind::FiniteCover: return GkKind::FiniteCover;
  }
  return GkKind::FiniteCover;
}

/// The graph G_K: phi vertices and edges plus the declared cover section.
class GkGraph {
 public:
  struct Vertex {
    std::string id;
    std::string piece;
    GkKind kind;
    bool in_phi;
  };
  struct Slot {
    EndType type;
    std::string torus;
    std::optional<IVec> core;
    std::optional<Lattice> lattice;
  };
  struct Edge {
    std::string id;
    EndType type;
    std::array<SlotRef, 2> ends;
    const spirality::Edge* jsj;
    bool in_phi;
  };

  static GkGraph build(const Instance& inst);

  const std::map<std::string, Vertex>& vertices() const { return vertices_; }
  /// Phi edges in id order, then cover edges in id order.
  const std::vector<Edge>& edges() const { return edges_; }
  const Vertex& vertex(const std::string& id) const { return vertices_.at(id); }
  const Slot& slot(const SlotRef& r) const { return slots_.at(r); }
  const Edge* find_edge(std::string_view id) const {
    for (const auto& e : edges_)
      if (e.id == id) return &e;
    return nullptr;
  }
  const Piece& piece_of(const std::string& vertex_id) const { return *jsj_->find_piece(vertex(vertex_id).piece); }
  /// Edges incident to a slot, at most one after validation.
  const Edge* edge_at(const SlotRef& r) const {
    auto it = edge_at_.find(r);
    return it == edge_at_.end() ? nullptr : &edges_[it->second];
  }

 private:
  const JsjGraph* jsj_ = nullptr;
  std::map<std::string, Vertex> vertices_;
  std::map<SlotRef, Slot> slots_;
  std::vector<Edge> edges_;
  std::map<SlotRef, std::size_t> edge_at_;
};

namespace detail {

inline Lattice lattice_from_columns(const std::array<std::int64_t, 4>& m) {
  return hnf<BigInt>({Vec2<BigInt>{m[0], m[2]}, Vec2<BigInt>{m[1], m[3]}});
}

inline Vec2<BigInt> widen(const IVec& v) { return {BigInt(v.x), BigInt(v.y)}; }

inline bool torus_end_allowed(GkKind k, EndType t) {
  switch (k) {
    case GkKind::HypGeometricallyFinite: return true;
    case GkKind::SeifertCircleBundle: return t != EndType::Plane;
    case GkKind::SeifertPartiallyFibered: return t != EndType::Torus;
    case GkKind::FiniteCover: return t == EndType::Torus;
    default: return t == EndType::Cylinder;
  }
}

}  // namespace detail

/// Structural checks of the cover section and constants against the rest of
/// the instance. Assumes the JSJ and phi graphs are valid.
inline std::vector<std::string> validate_cover(const Instance& inst) {
  std::vector<std::string> out;
  const JsjGraph& jsj = inst.jsj;
  std::map<std::string, GkKind> kinds;
  std::map<std::string, std::string> pieces;
  for (const auto& v : inst.phi.vertices) {
    kinds[v.id] = gk_kind(v.kind);
    pieces[v.id] = v.piece;
  }
  std::set<std::string> edge_ids;
  for (const auto& e : inst.phi.edges) edge_ids.insert(e.id);

  std::map<SlotRef, std::pair<EndType, const void*>> slot_types;
  for (const auto& v : inst.phi.vertices) {
    for (const auto& c : v.circles) slot_types[{v.id, c.id}] = {EndType::Cylinder, &c};
    for (const auto& p : v.planes) slot_types[{v.id, p.id}] = {EndType::Plane, &p};
  }
  std::map<SlotRef, std::string> slot_torus;
  for (const auto& v : inst.phi.vertices) {
    for (const auto& c : v.circles) slot_torus[{v.id, c.id}] = c.torus;
    for (const auto& p : v.planes) slot_torus[{v.id, p.id}] = p.torus;
  }
  std::map<SlotRef, std::optional<IVec>> cores;
  std::map<SlotRef, std::optional<Lattice>> lattices;
  for (const auto& v : inst.phi.vertices)
    for (const auto& c : v.circles) cores[{v.id, c.id}] = c.core;

  if (inst.cover) {
    for (const auto& v : inst.cover->vertices) {
      const std::string at = "cover vertex " + v.id + ": ";
      if (kinds.contains(v.id)) out.push_back("duplicate vertex id " + v.id);
      const GkKind k = gk_kind(v.kind);
      kinds[v.id] = k;
      pieces[v.id] = v.piece;
      const Piece* p = jsj.find_piece(v.piece);
      if (p == nullptr) {
        out.push_back(at + "unknown piece " + v.piece);
        continue;
      }
      bool kind_ok = false;
      switch (v.kind) {
        case CoverVertexKind::HypGeometricallyFinite: kind_ok = p->kind == PieceKind::HyperbolicFiniteVolume; break;
        case CoverVertexKind::SeifertCircleBundle:
        case CoverVertexKind::SeifertPartiallyFibered: kind_ok = p->kind == PieceKind::SeifertFibered; break;
        case CoverVertexKind::FiniteCover: kind_ok = p->kind != PieceKind::HyperbolicHigherGenus; break;
      }
      if (!kind_ok) out.push_back(at + "kind does not match piece kind");
      std::set<std::string> ids;
      for (const auto& e : v.ends) {
        if (!ids.insert(e.id).second) out.push_back(at + "duplicate end id " + e.id);
        const BoundaryComponent* b = p->find_boundary(e.torus);
        if (b == nullptr || b->genus != 1) out.push_back(at + "end " + e.id + " on unknown torus " + e.torus);
        if (!detail::torus_end_allowed(k, e.type))
          out.push_back(at + "end " + e.id + ": " + std::string(to_string(e.type)) + " boundary not possible for this kind");
        SlotRef ref{v.id, e.id};
        slot_types[ref] = {e.type, &e};
        slot_torus[ref] = e.torus;
        if (e.type == EndType::Cylinder) {
          if (!e.core || (e.core->x == 0 && e.core->y == 0)) out.push_back(at + "end " + e.id + " needs a nonzero core");
          cores[ref] = e.core;
        } else if (e.core) {
          out.push_back(at + "end " + e.id + ": only cylinders have a core");
        }
        if (e.type == EndType::Torus) {
          if (!e.lattice) {
            out.push_back(at + "end " + e.id + " needs a lattice");
          } else {
            const auto& m = *e.lattice;
            if (m[0] * m[3] - m[1] * m[2] == 0)
              out.push_back(at + "end " + e.id + ": lattice has rank < 2");
            else
              lattices[ref] = detail::lattice_from_columns(m);
          }
        } else if (e.lattice) {
          out.push_back(at + "end " + e.id + ": only tori carry a lattice");
        }
      }
    }

    std::set<SlotRef> used;
    for (const auto& e : inst.phi.edges) {
      used.insert(SlotRef{e.end_a.vertex, e.end_a.circle});
      used.insert(SlotRef{e.end_b.vertex, e.end_b.circle});
    }
    for (const auto& e : inst.cover->edges) {
      const std::string at = "cover edge " + e.id + ": ";
      if (!edge_ids.insert(e.id).second) out.push_back("duplicate edge id " + e.id);
      const Edge* je = jsj.find_edge(e.jsj_edge);
      if (je == nullptr) out.push_back(at + "unknown jsj edge " + e.jsj_edge);
      bool resolved = true;
      int i = 0;
      for (const SlotRef* end : {&e.end_a, &e.end_b}) {
        const EdgeEnd* jend = je ? (i++ == 0 ? &je->end_a : &je->end_b) : nullptr;
        auto it = slot_types.find(*end);
        if (!kinds.contains(end->vertex)) {
          out.push_back(at + "unknown vertex " + end->vertex);
          resolved = false;
          continue;
        }
        if (it == slot_types.end()) {
          out.push_back(at + "unknown slot " + end->vertex + "/" + end->slot);
          resolved = false;
          continue;
        }
        if (it->second.first != e.type) out.push_back(at + "slot " + end->vertex + "/" + end->slot + " has the wrong type");
        if (jend && (pieces.at(end->vertex) != jend->piece || slot_torus.at(*end) != jend->boundary))
          out.push_back(at + "slot " + end->vertex + "/" + end->slot + " does not lie over the jsj edge end");
        if (!used.insert(*end).second) out.push_back(at + "slot " + end->vertex + "/" + end->slot + " glued twice");
      }
      if (!resolved || je == nullptr) continue;
      const GkKind ka = kinds.at(e.end_a.vertex), kb = kinds.at(e.end_b.vertex);
      if (e.type == EndType::Cylinder && is_fibered(ka) && is_fibered(kb))
        out.push_back(at + "a cylinder between fibered vertices must be a phi edge");
      if (e.type == EndType::Cylinder) {
        const auto& ca = cores[e.end_a];
        const auto& cb = cores[e.end_b];
        if (ca && cb) {
          IVec moved = je->gluing.apply(*ca);
          if (!(moved == *cb) && !(moved == IVec{-cb->x, -cb->y})) out.push_back(at + "cores do not match across the gluing");
        }
      }
      if (e.type == EndType::Torus) {
        const auto& la = lattices[e.end_a];
        const auto& lb = lattices[e.end_b];
        if (la && lb && !(apply_gluing(je->gluing, *la) == *lb))
          out.push_back(at + "torus lattices do not match across the gluing");
      }
    }
  }

  if (inst.constants) {
    const ConstantInput& c = *inst.constants;
    for (const auto& [vid, a] : c.vertex) {
      auto it = kinds.find(vid);
      if (it == kinds.end())
        out.push_back("constants: unknown vertex " + vid);
      else if (it->second == GkKind::HypVirtuallyFibered || it->second == GkKind::FiniteCover)
        out.push_back("constants: vertex " + vid + " takes no vertex constant");
      if (a < 1) out.push_back("constants: vertex " + vid + " constant must be positive");
    }
    for (const auto& [vid, per] : c.cusp) {
      const PhiVertex* v = inst.phi.find_vertex(vid);
      if (v == nullptr || v->kind != PhiVertexKind::HypVirtuallyFibered) {
        out.push_back("constants: cusp constants need a hyperbolic virtually fibered vertex, got " + vid);
        continue;
      }
      for (const auto& [cid, a] : per) {
        if (v->find_circle(cid) == nullptr) out.push_back("constants: unknown circle " + vid + "/" + cid);
        if (a < 1) out.push_back("constants: cusp constant " + vid + "/" + cid + " must be positive");
      }
    }
    if (c.extra_factor < 1) out.push_back("constants: extra_factor must be positive");
  }
  return out;
}

inline GkGraph GkGraph::build(const Instance& inst) {
  auto violations = validate_cover(inst);
  if (!violations.empty()) throw Error(ErrorCode::InvalidGraph, violations.front());
  GkGraph g;
  g.jsj_ = &inst.jsj;
  for (const auto& v : inst.phi.vertices) {
    g.vertices_[v.id] = Vertex{v.id, v.piece, gk_kind(v.kind), true};
    for (const auto& c : v.circles) g.slots_[{v.id, c.id}] = Slot{EndType::Cylinder, c.torus, c.core, std::nullopt};
    for (const auto& p : v.planes) g.slots_[{v.id, p.id}] = Slot{EndType::Plane, p.torus, std::nullopt, std::nullopt};
  }
  std::vector<const PhiEdge*> phi_edges;
  for (const auto& e : inst.phi.edges) phi_edges.push_back(&e);
  std::sort(phi_edges.begin(), phi_edges.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const PhiEdge* e : phi_edges)
    g.edges_.push_back(Edge{e->id,
                            EndType::Cylinder,
                            {SlotRef{e->end_a.vertex, e->end_a.circle}, SlotRef{e->end_b.vertex, e->end_b.circle}},
                            inst.jsj.find_edge(e->jsj_edge),
                            true});
  if (inst.cover) {
    for (const auto& v : inst.cover->vertices) {
      g.vertices_[v.id] = Vertex{v.id, v.piece, gk_kind(v.kind), false};
      for (const auto& e : v.ends) {
        std::optional<Lattice> l;
        if (e.lattice) l = detail::lattice_from_columns(*e.lattice);
        g.slots_[{v.id, e.id}] = Slot{e.type, e.torus, e.core, l};
      }
    }
    std::vector<const CoverEdge*> cover_edges;
    for (const auto& e : inst.cover->edges) cover_edges.push_back(&e);
    std::sort(cover_edges.begin(), cover_edges.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const CoverEdge* e : cover_edges)
      g.edges_.push_back(Edge{e->id, e->type, {e->end_a, e->end_b}, inst.jsj.find_edge(e->jsj_edge), false});
  }
  for (std::size_t i = 0; i < g.edges_.size(); ++i)
    for (const SlotRef& r : g.edges_[i].ends) g.edge_at_[r] = i;
  return g;
}

/// Slopes seen from one side of an edge, in that side's torus basis.
struct SideSlopes {
  std::optional<Slope> t;
  std::optional<Slope> u;
  std::optional<Slope> v;

  friend bool operator==(const SideSlopes&, const SideSlopes&) = default;
};

struct SlopeChoice {
  std::map<std::string, std::array<SideSlopes, 2>> edges;
};

namespace detail {

inline Slope transport(const Slope& s, const Edge& jsj_edge, int from_side) {
  return from_side == 0 ? jsj_edge.gluing.apply(s) : jsj_edge.gluing.inverse().apply(s);
}

inline Lattice transport(const Lattice& l, const Edge& jsj_edge, int from_side) {
  return from_side == 0 ? apply_gluing(jsj_edge.gluing, l) : apply_gluing(jsj_edge.gluing.inverse(), l);
}

inline Slope fiber_at(const GkGraph& g, const SlotRef& r) {
  const Piece& p = g.piece_of(r.vertex);
  return p.fiber_slopes.at(g.slot(r).torus);
}

inline ScaledSlope<BigInt> core_of(const GkGraph& g, const SlotRef& r) {
  const auto& core = g.slot(r).core;
  if (!core) throw Error(ErrorCode::MissingData, "slot " + r.vertex + "/" + r.slot + " has no core");
  return ScaledSlope<BigInt>::from_vector(core->x, core->y);
}

inline std::array<SideSlopes, 2> cylinder_slopes(const GkGraph& g, const GkGraph::Edge& e) {
  auto own = [&](int s) -> std::optional<Slope> {
    const SlotRef& r = e.ends[s];
    const GkKind k = g.vertex(r.vertex).kind;
    if (k == GkKind::HypVirtuallyFibered) {
      const Piece& p = g.piece_of(r.vertex);
      auto it = p.degeneracy_slopes.find(g.slot(r).torus);
      if (it == p.degeneracy_slopes.end())
        throw Error(ErrorCode::MissingDegeneracySlope,
                    "piece " + p.id + " has no degeneracy slope on " + g.slot(r).torus + " (edge " + e.id + ")");
      return it->second;
    }
    if (k == GkKind::SeifertVirtuallyFibered || k == GkKind::SeifertPartiallyFibered) return fiber_at(g, r);
    return std::nullopt;
  };
  std::optional<Slope> oa = own(0), ob = own(1);
  std::optional<Slope> ta, tb;
  if (oa) ta = oa;
  if (ob) tb = ob;
  if (!oa && !ob) {
    if (g.vertex(e.ends[0].vertex).kind == GkKind::SeifertCircleBundle &&
        g.vertex(e.ends[1].vertex).kind == GkKind::SeifertCircleBundle)
      throw Error(ErrorCode::IncompatiblePair, "edge " + e.id + " joins two circle-bundle vertices along a cylinder");
    ta = smallest_complement(core_of(g, e.ends[0]).s);
    tb = transport(*ta, *e.jsj, 0);
  } else if (!oa) {
    ta = transport(*tb, *e.jsj, 1);
  } else if (!ob) {
    tb = transport(*ta, *e.jsj, 0);
  }
  for (int s = 0; s < 2; ++s) {
    const Slope& t = s == 0 ? *ta : *tb;
    if (core_of(g, e.ends[s]).s.parallel_to(t))
      throw Error(ErrorCode::ParallelSlopes, "edge " + e.id + ": chosen slope is parallel to the core");
  }
  return {SideSlopes{ta, std::nullopt, std::nullopt}, SideSlopes{tb, std::nullopt, std::nullopt}};
}

inline std::array<SideSlopes, 2> plane_slopes(const GkGraph& g, const GkGraph::Edge& e) {
  const bool fa = g.vertex(e.ends[0].vertex).kind == GkKind::SeifertPartiallyFibered;
  const bool fb = g.vertex(e.ends[1].vertex).kind == GkKind::SeifertPartiallyFibered;
  Slope ua = Slope::from_vector(1, 0), va = Slope::from_vector(0, 1);
  if (!fa && fb) {
    ua = transport(fiber_at(g, e.ends[1]), *e.jsj, 1);
    va = smallest_complement(ua);
  } else if (fa && !fb) {
    Slope ub = transport(fiber_at(g, e.ends[0]), *e.jsj, 0);
    Slope vb = smallest_complement(ub);
    ua = transport(vb, *e.jsj, 1);
    va = fiber_at(g, e.ends[0]);
  } else if (fa && fb) {
    ua = transport(fiber_at(g, e.ends[1]), *e.jsj, 1);
    va = fiber_at(g, e.ends[0]);
    if (ua.parallel_to(va)) throw Error(ErrorCode::ParallelSlopes, "edge " + e.id + ": fibers match across the gluing");
  }
  SideSlopes a{std::nullopt, ua, va};
  SideSlopes b{std::nullopt, transport(va, *e.jsj, 0), transport(ua, *e.jsj, 0)};
  return {a, b};
}

}  // namespace detail

inline SlopeChoice choose_slopes(const GkGraph& g) {
  SlopeChoice out;
  for (const auto& e : g.edges()) {
    if (e.type == EndType::Cylinder)
      out.edges[e.id] = detail::cylinder_slopes(g, e);
    else if (e.type == EndType::Plane)
      out.edges[e.id] = detail::plane_slopes(g, e);
    else
      out.edges[e.id] = {};
  }
  return out;
}

inline SlopeChoice choose_slopes(const Instance& inst) { return choose_slopes(GkGraph::build(inst)); }

/// Covering constants and the global constant built from them.
struct ConstantSheet {
  std::map<std::string, BigInt> vertex;
  std::map<std::string, std::map<std::string, BigInt>> cusp;
  /// Per cylinder edge between fibered vertices: the pair for the end_a
  /// slope and the end_b slope.
  std::map<std::string, std::pair<BigInt, BigInt>> compat;
  BigInt extra_factor = 1;
  BigInt frak_a = 1;

  friend bool operator==(const ConstantSheet&, const ConstantSheet&) = default;
};

/// Product of every constant in the sheet.
inline BigInt global_constant(const ConstantSheet& s) {
  BigInt a = s.extra_factor;
  for (const auto& [_, c] : s.vertex) a *= c;
  for (const auto& [_, per] : s.cusp)
    for (const auto& [__, c] : per) a *= c;
  for (const auto& [_, bb] : s.compat) a *= bb.first * bb.second;
  return a;
}

inline ConstantSheet constant_sheet(const Instance& inst, const GkGraph& g, const SlopeChoice& slopes) {
  ConstantSheet sheet;
  const ConstantInput defaults;
  const ConstantInput& in = inst.constants ? *inst.constants : defaults;
  sheet.extra_factor = in.extra_factor;
  for (const auto& [id, v] : g.vertices()) {
    if (v.kind == GkKind::FiniteCover || v.kind == GkKind::HypVirtuallyFibered) continue;
    auto it = in.vertex.find(id);
    sheet.vertex[id] = it == in.vertex.end() ? BigInt(1) : BigInt(it->second);
  }
  // Cusp constants make boundary indices proportional to the cusp degrees.
  for (const auto& [id, v] : g.vertices()) {
    if (v.kind != GkKind::HypVirtuallyFibered) continue;
    const PhiVertex& pv = *inst.phi.find_vertex(id);
    struct Row {
      std::string circle;
      BigInt degree;
      BigInt det;
    };
    std::vector<Row> rows;
    for (const auto& c : pv.circles) {
      SlotRef r{id, c.id};
      const GkGraph::Edge* e = g.edge_at(r);
      if (e == nullptr) continue;
      const int side = e->ends[0] == r ? 0 : 1;
      const Slope& t = *slopes.edges.at(e->id)[side].t;
      ScaledSlope<BigInt> core = detail::core_of(g, r);
      rows.push_back({c.id, BigInt(*c.cusp_degree), detail::iabs(det(core.vector(), t.vector<BigInt>()))});
    }
    auto supplied = in.cusp.find(id);
    auto& out = sheet.cusp[id];
    if (supplied != in.cusp.end()) {
      for (const auto& row : rows) {
        auto it = supplied->second.find(row.circle);
        if (it == supplied->second.end())
          throw Error(ErrorCode::InconsistentConstants, "vertex " + id + ": no cusp constant for circle " + row.circle);
        out[row.circle] = it->second;
      }
      for (std::size_t i = 1; i < rows.size(); ++i) {
        if (out[rows[i].circle] * rows[i].det * rows[0].degree != out[rows[0].circle] * rows[0].det * rows[i].degree)
          throw Error(ErrorCode::InconsistentConstants,
                      "vertex " + id + ": cusp constants are not proportional to the cusp degrees");
      }
    } else {
      BigInt m = 1;
      for (const auto& row : rows) {
        BigInt need = row.det / detail::gcd(row.det, row.degree);
        m = m / detail::gcd(m, need) * need;
      }
      for (const auto& row : rows) out[row.circle] = m * row.degree / row.det;
    }
    if (out.empty()) sheet.cusp.erase(id);
  }
  for (const auto& e : g.edges()) {
    if (e.type != EndType::Cylinder) continue;
    if (!is_fibered(g.vertex(e.ends[0].vertex).kind) || !is_fibered(g.vertex(e.ends[1].vertex).kind)) continue;
    const auto& s = slopes.edges.at(e.id);
    Slope tb_in_a = detail::transport(*s[1].t, *e.jsj, 1);
    sheet.compat[e.id] = compat_constants(detail::core_of(g, e.ends[0]), *s[0].t, tb_in_a);
  }
  sheet.frak_a = global_constant(sheet);
  return sheet;
}

struct Chord {
  std::string edge;
  /// Which edge condition the chord meets: 1, 2 or 3.
  int condition = 1;
  /// Condition 3 only: simple cycle of the phi graph starting with the chord.
  std::optional<Cycle> cycle;

  friend bool operator==(const Chord&, const Chord&) = default;
};

struct SpanningTree {
  /// Per component, the vertices in the order the tree is grown.
  std::vector<std::vector<std::string>> order;
  std::vector<std::string> edges;
  std::vector<Chord> chords;

  friend bool operator==(const SpanningTree&, const SpanningTree&) = default;
};

namespace detail {

inline int chord_condition(const GkGraph& g, const GkGraph::Edge& e) {
  const bool fa = is_fibered(g.vertex(e.ends[0].vertex).kind);
  const bool fb = is_fibered(g.vertex(e.ends[1].vertex).kind);
  if (!fa || !fb) return 1;
  if (e.type == EndType::Plane) return 2;
  return 3;
}

}  // namespace detail

/// Maximal spanning forest of the phi graph extended to G_K, with every chord
/// labelled by the edge condition it satisfies.
inline SpanningTree spanning_tree_with_edge_conditions(const Instance& inst, const GkGraph& g) {
  std::map<std::string, std::size_t> index;
  for (const auto& [id, _] : g.vertices()) index.emplace(id, index.size());
  detail::UnionFind uf(index.size());
  std::set<std::string> tree_edges;
  std::set<std::string> phi_tree;
  for (const auto& e : g.edges()) {
    if (uf.unite(index.at(e.ends[0].vertex), index.at(e.ends[1].vertex))) {
      tree_edges.insert(e.id);
      if (e.in_phi) phi_tree.insert(e.id);
    }
  }
  SpanningTree out;
  out.edges.assign(tree_edges.begin(), tree_edges.end());

  std::map<std::string, std::vector<std::pair<std::string, std::string>>> adj;  // vertex -> (edge id, neighbor)
  for (const auto& e : g.edges()) {
    if (!tree_edges.contains(e.id)) continue;
    adj[e.ends[0].vertex].push_back({e.id, e.ends[1].vertex});
    adj[e.ends[1].vertex].push_back({e.id, e.ends[0].vertex});
  }
  for (auto& [_, list] : adj) std::sort(list.begin(), list.end());
  std::set<std::string> seen;
  for (const auto& [root, _] : g.vertices()) {
    if (seen.contains(root)) continue;
    std::vector<std::string> order;
    std::deque<std::string> queue{root};
    seen.insert(root);
    while (!queue.empty()) {
      std::string x = queue.front();
      queue.pop_front();
      order.push_back(x);
      for (const auto& [eid, y] : adj[x])
        if (seen.insert(y).second) queue.push_back(y);
    }
    out.order.push_back(std::move(order));
  }

  for (const auto& e : g.edges()) {
    if (tree_edges.contains(e.id)) continue;
    Chord c{e.id, detail::chord_condition(g, e), std::nullopt};
    if (c.condition == 3) {
      if (!e.in_phi)
        throw Error(ErrorCode::EdgeConditionUnsatisfiable, "chord " + e.id + " is not contained in a cycle of the phi graph");
      c.cycle = fundamental_cycle(inst.phi, phi_tree, e.id);
    }
    out.chords.push_back(std::move(c));
  }
  std::sort(out.chords.begin(), out.chords.end(), [](const Chord& a, const Chord& b) { return a.edge < b.edge; });
  return out;
}

/// Free parameters of one vertex cover. Phi vertices and partially fibered
/// vertices share one alpha across their boundary; the other maps are keyed by
/// slot id.
struct VertexParameters {
  std::optional<BigInt> alpha;
  std::map<std::string, BigInt> cylinder;
  std::map<std::string, BigInt> plane_u;
  std::map<std::string, BigInt> plane_v;

  friend bool operator==(const VertexParameters&, const VertexParameters&) = default;
};

struct SideAssignment {
  SlotRef slot;
  SideSlopes slopes;
  Lattice lattice = Lattice::full();

  friend bool operator==(const SideAssignment&, const SideAssignment&) = default;
};

struct EdgeAssignment {
  std::string id;
  EndType type = EndType::Torus;
  std::array<SideAssignment, 2> sides;

  friend bool operator==(const EdgeAssignment&, const EdgeAssignment&) = default;
};

struct CoverCertificate {
  ConstantSheet constants;
  SpanningTree tree;
  std::map<std::string, VertexParameters> parameters;
  std::vector<EdgeAssignment> edges;

  friend bool operator==(const CoverCertificate&, const CoverCertificate&) = default;
};

struct SpiralObstruction {
  std::string chord;
  Cycle cycle;
  SpiralityValue value;
};

using AssemblyResult = std::variant<CoverCertificate, SpiralObstruction>;

namespace detail {

inline BigInt exact_div(const BigInt& a, const BigInt& b, const std::string& what) {
  if (b == 0 || a % b != 0) throw Error(ErrorCode::InternalInconsistency, what + " is not divisible");
  return a / b;
}

inline BigInt power(const BigInt& base, std::size_t e) {
  BigInt r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

/// Multipliers of the side's slopes: (k, 0) for cylinders, (m_u, m_v) for
/// planes. Throws MissingData when a parameter is absent.
inline std::pair<BigInt, BigInt> side_multipliers(const GkGraph& g, const ConstantSheet& sheet,
                                                  const std::map<std::string, VertexParameters>& params,
                                                  const SlotRef& r) {
  const GkKind k = g.vertex(r.vertex).kind;
  const EndType type = g.slot(r).type;
  auto missing = [&](const std::string& what) {
    return Error(ErrorCode::MissingData, "vertex " + r.vertex + ": no " + what + " for " + r.slot);
  };
  auto pit = params.find(r.vertex);
  if (pit == params.end()) throw missing("parameters");
  const VertexParameters& p = pit->second;
  auto get = [&](const std::map<std::string, BigInt>& m, const char* what) -> BigInt {
    auto it = m.find(r.slot);
    if (it == m.end()) throw missing(what);
    return it->second;
  };
  auto alpha = [&]() -> BigInt {
    if (!p.alpha) throw missing("alpha");
    return *p.alpha;
  };
  if (type == EndType::Cylinder) {
    switch (k) {
      case GkKind::HypVirtuallyFibered: {
        auto cit = sheet.cusp.find(r.vertex);
        if (cit == sheet.cusp.end() || !cit->second.contains(r.slot)) throw missing("cusp constant");
        return {alpha() * cit->second.at(r.slot), 0};
      }
      case GkKind::SeifertVirtuallyFibered:
      case GkKind::SeifertPartiallyFibered: return {alpha() * sheet.vertex.at(r.vertex), 0};
      default: return {get(p.cylinder, "cylinder parameter") * sheet.vertex.at(r.vertex), 0};
    }
  }
  if (type == EndType::Plane) {
    const BigInt& a = sheet.vertex.at(r.vertex);
    BigInt mu = get(p.plane_u, "plane parameter") * a;
    BigInt mv = k == GkKind::SeifertPartiallyFibered ? alpha() * a : get(p.plane_v, "plane parameter") * a;
    return {mu, mv};
  }
  return {0, 0};
}

inline Lattice side_lattice(const GkGraph& g, const ConstantSheet& sheet,
                            const std::map<std::string, VertexParameters>& params, const SlotRef& r,
                            const SideSlopes& slopes) {
  const GkGraph::Slot& s = g.slot(r);
  if (s.type == EndType::Torus) return *s.lattice;
  auto [m1, m2] = side_multipliers(g, sheet, params, r);
  if (m1 < 1 || (s.type == EndType::Plane && m2 < 1))
    throw Error(ErrorCode::InternalInconsistency, "non-positive parameter at " + r.vertex + "/" + r.slot);
  if (s.type == EndType::Cylinder) return span2(core_of(g, r), scaled(m1, *slopes.t));
  return span2(scaled(m1, *slopes.u), scaled(m2, *slopes.v));
}

inline void require_hypotheses(const Instance& inst) {
  require_valid(inst.jsj);
  if (inst.jsj.trivial_decomposition)
    throw Error(ErrorCode::HypothesesViolated, "the manifold has a trivial torus decomposition");
  if (inst.jsj.is_sol) throw Error(ErrorCode::HypothesesViolated, "the manifold is a Sol manifold");
  if (!inst.infinite_index) throw Error(ErrorCode::HypothesesViolated, "the subgroup has finite index");
  for (const auto& p : inst.jsj.pieces)
    if (p.has_higher_genus_boundary())
      throw Error(ErrorCode::HypothesesViolated, "assembly needs empty or tori boundary; piece " + p.id + " has higher genus");
  auto pv = validate_phi(inst.jsj, inst.phi);
  if (!pv.empty()) throw Error(ErrorCode::InvalidGraph, pv.front());
}

}  // namespace detail

/// Builds a certificate, or reports the first chord whose cycle is spiral.
/// `tree_override` substitutes another admissible tree (used by tests).
inline AssemblyResult assemble(const Instance& inst, const SpanningTree* tree_override = nullptr) {
  detail::require_hypotheses(inst);
  const GkGraph g = GkGraph::build(inst);
  const SlopeChoice slopes = choose_slopes(g);
  const ConstantSheet sheet = constant_sheet(inst, g, slopes);
  const SpanningTree tree = tree_override ? *tree_override : spanning_tree_with_edge_conditions(inst, g);
  const BigInt& A = sheet.frak_a;

  std::set<std::string> tree_edges(tree.edges.begin(), tree.edges.end());
  std::map<std::string, VertexParameters> params;
  for (const auto& [id, _] : g.vertices()) params[id];

  auto const_of = [&](const SlotRef& r) -> BigInt {
    if (g.vertex(r.vertex).kind == GkKind::HypVirtuallyFibered) return sheet.cusp.at(r.vertex).at(r.slot);
    return sheet.vertex.at(r.vertex);
  };

  for (const auto& component : tree.order) {
    const std::size_t n = component.size();
    std::set<std::string> placed;
    for (std::size_t j = 1; j <= n; ++j) {
      const std::string& vid = component[j - 1];
      const GkGraph::Vertex& v = g.vertex(vid);
      VertexParameters& p = params[vid];
      const BigInt P = detail::power(A, n - j + 1);

      // Match the single tree edge into the already built part.
      const GkGraph::Edge* attach = nullptr;
      for (const auto& e : g.edges()) {
        if (!tree_edges.contains(e.id)) continue;
        for (int s = 0; s < 2; ++s)
          if (e.ends[s].vertex == vid && placed.contains(e.ends[1 - s].vertex)) attach = &e;
      }
      std::string attach_slot;
      if (attach != nullptr) {
        const int s = attach->ends[0].vertex == vid && placed.contains(attach->ends[1].vertex) ? 0 : 1;
        const SlotRef& mine = attach->ends[s];
        const SlotRef& theirs = attach->ends[1 - s];
        attach_slot = mine.slot;
        const auto& sl = slopes.edges.at(attach->id);
        auto [w1, w2] = detail::side_multipliers(g, sheet, params, theirs);
        if (attach->type == EndType::Cylinder) {
          Slope tw = detail::transport(*sl[1 - s].t, *attach->jsj, 1 - s);
          const Slope& tv = *sl[s].t;
          BigInt kv = w1;
          if (!(tw == tv)) {
            auto [bw, bv] = compat_constants(detail::core_of(g, mine), tw, tv);
            kv = detail::exact_div(w1, bw, "tree multiplier") * bv;
          }
          if (is_fibered(v.kind))
            p.alpha = detail::exact_div(kv, const_of(mine), "alpha");
          else
            p.cylinder[mine.slot] = detail::exact_div(kv, const_of(mine), "cylinder parameter");
        } else if (attach->type == EndType::Plane) {
          // Slopes swap roles across a plane: u on one side is v on the other.
          const BigInt& a = sheet.vertex.at(vid);
          p.plane_u[mine.slot] = detail::exact_div(w2, a, "plane parameter");
          if (v.kind == GkKind::SeifertPartiallyFibered)
            p.alpha = detail::exact_div(w1, a, "alpha");
          else
            p.plane_v[mine.slot] = detail::exact_div(w1, a, "plane parameter");
        }
      }

      if (is_fibered(v.kind) && !p.alpha) {
        p.alpha = v.kind == GkKind::HypVirtuallyFibered ? P : detail::exact_div(P, sheet.vertex.at(vid), "alpha");
      }
      for (const auto& e : g.edges()) {
        for (int s = 0; s < 2; ++s) {
          const SlotRef& r = e.ends[s];
          if (r.vertex != vid || (attach == &e && r.slot == attach_slot)) continue;
          if (e.type == EndType::Cylinder && !is_fibered(v.kind)) {
            p.cylinder[r.slot] = detail::exact_div(P, sheet.vertex.at(vid), "cylinder parameter");
          } else if (e.type == EndType::Plane) {
            const BigInt& a = sheet.vertex.at(vid);
            const BigInt target = tree_edges.contains(e.id) ? P : A;
            p.plane_u[r.slot] = detail::exact_div(target, a, "plane parameter");
            if (v.kind != GkKind::SeifertPartiallyFibered) p.plane_v[r.slot] = detail::exact_div(target, a, "plane parameter");
          }
        }
      }
      placed.insert(vid);
    }
  }

  for (const Chord& c : tree.chords) {
    const GkGraph::Edge& e = *g.find_edge(c.edge);
    const GkKind ka = g.vertex(e.ends[0].vertex).kind;
    const GkKind kb = g.vertex(e.ends[1].vertex).kind;
    if (e.type == EndType::Plane) {
      const bool fa = ka == GkKind::SeifertPartiallyFibered;
      const bool fb = kb == GkKind::SeifertPartiallyFibered;
      const BigInt av = detail::side_multipliers(g, sheet, params, e.ends[0]).second;
      const BigInt bv = detail::side_multipliers(g, sheet, params, e.ends[1]).second;
      if (fb)
        params[e.ends[0].vertex].plane_u[e.ends[0].slot] = detail::exact_div(bv, sheet.vertex.at(e.ends[0].vertex), "plane parameter");
      if (fa)
        params[e.ends[1].vertex].plane_u[e.ends[1].slot] = detail::exact_div(av, sheet.vertex.at(e.ends[1].vertex), "plane parameter");
    } else if (e.type == EndType::Cylinder && c.condition == 1) {
      const int s = is_fibered(ka) ? 1 : 0;
      auto [k_other, _] = detail::side_multipliers(g, sheet, params, e.ends[1 - s]);
      params[e.ends[s].vertex].cylinder[e.ends[s].slot] =
          detail::exact_div(k_other, sheet.vertex.at(e.ends[s].vertex), "cylinder parameter");
    } else if (e.type == EndType::Cylinder && c.condition == 3) {
      SpiralityValue value = spirality_on_cycle(inst.phi, *c.cycle);
      if (!value.is_one()) return SpiralObstruction{c.edge, *c.cycle, value};
    }
  }

  CoverCertificate cert{sheet, tree, {}, {}};
  for (auto& [id, p] : params)
    if (p.alpha || !p.cylinder.empty() || !p.plane_u.empty() || !p.plane_v.empty()) cert.parameters[id] = p;
  for (const auto& e : g.edges()) {
    EdgeAssignment ea{e.id, e.type, {}};
    const auto& sl = slopes.edges.at(e.id);
    for (int s = 0; s < 2; ++s)
      ea.sides[s] = SideAssignment{e.ends[s], sl[s], detail::side_lattice(g, sheet, cert.parameters, e.ends[s], sl[s])};
    if (!(detail::transport(ea.sides[0].lattice, *e.jsj, 0) == ea.sides[1].lattice))
      throw Error(ErrorCode::InternalInconsistency, "edge " + e.id + ": assembled lattices disagree");
    cert.edges.push_back(std::move(ea));
  }
  return cert;
}

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Re-derives slopes, constants and lattices from the instance and the
/// recorded parameters, and checks every certificate invariant.
inline VerifyReport verify_certificate(const Instance& inst, const CoverCertificate& cert) {
  VerifyReport rep;
  auto bad = [&](const std::string& m) {
    rep.ok = false;
    rep.violations.push_back(m);
  };
  std::optional<GkGraph> built;
  SlopeChoice slopes;
  ConstantSheet sheet;
  try {
    detail::require_hypotheses(inst);
    built.emplace(GkGraph::build(inst));
    slopes = choose_slopes(*built);
    sheet = constant_sheet(inst, *built, slopes);
  } catch (const Error& e) {
    bad(std::string("instance: ") + e.what());
    return rep;
  }
  const GkGraph& g = *built;
  const BigInt& A = sheet.frak_a;

  if (!(cert.constants == sheet)) bad("constants do not match the instance");
  if (global_constant(cert.constants) != cert.constants.frak_a) bad("frak_a is not the product of the constants");

  // Spanning forest.
  std::map<std::string, std::size_t> index;
  for (const auto& [id, _] : g.vertices()) index.emplace(id, index.size());
  detail::UnionFind uf(index.size()), all(index.size());
  for (const auto& e : g.edges()) all.unite(index.at(e.ends[0].vertex), index.at(e.ends[1].vertex));
  std::set<std::string> tree_edges;
  std::size_t components = 0, phi_tree = 0;
  for (const auto& [id, i] : index)
    if (all.find(i) == i) ++components;
  for (const auto& id : cert.tree.edges) {
    const GkGraph::Edge* e = g.find_edge(id);
    if (e == nullptr) {
      bad("tree: unknown edge " + id);
      continue;
    }
    if (!tree_edges.insert(id).second) bad("tree: edge " + id + " listed twice");
    if (!uf.unite(index.at(e->ends[0].vertex), index.at(e->ends[1].vertex))) bad("tree: edge " + id + " closes a cycle");
    if (e->in_phi) ++phi_tree;
  }
  if (tree_edges.size() + components != index.size()) bad("tree: not a spanning forest");
  {
    std::map<std::string, std::size_t> pidx;
    for (const auto& v : inst.phi.vertices) pidx.emplace(v.id, pidx.size());
    detail::UnionFind puf(pidx.size());
    std::size_t rank = 0;
    for (const auto& e : inst.phi.edges)
      if (puf.unite(pidx.at(e.end_a.vertex), pidx.at(e.end_b.vertex))) ++rank;
    if (phi_tree != rank) bad("tree: does not contain a maximal spanning forest of the phi graph");
  }
  std::set<std::string> ordered;
  for (const auto& comp : cert.tree.order) {
    std::set<std::string> placed;
    for (std::size_t j = 0; j < comp.size(); ++j) {
      const std::string& vid = comp[j];
      if (!index.contains(vid)) {
        bad("tree: unknown vertex " + vid);
        continue;
      }
      if (!ordered.insert(vid).second) bad("tree: vertex " + vid + " ordered twice");
      if (j > 0) {
        bool attached = false;
        for (const auto& id : tree_edges) {
          const GkGraph::Edge& e = *g.find_edge(id);
          for (int s = 0; s < 2; ++s)
            if (e.ends[s].vertex == vid && placed.contains(e.ends[1 - s].vertex)) attached = true;
        }
        if (!attached) bad("tree: vertex " + vid + " is not attached to an earlier vertex");
      }
      placed.insert(vid);
    }
  }
  if (ordered.size() != index.size()) bad("tree: order does not list every vertex");
  std::set<std::string> chord_ids;
  for (const Chord& c : cert.tree.chords) {
    const GkGraph::Edge* e = g.find_edge(c.edge);
    if (e == nullptr || tree_edges.contains(c.edge)) {
      bad("tree: " + c.edge + " is not a chord");
      continue;
    }
    chord_ids.insert(c.edge);
    if (c.condition != detail::chord_condition(g, *e)) bad("chord " + c.edge + ": wrong edge condition");
    if (c.condition == 3) {
      if (!c.cycle || c.cycle->empty() || c.cycle->front().edge != c.edge) {
        bad("chord " + c.edge + ": missing certifying cycle");
        continue;
      }
      try {
        SpiralityValue v = spirality_on_cycle(inst.phi, *c.cycle);
        std::set<std::string> seen;
        for (const auto& oe : *c.cycle)
          if (!seen.insert(tail(*inst.phi.find_edge(oe.edge), oe.forward).vertex).second)
            bad("chord " + c.edge + ": certifying cycle is not simple");
        if (!v.is_one()) bad("chord " + c.edge + ": certifying cycle has spirality " + v.to_string());
      } catch (const Error& err) {
        bad("chord " + c.edge + ": " + err.what());
      }
    }
  }
  for (const auto& e : g.edges())
    if (!tree_edges.contains(e.id) && !chord_ids.contains(e.id)) bad("tree: edge " + e.id + " is neither tree edge nor chord");

  // Parameters.
  for (const auto& [vid, p] : cert.parameters) {
    if (!index.contains(vid)) {
      bad("parameters: unknown vertex " + vid);
      continue;
    }
    auto check = [&](const BigInt& x, const std::string& what) {
      if (x < 1) bad("vertex " + vid + ": " + what + " must be positive");
    };
    if (p.alpha) check(*p.alpha, "alpha");
    for (const auto* m : {&p.cylinder, &p.plane_u, &p.plane_v})
      for (const auto& [slot, x] : *m) {
        check(x, "parameter for " + slot);
        const GkGraph::Edge* e = g.edge_at(SlotRef{vid, slot});
        if (e == nullptr) bad("vertex " + vid + ": parameter for unglued slot " + slot);
      }
    const GkKind k = g.vertex(vid).kind;
    if (p.alpha && !is_fibered(k)) bad("vertex " + vid + ": alpha on a vertex without one");
    if (!p.plane_v.empty() && k != GkKind::HypGeometricallyFinite) bad("vertex " + vid + ": unexpected plane v-parameter");
    if (!p.cylinder.empty() && is_fibered(k)) bad("vertex " + vid + ": fibered vertices share alpha across cylinders");
  }

  // Lattices.
  std::map<std::string, const EdgeAssignment*> recorded;
  for (const auto& ea : cert.edges) {
    if (g.find_edge(ea.id) == nullptr) bad("edge " + ea.id + ": not an edge of G_K");
    if (!recorded.emplace(ea.id, &ea).second) bad("edge " + ea.id + ": recorded twice");
  }
  for (const auto& e : g.edges()) {
    auto it = recorded.find(e.id);
    if (it == recorded.end()) {
      bad("edge " + e.id + ": no lattice recorded");
      continue;
    }
    const EdgeAssignment& ea = *it->second;
    if (ea.type != e.type) bad("edge " + e.id + ": wrong type");
    const auto& sl = slopes.edges.at(e.id);
    for (int s = 0; s < 2; ++s) {
      const char* side = s == 0 ? "side a" : "side b";
      const SideAssignment& sa = ea.sides[s];
      if (!(sa.slot == e.ends[s])) bad("edge " + e.id + " " + side + ": wrong slot");
      if (!(sa.slopes == sl[s])) bad("edge " + e.id + " " + side + ": slopes differ from the slope tables");
      try {
        Lattice expect = detail::side_lattice(g, sheet, cert.parameters, e.ends[s], sl[s]);
        if (!(expect == sa.lattice)) bad("edge " + e.id + " " + side + ": lattice does not match the parameters");
        if (e.type != EndType::Torus) {
          auto [m1, m2] = detail::side_multipliers(g, sheet, cert.parameters, e.ends[s]);
          if (m1 % A != 0 || (e.type == EndType::Plane && m2 % A != 0))
            bad("edge " + e.id + " " + side + ": multiplier is not a multiple of frak_a");
        }
        if (e.type == EndType::Cylinder && !is_primitive_in(sa.lattice, detail::core_of(g, e.ends[s])))
          bad("edge " + e.id + " " + side + ": core is not primitive in the lattice");
      } catch (const Error& err) {
        bad("edge " + e.id + " " + side + ": " + err.what());
      }
    }
    if (!(detail::transport(ea.sides[0].lattice, *e.jsj, 0) == ea.sides[1].lattice))
      bad("edge " + e.id + ": lattices do not agree across the gluing");
  }
  return rep;
}

}  // namespace spirality
