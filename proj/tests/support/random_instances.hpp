#pragma once

// Hand-rolled random generators shared by the unit tests and the acceptance
// binary. Everything is driven by an explicit seed.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spirality/jsj_graph.hpp"
#include "spirality/lattice.hpp"
#include "spirality/phi_surface.hpp"
#include "spirality/semicover.hpp"

namespace spirality::gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(gen_); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(v.size()) - 1))];
  }
  template <class T>
  void shuffle(std::vector<T>& v) {
    std::shuffle(v.begin(), v.end(), gen_);
  }
  std::mt19937_64& engine() { return gen_; }

  /// Primitive vector with entries in [-bound, bound].
  IVec primitive(std::int64_t bound) {
    for (;;) {
      IVec v{uniform(-bound, bound), uniform(-bound, bound)};
      if (std::gcd(v.x, v.y) == 1) return v;
    }
  }

  /// Product of a few elementary matrices, possibly orientation reversing.
  Gluing gluing() {
    std::array<std::int64_t, 4> m{1, 0, 0, 1};
    const int steps = static_cast<int>(uniform(0, 3));
    for (int i = 0; i < steps; ++i) {
      const std::int64_t k = uniform(-2, 2);
      if (chance(0.5))
        m = {m[0] + k * m[2], m[1] + k * m[3], m[2], m[3]};
      else
        m = {m[0], m[1], m[2] + k * m[0], m[3] + k * m[1]};
    }
    if (chance(0.3)) m = {m[2], m[3], m[0], m[1]};
    if (chance(0.3)) m = {-m[0], -m[1], m[2], m[3]};
    return Gluing::from_rows(m[0], m[1], m[2], m[3]);
  }

 private:
  std::mt19937_64 gen_;
};

/// Random phi graph with Seifert or cusp data and no JSJ graph behind it.
/// Multi-edges and loops are allowed.
inline PhiGraph random_phi_graph(Rng& rng, int max_vertices, int max_edges, bool connected = false) {
  PhiGraph g;
  const int n = static_cast<int>(rng.uniform(1, max_vertices));
  for (int i = 0; i < n; ++i) {
    PhiVertex v;
    v.id = "v" + std::to_string(i);
    v.piece = "P" + std::to_string(i);
    v.kind = rng.chance(0.3) ? PhiVertexKind::HypVirtuallyFibered : PhiVertexKind::SeifertVirtuallyFibered;
    g.vertices.push_back(std::move(v));
  }
  auto add_circle = [&](int vi) {
    PhiVertex& v = g.vertices[static_cast<std::size_t>(vi)];
    BoundaryCircle c;
    c.id = "c" + std::to_string(v.circles.size());
    c.torus = "T" + std::to_string(v.circles.size());
    const std::int64_t d = rng.uniform(1, 6);
    if (v.kind == PhiVertexKind::HypVirtuallyFibered)
      c.cusp_degree = d;
    else
      c.seifert_intersection = d;
    v.circles.push_back(c);
    return CircleRef{v.id, c.id};
  };
  int m = static_cast<int>(rng.uniform(0, max_edges));
  std::vector<std::pair<int, int>> pairs;
  if (connected) {
    for (int i = 1; i < n; ++i) pairs.push_back({static_cast<int>(rng.uniform(0, i - 1)), i});
    m = std::max(m, n - 1);
  }
  while (static_cast<int>(pairs.size()) < m) pairs.push_back({static_cast<int>(rng.uniform(0, n - 1)), static_cast<int>(rng.uniform(0, n - 1))});
  rng.shuffle(pairs);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [a, b] = pairs[k];
    if (rng.chance(0.5)) std::swap(a, b);
    PhiEdge e;
    e.id = (k < 10 ? "e0" : "e") + std::to_string(k);
    e.end_a = add_circle(a);
    e.end_b = add_circle(b);
    e.jsj_edge = "j" + e.id;
    g.edges.push_back(std::move(e));
  }
  return g;
}

struct CoverDraw {
  PhiCover cover;
  /// Permutation per base edge: sheet i at the tail goes to sheet perm[i].
  std::map<std::string, std::vector<int>> perms;
  int degree = 1;
};

/// Connected permutation-voltage cover of the given degree with unit circle
/// degrees, or nothing if the drawn permutations leave it disconnected.
inline std::optional<CoverDraw> random_cover(Rng& rng, const PhiGraph& phi, int degree) {
  CoverDraw d;
  d.degree = degree;
  auto lifted = [](const std::string& id, int i) { return id + "#" + std::to_string(i); };
  for (const auto& v : phi.vertices)
    for (int i = 0; i < degree; ++i) {
      d.cover.vertices.push_back({lifted(v.id, i), v.id});
      for (const auto& c : v.circles) d.cover.circles.push_back({lifted(v.id, i), lifted(c.id, i), c.id, 1});
    }
  std::map<std::string, int> index;
  for (const auto& v : phi.vertices)
    for (int i = 0; i < degree; ++i) index.emplace(lifted(v.id, i), static_cast<int>(index.size()));
  detail::UnionFind uf(index.size());
  for (const auto& e : phi.edges) {
    std::vector<int> perm(static_cast<std::size_t>(degree));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    for (int i = 0; i < degree; ++i) {
      const int j = perm[static_cast<std::size_t>(i)];
      d.cover.edges.push_back({lifted(e.id, i), e.id, {lifted(e.end_a.vertex, i), lifted(e.end_a.circle, i)},
                               {lifted(e.end_b.vertex, j), lifted(e.end_b.circle, j)}});
      uf.unite(static_cast<std::size_t>(index.at(lifted(e.end_a.vertex, i))),
               static_cast<std::size_t>(index.at(lifted(e.end_b.vertex, j))));
    }
    d.perms[e.id] = perm;
  }
  for (const auto& [_, i] : index)
    if (uf.find(static_cast<std::size_t>(i)) != uf.find(0)) return std::nullopt;
  return d;
}

struct InstanceOptions {
  int min_phi = 1;
  int max_phi = 8;
  int max_phi_edges = 10;
  int max_cover_vertices = 0;
  int max_extra_cover_edges = 0;
  /// Probability that a phi circle datum is knocked off the aspiral pattern.
  double perturb = 0.0;
  bool allow_hyperbolic = true;
  bool allow_partial = true;
  bool random_constants = true;
};

namespace detail_gen {

enum class Role { Phi, Cover };

struct Node {
  std::string id;
  GkKind kind;
  Role role;
  int piece;
};

struct Link {
  int a;
  int b;
  EndType type;
};

inline std::optional<EndType> link_type(Rng& rng, const Node& a, const Node& b) {
  auto hgf = [](const Node& n) { return n.kind == GkKind::HypGeometricallyFinite; };
  auto s1b = [](const Node& n) { return n.kind == GkKind::SeifertCircleBundle; };
  auto fin = [](const Node& n) { return n.kind == GkKind::FiniteCover; };
  auto planar = [](const Node& n) { return n.kind == GkKind::SeifertPartiallyFibered || n.kind == GkKind::HypGeometricallyFinite; };
  auto cyl_ok = [&](const Node& n) { return (n.role == Role::Phi) || hgf(n) || s1b(n); };
  std::vector<EndType> options;
  // Cover-side partially fibered vertices have no cylinders, so two fibered
  // ends here are both phi vertices and the edge becomes a phi edge.
  if (cyl_ok(a) && cyl_ok(b) && !(s1b(a) && s1b(b))) options.push_back(EndType::Cylinder);
  if (planar(a) && planar(b)) options.push_back(EndType::Plane);
  auto torus_ok = [&](const Node& n) { return hgf(n) || s1b(n) || fin(n); };
  if (torus_ok(a) && torus_ok(b)) options.push_back(EndType::Torus);
  if (options.empty()) return std::nullopt;
  return rng.pick(options);
}

}  // namespace detail_gen

/// Random valid instance: every G_K vertex sits on its own piece and every
/// edge side on its own torus. Phi data follow D = lambda_v * w_e, which is
/// aspiral, unless perturbed.
inline Instance random_instance(Rng& rng, const InstanceOptions& o) {
  using namespace detail_gen;
  std::vector<Node> nodes;
  const int np = static_cast<int>(rng.uniform(o.min_phi, o.max_phi));
  for (int i = 0; i < np; ++i) {
    std::vector<GkKind> kinds{GkKind::SeifertVirtuallyFibered};
    if (o.allow_hyperbolic) kinds.push_back(GkKind::HypVirtuallyFibered);
    if (o.allow_partial) kinds.push_back(GkKind::SeifertPartiallyFibered);
    nodes.push_back({"v" + std::to_string(i), rng.pick(kinds), Role::Phi, i});
  }
  const int nc = static_cast<int>(rng.uniform(0, o.max_cover_vertices));
  for (int i = 0; i < nc; ++i) {
    const std::vector<GkKind> kinds{GkKind::HypGeometricallyFinite, GkKind::SeifertCircleBundle,
                                    GkKind::SeifertPartiallyFibered, GkKind::FiniteCover};
    nodes.push_back({"w" + std::to_string(i), rng.pick(kinds), Role::Cover, np + i});
  }

  std::vector<Link> links;
  const int phi_edges = np == 0 ? 0 : static_cast<int>(rng.uniform(0, o.max_phi_edges));
  for (int k = 0; k < phi_edges; ++k)
    links.push_back({static_cast<int>(rng.uniform(0, np - 1)), static_cast<int>(rng.uniform(0, np - 1)), EndType::Cylinder});
  const int extra = static_cast<int>(rng.uniform(0, o.max_extra_cover_edges));
  for (int k = 0; k < extra && nodes.size() > 1; ++k) {
    const int a = static_cast<int>(rng.uniform(0, static_cast<std::int64_t>(nodes.size()) - 1));
    const int b = static_cast<int>(rng.uniform(0, static_cast<std::int64_t>(nodes.size()) - 1));
    auto t = link_type(rng, nodes[a], nodes[b]);
    if (t) links.push_back({a, b, *t});
  }

  // Connect the components, adding a geometrically finite hub if needed.
  for (;;) {
    detail::UnionFind uf(nodes.size());
    for (const auto& l : links) uf.unite(static_cast<std::size_t>(l.a), static_cast<std::size_t>(l.b));
    std::vector<int> roots;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (uf.find(i) == i) roots.push_back(static_cast<int>(i));
    if (roots.size() <= 1) break;
    bool joined = false;
    for (int attempt = 0; attempt < 20 && !joined; ++attempt) {
      const int a = static_cast<int>(rng.uniform(0, static_cast<std::int64_t>(nodes.size()) - 1));
      const int b = static_cast<int>(rng.uniform(0, static_cast<std::int64_t>(nodes.size()) - 1));
      if (uf.find(static_cast<std::size_t>(a)) == uf.find(static_cast<std::size_t>(b))) continue;
      auto t = link_type(rng, nodes[a], nodes[b]);
      if (!t) continue;
      links.push_back({a, b, *t});
      joined = true;
    }
    if (joined) continue;
    const int hub = static_cast<int>(nodes.size());
    nodes.push_back({"h" + std::to_string(hub), GkKind::HypGeometricallyFinite, Role::Cover, hub});
    for (int r : {roots[0], roots[1]}) {
      auto t = link_type(rng, nodes[static_cast<std::size_t>(r)], nodes[static_cast<std::size_t>(hub)]);
      links.push_back({r, hub, *t});
    }
  }
  if (nodes.size() == 1 && links.empty()) {
    // A single piece without edges has a trivial decomposition; add a loop.
    links.push_back({0, 0, nodes[0].role == Role::Phi ? EndType::Cylinder : EndType::Torus});
    if (nodes[0].kind == GkKind::SeifertPartiallyFibered && nodes[0].role == Role::Cover) links.back().type = EndType::Plane;
  }

  // Pieces, one per node.
  Instance inst;
  std::vector<Piece> pieces(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    pieces[i].id = "P" + std::to_string(i);
    switch (nodes[i].kind) {
      case GkKind::HypVirtuallyFibered:
      case GkKind::HypGeometricallyFinite: pieces[i].kind = PieceKind::HyperbolicFiniteVolume; break;
      case GkKind::FiniteCover:
        pieces[i].kind = rng.chance(0.5) ? PieceKind::HyperbolicFiniteVolume : PieceKind::SeifertFibered;
        break;
      default: pieces[i].kind = PieceKind::SeifertFibered;
    }
  }
  std::vector<int> torus_count(nodes.size(), 0);
  auto new_torus = [&](int node) {
    std::string id = "T" + std::to_string(torus_count[static_cast<std::size_t>(node)]++);
    pieces[static_cast<std::size_t>(node)].boundary.push_back({id, 1});
    return id;
  };

  std::vector<PhiVertex> pv(static_cast<std::size_t>(np));
  for (int i = 0; i < np; ++i) {
    pv[static_cast<std::size_t>(i)].id = nodes[static_cast<std::size_t>(i)].id;
    pv[static_cast<std::size_t>(i)].piece = pieces[static_cast<std::size_t>(i)].id;
    switch (nodes[static_cast<std::size_t>(i)].kind) {
      case GkKind::HypVirtuallyFibered: pv[static_cast<std::size_t>(i)].kind = PhiVertexKind::HypVirtuallyFibered; break;
      case GkKind::SeifertPartiallyFibered: pv[static_cast<std::size_t>(i)].kind = PhiVertexKind::SeifertPartiallyFibered; break;
      default: pv[static_cast<std::size_t>(i)].kind = PhiVertexKind::SeifertVirtuallyFibered;
    }
  }
  std::map<int, CoverVertex> cv;
  for (std::size_t i = static_cast<std::size_t>(np); i < nodes.size(); ++i) {
    CoverVertex v;
    v.id = nodes[i].id;
    v.piece = pieces[i].id;
    switch (nodes[i].kind) {
      case GkKind::HypGeometricallyFinite: v.kind = CoverVertexKind::HypGeometricallyFinite; break;
      case GkKind::SeifertCircleBundle: v.kind = CoverVertexKind::SeifertCircleBundle; break;
      case GkKind::SeifertPartiallyFibered: v.kind = CoverVertexKind::SeifertPartiallyFibered; break;
      default: v.kind = CoverVertexKind::FiniteCover;
    }
    cv.emplace(static_cast<int>(i), std::move(v));
  }

  std::vector<std::int64_t> lambda(nodes.size());
  for (auto& l : lambda) l = rng.uniform(1, 3);

  // Data for a Seifert or cusp circle whose core is `core` in the torus basis.
  auto fibered_circle = [&](int node, const std::string& torus, IVec core_side, const Gluing* g, std::int64_t datum) {
    Piece& p = pieces[static_cast<std::size_t>(node)];
    // In the side-a basis the core is (1,0); g moves that basis to this side.
    std::int64_t y = 1;
    do {
      y = rng.uniform(-3, 3);
    } while (std::gcd(y, datum) != 1);
    Vec2<std::int64_t> h{y, datum};
    if (nodes[static_cast<std::size_t>(node)].kind == GkKind::HypVirtuallyFibered) {
      Vec2<std::int64_t> t{0, 0};
      do {
        t = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
      } while (t.y == 0 || std::gcd(t.x, t.y) != 1);
      if (g) t = g->apply(t);
      p.degeneracy_slopes.emplace(torus, Slope::from_vector(t.x, t.y));
    } else {
      if (g) h = g->apply(h);
      p.fiber_slopes.emplace(torus, Slope::from_vector(h.x, h.y));
    }
    BoundaryCircle c;
    c.torus = torus;
    c.core = core_side;
    if (nodes[static_cast<std::size_t>(node)].kind == GkKind::HypVirtuallyFibered)
      c.cusp_degree = datum;
    else
      c.seifert_intersection = datum;
    return c;
  };

  int edge_no = 0;
  for (const Link& l : links) {
    const std::string id = (edge_no < 10 ? "e0" : "e") + std::to_string(edge_no);
    ++edge_no;
    const Gluing g = rng.gluing();
    Edge je;
    je.id = "j" + id;
    je.gluing = g;
    const std::string ta = new_torus(l.a), tb = new_torus(l.b);
    je.end_a = {pieces[static_cast<std::size_t>(l.a)].id, ta};
    je.end_b = {pieces[static_cast<std::size_t>(l.b)].id, tb};
    inst.jsj.edges.push_back(je);

    const std::int64_t scale = (nodes[static_cast<std::size_t>(l.a)].role == Role::Cover &&
                                nodes[static_cast<std::size_t>(l.b)].role == Role::Cover && rng.chance(0.3))
                                   ? 2
                                   : 1;
    const IVec core_a{scale, 0};
    const IVec core_b = g.apply(core_a);
    const std::int64_t w = rng.uniform(1, 3);
    std::array<SlotRef, 2> refs;
    std::array<std::size_t, 2> end_index{0, 0};
    for (int s = 0; s < 2; ++s) {
      const int node = s == 0 ? l.a : l.b;
      const std::string& torus = s == 0 ? ta : tb;
      const Node& nd = nodes[static_cast<std::size_t>(node)];
      Piece& p = pieces[static_cast<std::size_t>(node)];
      if (nd.role == Role::Phi) {
        PhiVertex& v = pv[static_cast<std::size_t>(node)];
        if (l.type == EndType::Cylinder) {
          std::int64_t datum = lambda[static_cast<std::size_t>(node)] * w;
          if (rng.chance(o.perturb)) datum += rng.uniform(1, 2);
          BoundaryCircle c = fibered_circle(node, torus, s == 0 ? core_a : core_b, s == 0 ? nullptr : &g, datum);
          c.id = "c" + std::to_string(v.circles.size() + v.planes.size());
          refs[s] = {v.id, c.id};
          v.circles.push_back(c);
        } else {
          IVec f = rng.primitive(3);
          p.fiber_slopes.emplace(torus, Slope::from_vector(f.x, f.y));
          PlaneBoundary pl{"c" + std::to_string(v.circles.size() + v.planes.size()), torus};
          refs[s] = {v.id, pl.id};
          v.planes.push_back(pl);
        }
      } else {
        CoverVertex& v = cv.at(node);
        CoverEnd e;
        e.id = "x" + std::to_string(v.ends.size());
        e.torus = torus;
        e.type = l.type;
        if (l.type == EndType::Cylinder) e.core = s == 0 ? core_a : core_b;
        if (p.kind == PieceKind::SeifertFibered) {
          IVec f = rng.primitive(3);
          p.fiber_slopes.emplace(torus, Slope::from_vector(f.x, f.y));
        }
        refs[s] = {v.id, e.id};
        end_index[static_cast<std::size_t>(s)] = v.ends.size();
        v.ends.push_back(e);
      }
    }
    if (l.type == EndType::Torus) {
      const std::int64_t a = rng.uniform(1, 3), d = rng.uniform(1, 3), b = rng.uniform(0, a - 1);
      Lattice la = Lattice::from_hnf(a, b, d);
      Lattice lb = apply_gluing(g, la);
      auto cols = [](const Lattice& l) {
        return std::array<std::int64_t, 4>{detail::narrow(l.a()), detail::narrow(l.b()), 0, detail::narrow(l.d())};
      };
      cv.at(l.a).ends[end_index[0]].lattice = cols(la);
      cv.at(l.b).ends[end_index[1]].lattice = cols(lb);
    }
    if (l.type == EndType::Plane) {
      // Partially fibered pairs need fibers that differ across the gluing.
      const bool fa = nodes[static_cast<std::size_t>(l.a)].kind == GkKind::SeifertPartiallyFibered;
      const bool fb = nodes[static_cast<std::size_t>(l.b)].kind == GkKind::SeifertPartiallyFibered;
      if (fa && fb) {
        Piece& pb = pieces[static_cast<std::size_t>(l.b)];
        const Slope fa_slope = pieces[static_cast<std::size_t>(l.a)].fiber_slopes.at(ta);
        while (g.apply(fa_slope).parallel_to(pb.fiber_slopes.at(tb))) {
          IVec f = rng.primitive(3);
          pb.fiber_slopes.at(tb) = Slope::from_vector(f.x, f.y);
        }
      }
    }
    if (l.type == EndType::Cylinder && nodes[static_cast<std::size_t>(l.a)].role == Role::Phi &&
        nodes[static_cast<std::size_t>(l.b)].role == Role::Phi) {
      inst.phi.edges.push_back({id, {refs[0].vertex, refs[0].slot}, {refs[1].vertex, refs[1].slot}, je.id});
    } else {
      if (!inst.cover) inst.cover.emplace();
      inst.cover->edges.push_back({id, l.type, refs[0], refs[1], je.id});
    }
  }

  // Occasionally leave a boundary circle unglued.
  for (int i = 0; i < np; ++i) {
    if (!rng.chance(0.15)) continue;
    PhiVertex& v = pv[static_cast<std::size_t>(i)];
    const std::string torus = new_torus(i);
    BoundaryCircle c = fibered_circle(i, torus, IVec{1, 0}, nullptr, rng.uniform(1, 4));
    c.id = "c" + std::to_string(v.circles.size() + v.planes.size());
    v.circles.push_back(c);
  }

  inst.jsj.pieces = std::move(pieces);
  for (auto& v : pv) inst.phi.vertices.push_back(std::move(v));
  if (!cv.empty()) {
    if (!inst.cover) inst.cover.emplace();
    for (auto& [_, v] : cv) inst.cover->vertices.push_back(std::move(v));
  }
  if (o.random_constants && rng.chance(0.7)) {
    ConstantInput c;
    for (const auto& n : nodes)
      if (n.kind != GkKind::HypVirtuallyFibered && n.kind != GkKind::FiniteCover && rng.chance(0.5))
        c.vertex[n.id] = rng.uniform(1, 4);
    if (rng.chance(0.5)) {
      c.extra_factor = rng.uniform(1, 3);
      c.has_extra_factor = true;
    }
    inst.constants = c;
  }
  return inst;
}

}  // namespace spirality::gen
