#pragma once

// Brute-force reference implementations. Nothing here calls into the lattice
// normal form, the cycle machinery or the LERF rule it is compared against.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spirality/jsj_graph.hpp"
#include "spirality/lattice.hpp"
#include "spirality/phi_surface.hpp"

namespace spirality::oracle {

using Point = std::pair<std::int64_t, std::int64_t>;

/// All integer combinations of the two generators with both coordinates in
/// [-bound, bound].
inline std::set<Point> lattice_membership_by_enumeration(IVec g1, IVec g2, int bound) {
  if (bound < 1 || bound > 64) throw std::invalid_argument("bound must lie in [1, 64]");
  std::set<Point> out;
  const std::int64_t d = g1.x * g2.y - g1.y * g2.x;
  for (std::int64_t x = -bound; x <= bound; ++x) {
    for (std::int64_t y = -bound; y <= bound; ++y) {
      if (d != 0) {
        // Cramer's rule: (x, y) = a g1 + b g2.
        const std::int64_t na = x * g2.y - y * g2.x;
        const std::int64_t nb = g1.x * y - g1.y * x;
        if (na % d == 0 && nb % d == 0) out.insert({x, y});
        continue;
      }
      // Rank at most one: multiples of step * dir, where dir is primitive.
      if (g1.x == 0 && g1.y == 0 && g2.x == 0 && g2.y == 0) {
        if (x == 0 && y == 0) out.insert({0, 0});
        continue;
      }
      const IVec gv = (g1.x != 0 || g1.y != 0) ? g1 : g2;
      const std::int64_t content = std::gcd(gv.x, gv.y);
      const IVec dir{gv.x / content, gv.y / content};
      auto coeff = [&](IVec v) { return dir.x != 0 ? v.x / dir.x : v.y / dir.y; };
      const std::int64_t step = std::gcd(coeff(g1), coeff(g2));
      if (x * dir.y - y * dir.x != 0) continue;
      const std::int64_t m = coeff(IVec{x, y});
      if (m % step == 0) out.insert({x, y});
    }
  }
  return out;
}

/// Every simple cycle with at most `maxlen` edges, once each. A cycle is
/// rotated to start at its smallest edge id, traversed forward.
inline std::vector<Cycle> all_simple_cycles(const PhiGraph& g, int maxlen) {
  if (maxlen < 1 || maxlen > 12) throw std::invalid_argument("maxlen must lie in [1, 12]");
  struct Arc {
    std::string edge;
    bool forward;
    std::string to;
  };
  std::map<std::string, std::vector<Arc>> out_arcs;
  for (const auto& v : g.vertices) out_arcs[v.id];
  for (const auto& e : g.edges) {
    out_arcs[e.end_a.vertex].push_back({e.id, true, e.end_b.vertex});
    if (e.end_a.vertex != e.end_b.vertex) out_arcs[e.end_b.vertex].push_back({e.id, false, e.end_a.vertex});
  }

  std::set<std::set<std::string>> seen;
  std::vector<Cycle> found;
  for (const auto& [start, _] : out_arcs) {
    Cycle path;
    std::set<std::string> on_path{start};
    std::set<std::string> used;
    std::function<void(const std::string&)> dfs = [&](const std::string& at) {
      for (const Arc& a : out_arcs[at]) {
        if (used.contains(a.edge) || a.to < start) continue;
        if (static_cast<int>(path.size()) + 1 > maxlen) continue;
        if (a.to == start) {
          Cycle c = path;
          c.push_back({a.edge, a.forward});
          std::set<std::string> key;
          for (const auto& oe : c) key.insert(oe.edge);
          if (seen.insert(key).second) found.push_back(std::move(c));
          continue;
        }
        if (on_path.contains(a.to)) continue;
        path.push_back({a.edge, a.forward});
        on_path.insert(a.to);
        used.insert(a.edge);
        dfs(a.to);
        used.erase(a.edge);
        on_path.erase(a.to);
        path.pop_back();
      }
    };
    dfs(start);
  }

  for (Cycle& c : found) {
    std::size_t m = 0;
    for (std::size_t i = 1; i < c.size(); ++i)
      if (c[i].edge < c[m].edge) m = i;
    std::rotate(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(m), c.end());
    if (!c.front().forward) {
      // Walk the other way round; the smallest edge stays first.
      Cycle r;
      r.push_back({c.front().edge, true});
      for (std::size_t i = c.size(); i-- > 1;) r.push_back({c[i].edge, !c[i].forward});
      c = std::move(r);
    }
  }
  std::sort(found.begin(), found.end(), [](const Cycle& a, const Cycle& b) {
    std::vector<std::string> ka, kb;
    for (const auto& oe : a) ka.push_back(oe.edge);
    for (const auto& oe : b) kb.push_back(oe.edge);
    return ka < kb;
  });
  return found;
}

struct TruthRow {
  std::vector<PieceKind> kinds;
  /// Unordered piece pairs, loops allowed.
  std::vector<std::pair<int, int>> edges;
  bool lerf = true;
};

/// Converts a row into a concrete graph: each edge end gets its own torus,
/// and higher-genus pieces carry one extra genus-2 boundary.
inline JsjGraph to_jsj_graph(const TruthRow& row) {
  JsjGraph g;
  const int n = static_cast<int>(row.kinds.size());
  for (int i = 0; i < n; ++i) {
    Piece p;
    p.id = "P" + std::to_string(i + 1);
    p.kind = row.kinds[i];
    if (p.kind == PieceKind::HyperbolicHigherGenus) p.boundary.push_back({"S", 2});
    g.pieces.push_back(std::move(p));
  }
  std::vector<int> next_torus(n, 1);
  auto torus = [&](int piece) {
    Piece& p = g.pieces[piece];
    std::string id = "T" + std::to_string(next_torus[piece]++);
    p.boundary.push_back({id, 1});
    if (p.kind == PieceKind::SeifertFibered) p.fiber_slopes.emplace(id, Slope::from_vector(0, 1));
    return id;
  };
  for (std::size_t k = 0; k < row.edges.size(); ++k) {
    auto [a, b] = row.edges[k];
    Edge e;
    e.id = "e" + std::to_string(k + 1);
    e.end_a = {g.pieces[a].id, torus(a)};
    e.end_b = {g.pieces[b].id, torus(b)};
    g.edges.push_back(std::move(e));
  }
  g.trivial_decomposition = n == 1 && row.edges.empty();
  return g;
}

/// Every connected labelled multigraph with 1..max_pieces pieces and
/// 0..max_edges edges over the three piece kinds, with its verdict from a
/// direct scan over edges.
inline std::vector<TruthRow> exhaustive_lerf_truth_table(int max_pieces, int max_edges) {
  if (max_pieces < 1 || max_pieces > 4 || max_edges < 0 || max_edges > 5)
    throw std::invalid_argument("bounds must lie within 4 pieces and 5 edges");
  const PieceKind all_kinds[] = {PieceKind::SeifertFibered, PieceKind::HyperbolicFiniteVolume,
                                 PieceKind::HyperbolicHigherGenus};
  std::vector<TruthRow> rows;
  for (int n = 1; n <= max_pieces; ++n) {
    std::vector<std::pair<int, int>> slots;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) slots.push_back({a, b});

    // Multisets of edge slots, as nondecreasing index sequences.
    std::vector<std::vector<std::pair<int, int>>> edge_sets;
    std::vector<int> pick;
    std::function<void(int)> grow = [&](int from) {
      std::vector<std::pair<int, int>> es;
      for (int i : pick) es.push_back(slots[i]);
      // Connectivity by repeated relaxation.
      std::vector<bool> reach(n, false);
      reach[0] = true;
      for (bool changed = true; changed;) {
        changed = false;
        for (auto [a, b] : es)
          if (reach[a] != reach[b]) reach[a] = reach[b] = changed = true;
      }
      if (std::all_of(reach.begin(), reach.end(), [](bool r) { return r; })) edge_sets.push_back(es);
      if (static_cast<int>(pick.size()) == max_edges) return;
      for (int i = from; i < static_cast<int>(slots.size()); ++i) {
        pick.push_back(i);
        grow(i);
        pick.pop_back();
      }
    };
    grow(0);

    int total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
      std::vector<PieceKind> kinds;
      for (int i = 0, c = code; i < n; ++i, c /= 3) kinds.push_back(all_kinds[c % 3]);
      for (const auto& es : edge_sets) {
        TruthRow row{kinds, es, true};
        if (!(n == 1 && es.empty())) {
          for (auto [a, b] : es)
            if (kinds[a] != PieceKind::HyperbolicHigherGenus && kinds[b] != PieceKind::HyperbolicHigherGenus)
              row.lerf = false;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace spirality::oracle
