#pragma once

// Walk and cycle helpers for the spirality property checks. Shared by the
// unit tests and the acceptance binary.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spirality/phi_surface.hpp"
#include "support/random_instances.hpp"

namespace spirality::gen {

/// Overwrites the circle data with D = lambda_v * w_e, which telescopes around
/// every cycle, so the result is aspiral.
inline void assign_potential_data(Rng& rng, PhiGraph& g) {
  std::map<std::string, std::int64_t> lambda, w;
  for (const auto& v : g.vertices) lambda[v.id] = rng.uniform(1, 5);
  for (const auto& e : g.edges) w[e.id] = rng.uniform(1, 5);
  for (auto& v : g.vertices)
    for (auto& c : v.circles)
      for (const auto& e : g.edges)
        for (const CircleRef* end : {&e.end_a, &e.end_b})
          if (end->vertex == v.id && end->circle == c.id) {
            auto& slot = v.kind == PhiVertexKind::HypVirtuallyFibered ? c.cusp_degree : c.seifert_intersection;
            slot = lambda[v.id] * w[e.id];
          }
}

/// Value of a cycle rebuilt from the fundamental cycles of the chords it
/// crosses, each to the power +1 or -1 by traversal direction.
inline SpiralityValue value_by_decomposition(const PhiGraph& phi, const std::set<std::string>& tree, const Cycle& c) {
  SpiralityValue v;
  for (const auto& oe : c) {
    if (tree.contains(oe.edge)) continue;
    SpiralityValue f = spirality_on_cycle(phi, fundamental_cycle(phi, tree, oe.edge));
    v *= oe.forward ? f : f.inverse();
  }
  return v;
}

inline const std::string& start_vertex(const PhiGraph& phi, const OrientedEdge& oe) {
  return tail(*phi.find_edge(oe.edge), oe.forward).vertex;
}

/// Random closed walk leaving `start`, or nothing if none closed within
/// `max_len` steps.
inline std::optional<Cycle> random_closed_walk(Rng& rng, const PhiGraph& phi, const std::string& start, int max_len) {
  std::map<std::string, std::vector<OrientedEdge>> out;
  for (const auto& e : phi.edges) {
    out[e.end_a.vertex].push_back({e.id, true});
    out[e.end_b.vertex].push_back({e.id, false});
  }
  Cycle walk;
  std::string at = start;
  for (int step = 0; step < max_len; ++step) {
    auto it = out.find(at);
    if (it == out.end()) return std::nullopt;
    const OrientedEdge& oe = rng.pick(it->second);
    walk.push_back(oe);
    at = head(*phi.find_edge(oe.edge), oe.forward).vertex;
    if (at == start && rng.chance(0.5)) return walk;
  }
  return std::nullopt;
}

/// Lift of `base_cycle`, started on sheet 0 and repeated until it closes up.
/// Returns the lifted cycle and how many times the base cycle was run.
inline std::pair<Cycle, int> lift_closed(const CoverDraw& d, const Cycle& base_cycle) {
  std::map<std::string, std::vector<int>> inverse;
  for (const auto& [id, perm] : d.perms) {
    std::vector<int> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
    inverse[id] = inv;
  }
  Cycle lifted;
  int sheet = 0, rounds = 0;
  do {
    for (const auto& oe : base_cycle) {
      // Lifted edge id#i leaves sheet i of end_a and lands on sheet perm[i].
      const int tail_sheet = oe.forward ? sheet : inverse.at(oe.edge)[static_cast<std::size_t>(sheet)];
      lifted.push_back({oe.edge + "#" + std::to_string(tail_sheet), oe.forward});
      sheet = oe.forward ? d.perms.at(oe.edge)[static_cast<std::size_t>(sheet)] : tail_sheet;
    }
    ++rounds;
  } while (sheet != 0);
  return {lifted, rounds};
}

/// Seifert vertex whose circles carry proportional intersection numbers and
/// covering degrees: D_i = k * m_i and d_i = l * m_i.
inline PhiVertex proportional_vertex(Rng& rng, int circles) {
  PhiVertex v;
  v.id = "v";
  v.piece = "P";
  v.kind = PhiVertexKind::SeifertVirtuallyFibered;
  const std::int64_t k = rng.uniform(1, 5), l = rng.uniform(1, 5);
  for (int i = 0; i < circles; ++i) {
    const std::int64_t m = rng.uniform(1, 7);
    BoundaryCircle c;
    c.id = "c" + std::to_string(i);
    c.torus = "T" + std::to_string(i);
    c.seifert_intersection = k * m;
    c.cusp_degree = l * m;
    v.circles.push_back(c);
  }
  return v;
}

}  // namespace spirality::gen
