#pragma once

// Dual graph of the torus decomposition and the LERF decision rule.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spirality/error.hpp"
#include "spirality/lattice.hpp"

namespace spirality {

enum class PieceKind { SeifertFibered, HyperbolicFiniteVolume, HyperbolicHigherGenus };

constexpr std::string_view to_string(PieceKind k) {
  switch (k) {
    case PieceKind::SeifertFibered: return "SeifertFibered";
    case PieceKind::HyperbolicFiniteVolume: return "HyperbolicFiniteVolume";
    case PieceKind::HyperbolicHigherGenus: return "HyperbolicHigherGenus";
  }
  return "Unknown";
}

inline std::optional<PieceKind> piece_kind_from_string(std::string_view s) {
  for (PieceKind k : {PieceKind::SeifertFibered, PieceKind::HyperbolicFiniteVolume, PieceKind::HyperbolicHigherGenus})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct BoundaryComponent {
  std::string id;
  int genus = 1;

  friend bool operator==(const BoundaryComponent&, const BoundaryComponent&) = default;
};

struct Piece {
  std::string id;
  PieceKind kind = PieceKind::SeifertFibered;
  std::vector<BoundaryComponent> boundary;
  std::map<std::string, Slope> fiber_slopes;
  std::map<std::string, Slope> degeneracy_slopes;

  const BoundaryComponent* find_boundary(std::string_view bid) const {
    for (const auto& b : boundary)
      if (b.id == bid) return &b;
    return nullptr;
  }

  bool has_higher_genus_boundary() const {
    return std::any_of(boundary.begin(), boundary.end(), [](const BoundaryComponent& b) { return b.genus >= 2; });
  }

  friend bool operator==(const Piece&, const Piece&) = default;
};

struct EdgeEnd {
  std::string piece;
  std::string boundary;

  friend bool operator==(const EdgeEnd&, const EdgeEnd&) = default;
  friend auto operator<=>(const EdgeEnd&, const EdgeEnd&) = default;
};

/// A decomposition torus. A vector written in the end_a torus basis is
/// gluing * v in the end_b basis.
struct Edge {
  std::string id;
  EdgeEnd end_a;
  EdgeEnd end_b;
  Gluing gluing = Gluing::identity();

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct JsjGraph {
  std::vector<Piece> pieces;
  std::vector<Edge> edges;
  bool is_sol = false;
  bool trivial_decomposition = false;

  const Piece* find_piece(std::string_view pid) const {
    for (const auto& p : pieces)
      if (p.id == pid) return &p;
    return nullptr;
  }

  const Edge* find_edge(std::string_view eid) const {
    for (const auto& e : edges)
      if (e.id == eid) return &e;
    return nullptr;
  }

  friend bool operator==(const JsjGraph&, const JsjGraph&) = default;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Every structural violation, in a stable order. Empty means valid.
inline std::vector<std::string> validate(const JsjGraph& g) {
  std::vector<std::string> out;
  if (g.pieces.empty()) out.push_back("graph has no pieces");

  std::set<std::string> piece_ids;
  std::map<std::string, std::size_t> piece_index;
  for (std::size_t i = 0; i < g.pieces.size(); ++i) {
    const Piece& p = g.pieces[i];
    if (!piece_ids.insert(p.id).second) out.push_back("duplicate piece id " + p.id);
    piece_index.emplace(p.id, i);

    std::set<std::string> bids;
    bool higher = false;
    for (const auto& b : p.boundary) {
      if (!bids.insert(b.id).second) out.push_back("piece " + p.id + ": duplicate boundary id " + b.id);
      if (b.genus < 1) out.push_back("piece " + p.id + ": boundary " + b.id + " has genus < 1");
      if (b.genus >= 2) higher = true;
    }
    switch (p.kind) {
      case PieceKind::SeifertFibered:
        for (const auto& b : p.boundary) {
          if (b.genus >= 2) out.push_back("piece " + p.id + ": Seifert piece with higher-genus boundary " + b.id);
          if (b.genus == 1 && !p.fiber_slopes.contains(b.id))
            out.push_back("piece " + p.id + ": missing fiber slope on " + b.id);
        }
        if (!p.degeneracy_slopes.empty()) out.push_back("piece " + p.id + ": degeneracy slopes on a Seifert piece");
        break;
      case PieceKind::HyperbolicFiniteVolume:
        if (higher) out.push_back("piece " + p.id + ": finite-volume piece with higher-genus boundary");
        if (!p.fiber_slopes.empty()) out.push_back("piece " + p.id + ": fiber slopes on a hyperbolic piece");
        break;
      case PieceKind::HyperbolicHigherGenus:
        if (!higher) out.push_back("piece " + p.id + ": no boundary component of genus >= 2");
        if (!p.fiber_slopes.empty()) out.push_back("piece " + p.id + ": fiber slopes on a hyperbolic piece");
        break;
    }
    for (const auto* slopes : {&p.fiber_slopes, &p.degeneracy_slopes}) {
      for (const auto& [bid, s] : *slopes) {
        const BoundaryComponent* b = p.find_boundary(bid);
        if (b == nullptr)
          out.push_back("piece " + p.id + ": slope on unknown boundary " + bid);
        else if (b->genus != 1)
          out.push_back("piece " + p.id + ": slope on non-torus boundary " + bid);
      }
    }
  }

  std::set<std::string> edge_ids;
  std::set<EdgeEnd> used_ends;
  detail::UnionFind uf(g.pieces.size());
  for (const Edge& e : g.edges) {
    if (!edge_ids.insert(e.id).second) out.push_back("duplicate edge id " + e.id);
    const std::int64_t d = e.gluing.det();
    if (d != 1 && d != -1) out.push_back("edge " + e.id + ": gluing is not unimodular");
    bool both_resolved = true;
    for (const EdgeEnd* end : {&e.end_a, &e.end_b}) {
      const Piece* p = g.find_piece(end->piece);
      if (p == nullptr) {
        out.push_back("edge " + e.id + ": unknown piece " + end->piece);
        both_resolved = false;
        continue;
      }
      const BoundaryComponent* b = p->find_boundary(end->boundary);
      if (b == nullptr) {
        out.push_back("edge " + e.id + ": unknown boundary " + end->piece + "/" + end->boundary);
        continue;
      }
      if (b->genus != 1) out.push_back("edge " + e.id + ": edge endpoint not a torus");
      if (!used_ends.insert(*end).second)
        out.push_back("edge " + e.id + ": torus " + end->piece + "/" + end->boundary + " used by more than one edge end");
    }
    if (both_resolved) uf.unite(piece_index.at(e.end_a.piece), piece_index.at(e.end_b.piece));
  }

  if (!g.pieces.empty()) {
    std::size_t root = uf.find(0);
    for (std::size_t i = 1; i < g.pieces.size(); ++i)
      if (uf.find(i) != root) {
        out.push_back("graph is not connected");
        break;
      }
  }
  const bool trivial_shape = g.edges.empty() && g.pieces.size() == 1;
  if (g.trivial_decomposition != trivial_shape)
    out.push_back(g.trivial_decomposition ? "trivial_decomposition set but graph has edges or several pieces"
                                          : "single piece without edges must set trivial_decomposition");
  if (g.is_sol && g.trivial_decomposition) out.push_back("is_sol contradicts trivial_decomposition");
  return out;
}

inline void require_valid(const JsjGraph& g) {
  auto v = validate(g);
  if (!v.empty()) throw Error(ErrorCode::InvalidGraph, v.front());
}

struct LerfVerdict {
  bool lerf = true;
  std::optional<std::string> witness_edge;
  /// Position of the failing summand when deciding a prime decomposition.
  std::optional<std::size_t> summand;

  friend bool operator==(const LerfVerdict&, const LerfVerdict&) = default;
};

/// Lerf unless some decomposition torus has tori-only pieces on both sides.
/// The reported edge is the first such in id order.
inline LerfVerdict is_lerf(const JsjGraph& g) {
  require_valid(g);
  if (g.trivial_decomposition || g.is_sol) return {};
  std::vector<const Edge*> order;
  for (const auto& e : g.edges) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const Edge* a, const Edge* b) { return a->id < b->id; });
  for (const Edge* e : order) {
    if (g.find_piece(e->end_a.piece)->has_higher_genus_boundary()) continue;
    if (g.find_piece(e->end_b.piece)->has_higher_genus_boundary()) continue;
    return {false, e->id, std::nullopt};
  }
  return {};
}

/// A connected sum is Lerf exactly when every summand is.
inline LerfVerdict lerf_prime_decomposition(std::span<const JsjGraph> summands) {
  for (const auto& g : summands) require_valid(g);
  for (std::size_t i = 0; i < summands.size(); ++i) {
    LerfVerdict v = is_lerf(summands[i]);
    if (!v.lerf) {
      v.summand = i;
      return v;
    }
  }
  return {};
}

}  // namespace spirality
