#pragma once

// The colored bipartite graph view of a PDA. Users form one side and packets
// the other; each integer cell p(f, k) = s is an edge (k, f) of color s.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdanet/pda.hpp"

namespace pdanet {

struct Edge {
  std::size_t k = 0;  ///< user vertex
  std::size_t f = 0;  ///< packet vertex
  std::optional<int> color;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class BipartiteColoredGraph {
 public:
  BipartiteColoredGraph() = default;
  /// Edges are stored sorted by (k, f). Throws InvalidParameter on duplicate
  /// or out-of-range edges and on colors below 1.
  BipartiteColoredGraph(std::size_t k_side, std::size_t f_side, std::vector<Edge> edges);

  std::size_t k_side() const noexcept { return k_side_; }
  std::size_t f_side() const noexcept { return f_side_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool has_edge(std::size_t k, std::size_t f) const { return present_[f * k_side_ + k] != 0; }
  bool fully_colored() const;
  std::vector<std::size_t> k_degrees() const;
  /// The common degree of every user vertex, if there is one.
  std::optional<std::size_t> constant_k_degree() const;
  /// Number of distinct colors in use.
  std::size_t color_count() const;

  /// Same vertices and edges with every color cleared.
  BipartiteColoredGraph uncolored() const;

  friend bool operator==(const BipartiteColoredGraph& a, const BipartiteColoredGraph& b) {
    return a.k_side_ == b.k_side_ && a.f_side_ == b.f_side_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t k_side_ = 0;
  std::size_t f_side_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint8_t> present_;
};

/// One edge per integer cell. Every user vertex has degree F - Z.
BipartiteColoredGraph pda_to_graph(const Pda& p);
/// Verifies the grid first; throws InvalidPda if it is not a PDA.
BipartiteColoredGraph pda_to_graph(const Grid& grid);

/// Inverse of pda_to_graph. Throws IncompleteColoring, DegreeViolation or
/// ColoringViolation when the graph is not the image of a PDA.
Pda graph_to_pda(const BipartiteColoredGraph& g);

/// Same-colored edges must form an induced matching. Throws IncompleteColoring
/// if any edge lacks a color.
bool is_strong_coloring(const BipartiteColoredGraph& g);

enum class EdgeOrderPolicy {
  Lexicographic,  ///< by (k, f)
  Shuffled,       ///< seeded random permutation
};

/// Greedy distance-2 coloring: each edge, in order, gets the smallest color not
/// used within its 2-neighborhood. Existing colors are discarded.
BipartiteColoredGraph greedy_strong_color(const BipartiteColoredGraph& g,
                                          EdgeOrderPolicy order = EdgeOrderPolicy::Lexicographic,
                                          std::uint64_t seed = 0);

/// Keeps delta uniformly chosen edges at every user vertex and renumbers the
/// surviving colors canonically. Requires a strong coloring with constant user
/// degree D and 0 < delta < D; throws InvalidParameter otherwise.
BipartiteColoredGraph subsample(const BipartiteColoredGraph& g, std::size_t delta, std::uint64_t seed);

/// Graph JSON: {"k": int, "f": int, "edges": [[k, f, color-or-null], ...]}
/// with 1-based vertices and edges sorted by (k, f).
std::string format_graph_json(const BipartiteColoredGraph& g);
BipartiteColoredGraph parse_graph_json(const std::string& text);

}  // namespace pdanet
