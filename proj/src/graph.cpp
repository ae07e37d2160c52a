#include "pdanet/graph.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pdanet/error.hpp"
#include "pdanet/random.hpp"

namespace pdanet {

BipartiteColoredGraph::BipartiteColoredGraph(std::size_t k_side, std::size_t f_side, std::vector<Edge> edges)
    : k_side_(k_side), f_side_(f_side), edges_(std::move(edges)), present_(k_side * f_side, 0) {
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.k != b.k ? a.k < b.k : a.f < b.f; });
  for (const Edge& e : edges_) {
    if (e.k >= k_side_ || e.f >= f_side_) {
      throw InvalidParameter("edge (" + std::to_string(e.k + 1) + "," + std::to_string(e.f + 1) +
                             ") out of range");
    }
    if (e.color && *e.color < 1) throw InvalidParameter("edge colors must be >= 1");
    auto& slot = present_[e.f * k_side_ + e.k];
    if (slot) {
      throw InvalidParameter("duplicate edge (" + std::to_string(e.k + 1) + "," + std::to_string(e.f + 1) + ")");
    }
    slot = 1;
  }
}

bool BipartiteColoredGraph::fully_colored() const {
  return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.color.has_value(); });
}

std::vector<std::size_t> BipartiteColoredGraph::k_degrees() const {
  std::vector<std::size_t> deg(k_side_, 0);
  for (const Edge& e : edges_) ++deg[e.k];
  return deg;
}

std::optional<std::size_t> BipartiteColoredGraph::constant_k_degree() const {
  const auto deg = k_degrees();
  if (deg.empty()) return 0;
  if (std::adjacent_find(deg.begin(), deg.end(), std::not_equal_to<>()) != deg.end()) return std::nullopt;
  return deg.front();
}

std::size_t BipartiteColoredGraph::color_count() const {
  std::vector<int> colors;
  for (const Edge& e : edges_) {
    if (e.color) colors.push_back(*e.color);
  }
  std::sort(colors.begin(), colors.end());
  return static_cast<std::size_t>(std::unique(colors.begin(), colors.end()) - colors.begin());
}

BipartiteColoredGraph BipartiteColoredGraph::uncolored() const {
  BipartiteColoredGraph g = *this;
  for (Edge& e : g.edges_) e.color.reset();
  return g;
}

BipartiteColoredGraph pda_to_graph(const Pda& p) {
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < p.k(); ++k) {
    for (std::size_t f = 0; f < p.f(); ++f) {
      const Entry e = p.at(f, k);
      if (e.is_color()) edges.push_back({k, f, e.value()});
    }
  }
  return {p.k(), p.f(), std::move(edges)};
}

BipartiteColoredGraph pda_to_graph(const Grid& grid) {
  const VerifyReport report = verify(grid);
  if (!report.valid) throw InvalidPda("not a PDA:\n" + report.str());
  return pda_to_graph(Pda::from_grid(grid));
}

bool is_strong_coloring(const BipartiteColoredGraph& g) {
  std::unordered_map<int, std::vector<const Edge*>> classes;
  for (const Edge& e : g.edges()) {
    if (!e.color) {
      throw IncompleteColoring("edge (" + std::to_string(e.k + 1) + "," + std::to_string(e.f + 1) +
                               ") has no color");
    }
    classes[*e.color].push_back(&e);
  }
  for (const auto& [color, members] : classes) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const Edge& p = *members[a];
        const Edge& q = *members[b];
        if (p.k == q.k || p.f == q.f) return false;
        if (g.has_edge(p.k, q.f) || g.has_edge(q.k, p.f)) return false;
      }
    }
  }
  return true;
}

Pda graph_to_pda(const BipartiteColoredGraph& g) {
  if (!g.fully_colored()) throw IncompleteColoring("every edge needs a color");
  const auto degree = g.constant_k_degree();
  if (!degree) throw DegreeViolation("user vertices do not share a common degree");
  if (!is_strong_coloring(g)) throw ColoringViolation("coloring is not a strong edge coloring");
  Grid grid(g.f_side(), g.k_side());
  for (const Edge& e : g.edges()) grid.at(e.f, e.k) = Entry::color(*e.color);
  return Pda::from_grid(grid, g.f_side() - *degree);
}

BipartiteColoredGraph greedy_strong_color(const BipartiteColoredGraph& g, EdgeOrderPolicy order,
                                          std::uint64_t seed) {
  const auto& edges = g.edges();
  const std::size_t m = edges.size();
  std::vector<std::vector<std::size_t>> at_k(g.k_side());
  std::vector<std::vector<std::size_t>> at_f(g.f_side());
  for (std::size_t i = 0; i < m; ++i) {
    at_k[edges[i].k].push_back(i);
    at_f[edges[i].f].push_back(i);
  }

  std::vector<std::size_t> sequence(m);
  std::iota(sequence.begin(), sequence.end(), std::size_t{0});
  if (order == EdgeOrderPolicy::Shuffled) {
    Rng rng(seed);
    rng.shuffle(sequence);
  }

  // color[i] == 0 means not yet colored; stamp[c] == step marks c forbidden.
  std::vector<int> color(m, 0);
  std::vector<std::size_t> stamp(m + 2, 0);
  std::size_t step = 0;
  for (std::size_t i : sequence) {
    ++step;
    auto mark = [&](std::size_t other) {
      if (color[other] != 0) stamp[static_cast<std::size_t>(color[other])] = step;
    };
    const Edge& e = edges[i];
    for (std::size_t e1 : at_k[e.k]) {
      mark(e1);
      for (std::size_t e2 : at_f[edges[e1].f]) mark(e2);
    }
    for (std::size_t e1 : at_f[e.f]) {
      mark(e1);
      for (std::size_t e2 : at_k[edges[e1].k]) mark(e2);
    }
    std::size_t c = 1;
    while (stamp[c] == step) ++c;
    color[i] = static_cast<int>(c);
  }

  std::vector<Edge> out = edges;
  for (std::size_t i = 0; i < m; ++i) out[i].color = color[i];
  return {g.k_side(), g.f_side(), std::move(out)};
}

BipartiteColoredGraph subsample(const BipartiteColoredGraph& g, std::size_t delta, std::uint64_t seed) {
  const auto degree = g.constant_k_degree();
  if (!degree) throw DegreeViolation("subsample needs a constant user degree");
  if (delta == 0 || delta >= *degree) {
    throw InvalidParameter("subsample needs 0 < delta < " + std::to_string(*degree) + ", got " +
                           std::to_string(delta));
  }
  if (!is_strong_coloring(g)) throw ColoringViolation("subsample needs a strong coloring");

  Rng rng(seed);
  std::vector<Edge> kept;
  kept.reserve(g.k_side() * delta);
  const auto& edges = g.edges();
  // Edges are sorted by (k, f), so each user's edges are contiguous.
  for (std::size_t begin = 0; begin < edges.size();) {
    std::size_t end = begin;
    while (end < edges.size() && edges[end].k == edges[begin].k) ++end;
    std::vector<std::size_t> pick(end - begin);
    std::iota(pick.begin(), pick.end(), begin);
    for (std::size_t i = 0; i < delta; ++i) std::swap(pick[i], pick[i + rng.index(pick.size() - i)]);
    pick.resize(delta);
    std::sort(pick.begin(), pick.end());
    for (std::size_t i : pick) kept.push_back(edges[i]);
    begin = end;
  }

  std::unordered_map<int, int> relabel;
  int next = 1;
  for (Edge& e : kept) {
    auto [it, fresh] = relabel.try_emplace(*e.color, next);
    if (fresh) ++next;
    e.color = it->second;
  }
  return {g.k_side(), g.f_side(), std::move(kept)};
}

std::string format_graph_json(const BipartiteColoredGraph& g) {
  nlohmann::ordered_json j;
  j["k"] = g.k_side();
  j["f"] = g.f_side();
  auto edges = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges()) {
    nlohmann::ordered_json item = nlohmann::ordered_json::array({e.k + 1, e.f + 1});
    if (e.color) {
      item.push_back(*e.color);
    } else {
      item.push_back(nullptr);
    }
    edges.push_back(std::move(item));
  }
  j["edges"] = std::move(edges);
  return j.dump() + "\n";
}

BipartiteColoredGraph parse_graph_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const auto k = j.at("k").get<std::size_t>();
    const auto f = j.at("f").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& item : j.at("edges")) {
      if (!item.is_array() || item.size() != 3) throw InvalidParameter("edge entries must be [k, f, color]");
      const auto ek = item[0].get<std::size_t>();
      const auto ef = item[1].get<std::size_t>();
      if (ek < 1 || ef < 1) throw InvalidParameter("graph JSON vertices are 1-based");
      Edge e{ek - 1, ef - 1, std::nullopt};
      if (!item[2].is_null()) e.color = item[2].get<int>();
      edges.push_back(e);
    }
    return {k, f, std::move(edges)};
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("graph JSON: ") + ex.what(), 1, 1);
  } catch (const InvalidParameter& ex) {
    throw ParseError(std::string("graph JSON: ") + ex.what(), 1, 1);
  }
}

}  // namespace pdanet
