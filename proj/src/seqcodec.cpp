#include "pdanet/seqcodec.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pdanet/error.hpp"

namespace pdanet {

std::size_t AdjacencyMatrix::ones() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), Link::One));
}

AdjacencyMatrix placement_to_adjacency(std::size_t z, std::size_t f, std::size_t k,
                                       const std::vector<std::vector<std::size_t>>& stars) {
  if (stars.size() != k) {
    throw InvalidPlacement("expected star rows for " + std::to_string(k) + " columns, got " +
                           std::to_string(stars.size()));
  }
  AdjacencyMatrix a(f, k, Link::One);
  for (std::size_t col = 0; col < k; ++col) {
    if (stars[col].size() != z) {
      throw InvalidPlacement("column " + std::to_string(col + 1) + " has " + std::to_string(stars[col].size()) +
                             " star rows, expected Z=" + std::to_string(z));
    }
    for (std::size_t row : stars[col]) {
      if (row >= f) throw InvalidPlacement("star row " + std::to_string(row + 1) + " out of range");
      if (a.at(row, col) == Link::Inf) {
        throw InvalidPlacement("star row " + std::to_string(row + 1) + " repeated in column " +
                               std::to_string(col + 1));
      }
      a.at(row, col) = Link::Inf;
    }
  }
  return a;
}

AdjacencyMatrix adjacency_of(const Grid& grid) {
  AdjacencyMatrix a(grid.rows(), grid.cols());
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    for (std::size_t j = 0; j < grid.cols(); ++j) a.at(i, j) = grid.at(i, j).is_star() ? Link::Inf : Link::One;
  }
  return a;
}

EdgeSequence extract_edge_sequence(const AdjacencyMatrix& a, SequenceOrder order) {
  EdgeSequence e;
  e.reserve(a.ones());
  if (order == SequenceOrder::ColumnMajor) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      for (std::size_t i = 0; i < a.rows(); ++i) {
        if (a.is_one(i, j)) e.push_back({i, j});
      }
    }
  } else {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) {
        if (a.is_one(i, j)) e.push_back({i, j});
      }
    }
  }
  return e;
}

ColorSequence colors_along(const Grid& grid, const EdgeSequence& edges) {
  ColorSequence c;
  c.reserve(edges.size());
  for (const EdgePos& e : edges) {
    const Entry v = grid.at(e.row, e.col);
    if (v.is_star()) throw LengthMismatch("edge sequence visits a star cell");
    c.push_back(v.value());
  }
  return c;
}

Grid assemble_array(const AdjacencyMatrix& a, const EdgeSequence& e, const ColorSequence& c) {
  if (e.size() != c.size()) {
    throw LengthMismatch("edge sequence has " + std::to_string(e.size()) + " edges but " +
                         std::to_string(c.size()) + " colors were given");
  }
  if (e.size() != a.ones()) {
    throw LengthMismatch("edge sequence has " + std::to_string(e.size()) + " edges, adjacency has " +
                         std::to_string(a.ones()));
  }
  Grid g(a.rows(), a.cols());
  for (std::size_t l = 0; l < e.size(); ++l) {
    const auto [i, j] = e[l];
    if (i >= a.rows() || j >= a.cols() || !a.is_one(i, j) || g.at(i, j).is_color()) {
      throw LengthMismatch("edge " + std::to_string(l + 1) + " does not match the adjacency");
    }
    g.at(i, j) = Entry::color(c[l]);
  }
  return g;
}

ColorSequence canonical_colors(const ColorSequence& c) {
  std::unordered_map<int, int> relabel;
  ColorSequence out;
  out.reserve(c.size());
  int next = 1;
  for (int v : c) {
    auto [it, fresh] = relabel.try_emplace(v, next);
    if (fresh) ++next;
    out.push_back(it->second);
  }
  return out;
}

bool is_canonical(const ColorSequence& c) {
  int seen = 0;
  for (int v : c) {
    if (v < 1 || v > seen + 1) return false;
    seen = std::max(seen, v);
  }
  return true;
}

AdjacencyMatrix TrainingPair::adjacency() const {
  AdjacencyMatrix a(f, k, Link::Inf);
  for (const EdgePos& e : edges) {
    if (e.row >= f || e.col >= k) throw LengthMismatch("training edge out of range");
    a.at(e.row, e.col) = Link::One;
  }
  return a;
}

TrainingPair make_training_pair(const Pda& p) {
  TrainingPair pair;
  pair.k = p.k();
  pair.f = p.f();
  pair.z = p.z();
  pair.edges = extract_edge_sequence(adjacency_of(p));
  pair.colors = canonical_colors(colors_along(p.grid(), pair.edges));
  return pair;
}

std::string format_training_pair(const TrainingPair& pair) {
  nlohmann::ordered_json j;
  j["K"] = pair.k;
  j["F"] = pair.f;
  j["Z"] = pair.z;
  auto edges = nlohmann::ordered_json::array();
  for (const EdgePos& e : pair.edges) edges.push_back({e.row + 1, e.col + 1});
  j["edges"] = std::move(edges);
  j["colors"] = pair.colors;
  return j.dump();
}

TrainingPair parse_training_pair(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  TrainingPair pair;
  pair.k = j.at("K").get<std::size_t>();
  pair.f = j.at("F").get<std::size_t>();
  pair.z = j.at("Z").get<std::size_t>();
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw InvalidParameter("edges must be [row, col] pairs");
    const auto i = e[0].get<std::size_t>();
    const auto c = e[1].get<std::size_t>();
    if (i < 1 || c < 1 || i > pair.f || c > pair.k) throw InvalidParameter("edge out of range");
    pair.edges.push_back({i - 1, c - 1});
  }
  pair.colors = j.at("colors").get<ColorSequence>();
  if (pair.colors.size() != pair.edges.size()) throw LengthMismatch("colors and edges differ in length");
  return pair;
}

std::string format_corpus(const std::vector<TrainingPair>& corpus) {
  std::string out;
  for (const TrainingPair& p : corpus) {
    out += format_training_pair(p);
    out += '\n';
  }
  return out;
}

std::vector<TrainingPair> parse_corpus(const std::string& text) {
  std::vector<TrainingPair> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_training_pair(line));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(std::string("corpus: ") + ex.what(), n, 1);
    } catch (const Error& ex) {
      throw ParseError(std::string("corpus: ") + ex.what(), n, 1);
    }
  }
  return out;
}

}  // namespace pdanet
