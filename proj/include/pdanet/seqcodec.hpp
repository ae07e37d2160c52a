#pragma once

// The sequence view of a PDA used by the learned colorer: the placement's
// adjacency matrix, its ordered edge sequence and a parallel color sequence.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pdanet/pda.hpp"

namespace pdanet {

/// One: the cell carries an edge (an integer in the array). Inf: a star.
enum class Link : std::uint8_t { One, Inf };

class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  AdjacencyMatrix(std::size_t rows, std::size_t cols, Link fill = Link::One)
      : rows_(rows), cols_(cols), cells_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }  ///< F
  std::size_t cols() const noexcept { return cols_; }  ///< K

  Link at(std::size_t row, std::size_t col) const { return cells_[row * cols_ + col]; }
  Link& at(std::size_t row, std::size_t col) { return cells_[row * cols_ + col]; }
  bool is_one(std::size_t row, std::size_t col) const { return at(row, col) == Link::One; }

  std::size_t ones() const;

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Link> cells_;
};

struct EdgePos {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const EdgePos&, const EdgePos&) = default;
};

using EdgeSequence = std::vector<EdgePos>;
using ColorSequence = std::vector<int>;

/// Canonical order is column-major (user, then packet). Row-major exists for
/// ordering experiments only.
enum class SequenceOrder { ColumnMajor, RowMajor };

/// stars[k] lists the star rows of column k; each list must hold exactly z
/// distinct rows below f. Throws InvalidPlacement otherwise.
AdjacencyMatrix placement_to_adjacency(std::size_t z, std::size_t f, std::size_t k,
                                       const std::vector<std::vector<std::size_t>>& stars);

AdjacencyMatrix adjacency_of(const Grid& grid);
inline AdjacencyMatrix adjacency_of(const Pda& p) { return adjacency_of(p.grid()); }

/// All One cells in the requested order. Its length is K(F - Z) for a placement.
EdgeSequence extract_edge_sequence(const AdjacencyMatrix& a,
                                   SequenceOrder order = SequenceOrder::ColumnMajor);

/// Colors of the grid read along the edge sequence.
ColorSequence colors_along(const Grid& grid, const EdgeSequence& edges);

/// Cell (i, j) = c_l where e_l = (i, j); star where the adjacency is Inf.
/// Throws LengthMismatch if |c| != |e| or e does not list exactly the One cells.
Grid assemble_array(const AdjacencyMatrix& a, const EdgeSequence& e, const ColorSequence& c);

/// Renumbers colors 1.. by first occurrence along the sequence.
ColorSequence canonical_colors(const ColorSequence& c);
bool is_canonical(const ColorSequence& c);

/// One supervised example: the placement and a valid coloring of its edges.
struct TrainingPair {
  std::size_t k = 0;
  std::size_t f = 0;
  std::size_t z = 0;
  EdgeSequence edges;
  ColorSequence colors;

  AdjacencyMatrix adjacency() const;
  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

TrainingPair make_training_pair(const Pda& p);

/// {"K":..,"F":..,"Z":..,"edges":[[i,j],...],"colors":[...]} with 1-based
/// row i and column j, no trailing newline.
std::string format_training_pair(const TrainingPair& pair);
TrainingPair parse_training_pair(const std::string& line);

std::string format_corpus(const std::vector<TrainingPair>& corpus);
/// Skips blank lines. Throws ParseError with the offending line number.
std::vector<TrainingPair> parse_corpus(const std::string& text);

}  // namespace pdanet
