#pragma once

// Placement delivery arrays: the raw grid type, the validated Pda type, the
// C1/C2 verifier and the Maddah-Ali--Niesen reference construction.
//
// Indices are 0-based throughout the C++ API (row = packet, col = user).
// Colors are 1-based; the star symbol has no color.

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "pdanet/rational.hpp"

namespace pdanet {

/// One cell of a placement delivery array: the star symbol or a color s >= 1.
class Entry {
 public:
  constexpr Entry() noexcept = default;

  static constexpr Entry star() noexcept { return Entry{}; }
  /// Throws InvalidParameter for s < 1.
  static Entry color(int s);

  constexpr bool is_star() const noexcept { return value_ == 0; }
  constexpr bool is_color() const noexcept { return value_ != 0; }
  /// 0 for a star.
  constexpr int value() const noexcept { return value_; }

  friend constexpr auto operator<=>(const Entry&, const Entry&) noexcept = default;

 private:
  int value_ = 0;
};

/// A rectangular F x K array of entries with no PDA guarantees.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, Entry fill = Entry::star());
  /// Builds from nested rows. 0 encodes a star, positive values are colors.
  /// Throws MalformedGrid when the rows are ragged or a value is negative.
  static Grid from_rows(const std::vector<std::vector<int>>& rows);
  static Grid from_rows(std::initializer_list<std::initializer_list<int>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return cells_.empty(); }

  Entry at(std::size_t row, std::size_t col) const { return cells_[row * cols_ + col]; }
  Entry& at(std::size_t row, std::size_t col) { return cells_[row * cols_ + col]; }

  std::size_t stars_in_column(std::size_t col) const;
  /// Largest color present, 0 if the grid holds only stars.
  int max_color() const;
  /// Number of distinct colors present.
  std::size_t distinct_colors() const;
  /// True iff the colors present are exactly 1..distinct_colors().
  bool colors_consecutive() const;

  std::vector<std::vector<int>> to_rows() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Entry> cells_;
};

/// Renumbers colors 1..S in order of first occurrence, scanning columns left
/// to right and rows top to bottom within each column.
Grid canonicalize(const Grid& grid);

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

enum class Condition {
  C1,   // wrong number of stars in a column
  C2a,  // equal colors share a row or a column
  C2b,  // equal colors whose 2x2 cross cells are not both stars
  S,    // colors do not match the declared S
};

std::string to_string(Condition c);

struct Violation {
  Condition condition = Condition::C1;
  /// C1: one cell per offending column (row field unused).
  /// C2a/C2b: the two cells with equal color. S: first out-of-range cell, if any.
  std::vector<Cell> cells;
  std::string detail;
};

struct VerifyReport {
  bool valid = true;
  std::size_t z = 0;  ///< Z used for the C1 check.
  std::size_t s = 0;  ///< Distinct colors in the grid.
  std::vector<Violation> violations;

  /// Human-readable listing with 1-based coordinates.
  std::string str() const;
};

/// Checks C1 and C2 literally. Z defaults to the star count of the first
/// column; a declared Z or S that disagrees with the grid yields violations.
VerifyReport verify(const Grid& grid, std::optional<std::size_t> declared_z = std::nullopt,
                    std::optional<std::size_t> declared_s = std::nullopt);

/// A grid known to satisfy C1 and C2 with colors exactly 1..S.
class Pda {
 public:
  /// Validates the grid. Non-consecutive colors are renumbered canonically
  /// first. Throws InvalidPda carrying the verifier report on failure.
  static Pda from_grid(const Grid& grid, std::optional<std::size_t> declared_z = std::nullopt);

  std::size_t k() const noexcept { return grid_.cols(); }
  std::size_t f() const noexcept { return grid_.rows(); }
  std::size_t z() const noexcept { return z_; }
  std::size_t s() const noexcept { return s_; }

  const Grid& grid() const noexcept { return grid_; }
  Entry at(std::size_t row, std::size_t col) const { return grid_.at(row, col); }

  friend bool operator==(const Pda&, const Pda&) = default;

 private:
  Pda(Grid grid, std::size_t z, std::size_t s) : grid_(std::move(grid)), z_(z), s_(s) {}

  Grid grid_;
  std::size_t z_ = 0;
  std::size_t s_ = 0;
};

/// The (K, C(K,t), C(K-1,t-1), C(K,t+1)) PDA of the Maddah-Ali--Niesen scheme.
/// Rows are t-subsets in lexicographic order; colors index (t+1)-subsets in
/// lexicographic order. Requires 1 <= t <= K-1 and K <= 62.
Pda construct_mn_pda(std::size_t k_users, std::size_t t);

struct RateReport {
  Rational delivery_rate;  ///< S/F
  Rational memory_ratio;   ///< Z/F = M/N
};

RateReport rate(const Pda& p);

/// A (K, M, N) caching system.
struct SystemParams {
  std::size_t k_users = 1;
  std::size_t cache_size = 0;    ///< M, in files
  std::size_t library_size = 1;  ///< N, in files

  /// Throws InvalidParameter if K < 1, N < 1 or M > N.
  void validate() const;
  /// t = K*M/N when it is an integer.
  std::optional<std::size_t> mn_t() const;
};

/// Binomial coefficient; throws InvalidParameter on overflow.
std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace pdanet
