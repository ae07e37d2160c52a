#include "pdanet/pda.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "pdanet/error.hpp"

namespace pdanet {

Entry Entry::color(int s) {
  if (s < 1) throw InvalidParameter("color must be >= 1, got " + std::to_string(s));
  Entry e;
  e.value_ = s;
  return e;
}

Grid::Grid(std::size_t rows, std::size_t cols, Entry fill)
    : rows_(rows), cols_(cols), cells_(rows * cols, fill) {}

Grid Grid::from_rows(const std::vector<std::vector<int>>& rows) {
  const std::size_t width = rows.empty() ? 0 : rows.front().size();
  Grid g(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) {
      throw MalformedGrid("row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                          " entries, expected " + std::to_string(width));
    }
    for (std::size_t j = 0; j < width; ++j) {
      const int v = rows[i][j];
      if (v < 0) throw MalformedGrid("negative entry at row " + std::to_string(i + 1));
      g.at(i, j) = v == 0 ? Entry::star() : Entry::color(v);
    }
  }
  return g;
}

Grid Grid::from_rows(std::initializer_list<std::initializer_list<int>> rows) {
  std::vector<std::vector<int>> nested;
  nested.reserve(rows.size());
  for (const auto& r : rows) nested.emplace_back(r);
  return from_rows(nested);
}

std::size_t Grid::stars_in_column(std::size_t col) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < rows_; ++i) n += at(i, col).is_star() ? 1 : 0;
  return n;
}

int Grid::max_color() const {
  int m = 0;
  for (const Entry& e : cells_) m = std::max(m, e.value());
  return m;
}

std::size_t Grid::distinct_colors() const {
  std::vector<int> seen;
  for (const Entry& e : cells_) {
    if (e.is_color()) seen.push_back(e.value());
  }
  std::sort(seen.begin(), seen.end());
  return static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

bool Grid::colors_consecutive() const {
  return static_cast<std::size_t>(max_color()) == distinct_colors();
}

std::vector<std::vector<int>> Grid::to_rows() const {
  std::vector<std::vector<int>> out(rows_, std::vector<int>(cols_));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out[i][j] = at(i, j).value();
  }
  return out;
}

Grid canonicalize(const Grid& grid) {
  Grid out = grid;
  std::unordered_map<int, int> relabel;
  int next = 1;
  for (std::size_t j = 0; j < grid.cols(); ++j) {
    for (std::size_t i = 0; i < grid.rows(); ++i) {
      const Entry e = grid.at(i, j);
      if (e.is_star()) continue;
      auto [it, fresh] = relabel.try_emplace(e.value(), next);
      if (fresh) ++next;
      out.at(i, j) = Entry::color(it->second);
    }
  }
  return out;
}

std::string to_string(Condition c) {
  switch (c) {
    case Condition::C1: return "C1";
    case Condition::C2a: return "C2a";
    case Condition::C2b: return "C2b";
    case Condition::S: return "S";
  }
  return "?";
}

std::string VerifyReport::str() const {
  std::ostringstream os;
  os << (valid ? "valid" : "invalid") << " Z=" << z << " S=" << s << '\n';
  for (const Violation& v : violations) {
    os << to_string(v.condition);
    for (const Cell& c : v.cells) os << " (" << c.row + 1 << ',' << c.col + 1 << ')';
    if (!v.detail.empty()) os << ": " << v.detail;
    os << '\n';
  }
  return os.str();
}

VerifyReport verify(const Grid& grid, std::optional<std::size_t> declared_z,
                    std::optional<std::size_t> declared_s) {
  VerifyReport report;
  const std::size_t rows = grid.rows();
  const std::size_t cols = grid.cols();
  report.z = declared_z.value_or(cols > 0 ? grid.stars_in_column(0) : 0);
  report.s = grid.distinct_colors();

  if (report.z > rows) {
    report.violations.push_back(
        {Condition::C1, {}, "Z=" + std::to_string(report.z) + " exceeds F=" + std::to_string(rows)});
  }
  for (std::size_t j = 0; j < cols; ++j) {
    const std::size_t n = grid.stars_in_column(j);
    if (n != report.z) {
      report.violations.push_back({Condition::C1,
                                   {Cell{0, j}},
                                   "column has " + std::to_string(n) + " stars, expected " +
                                       std::to_string(report.z)});
    }
  }

  if (declared_s) {
    const int max_color = grid.max_color();
    if (report.s != *declared_s || static_cast<std::size_t>(max_color) != *declared_s) {
      Violation v{Condition::S, {}, "colors present: " + std::to_string(report.s) + " distinct, max " +
                                        std::to_string(max_color) + "; declared S=" +
                                        std::to_string(*declared_s)};
      for (std::size_t i = 0; i < rows && v.cells.empty(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
          if (static_cast<std::size_t>(grid.at(i, j).value()) > *declared_s) {
            v.cells.push_back({i, j});
            break;
          }
        }
      }
      report.violations.push_back(std::move(v));
    }
  }

  // Bucket cells by color, then check every pair inside a bucket.
  std::unordered_map<int, std::vector<Cell>> buckets;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const Entry e = grid.at(i, j);
      if (e.is_color()) buckets[e.value()].push_back({i, j});
    }
  }
  std::vector<int> colors;
  colors.reserve(buckets.size());
  for (const auto& [s, cells] : buckets) colors.push_back(s);
  std::sort(colors.begin(), colors.end());

  for (int s : colors) {
    const auto& cells = buckets[s];
    for (std::size_t a = 0; a < cells.size(); ++a) {
      for (std::size_t b = a + 1; b < cells.size(); ++b) {
        const Cell p = cells[a];
        const Cell q = cells[b];
        if (p.row == q.row || p.col == q.col) {
          report.violations.push_back(
              {Condition::C2a, {p, q}, "color " + std::to_string(s) + " repeats in a row or column"});
        } else if (grid.at(p.row, q.col).is_color() || grid.at(q.row, p.col).is_color()) {
          report.violations.push_back(
              {Condition::C2b, {p, q}, "color " + std::to_string(s) + " has a non-star cross cell"});
        }
      }
    }
  }

  report.valid = report.violations.empty();
  return report;
}

Pda Pda::from_grid(const Grid& grid, std::optional<std::size_t> declared_z) {
  Grid g = grid.colors_consecutive() ? grid : canonicalize(grid);
  VerifyReport report = verify(g, declared_z);
  if (!report.valid) throw InvalidPda("not a PDA:\n" + report.str());
  return Pda(std::move(g), report.z, report.s);
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    if (r > std::numeric_limits<std::uint64_t>::max() / num) {
      throw InvalidParameter("binomial coefficient overflow");
    }
    r = r * num / i;
  }
  return static_cast<std::size_t>(r);
}

namespace {

/// All size-t subsets of {0..n-1} as bitmasks, in lexicographic order of their
/// sorted element lists.
std::vector<std::uint64_t> lex_subsets(std::size_t n, std::size_t t) {
  std::vector<std::uint64_t> out;
  std::vector<std::size_t> idx(t);
  for (std::size_t i = 0; i < t; ++i) idx[i] = i;
  while (true) {
    std::uint64_t mask = 0;
    for (std::size_t v : idx) mask |= std::uint64_t{1} << v;
    out.push_back(mask);
    std::size_t pos = t;
    while (pos > 0 && idx[pos - 1] == n - t + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t i = pos; i < t; ++i) idx[i] = idx[i - 1] + 1;
  }
  return out;
}

}  // namespace

Pda construct_mn_pda(std::size_t k_users, std::size_t t) {
  if (k_users < 2 || t < 1 || t + 1 > k_users) {
    throw InvalidParameter("construct_mn_pda needs 1 <= t <= K-1, got K=" + std::to_string(k_users) +
                           " t=" + std::to_string(t));
  }
  if (k_users > 62) throw InvalidParameter("construct_mn_pda supports K <= 62");
  // Cap the array size well before allocation becomes a problem.
  const std::size_t f = binomial(k_users, t);
  if (f > (std::size_t{1} << 22) / k_users) throw InvalidParameter("MN array too large");

  const auto rows = lex_subsets(k_users, t);
  const auto blocks = lex_subsets(k_users, t + 1);
  std::unordered_map<std::uint64_t, int> color_of;
  color_of.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) color_of.emplace(blocks[i], static_cast<int>(i + 1));

  Grid g(rows.size(), k_users);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < k_users; ++k) {
      const std::uint64_t bit = std::uint64_t{1} << k;
      if ((rows[i] & bit) == 0) g.at(i, k) = Entry::color(color_of.at(rows[i] | bit));
    }
  }
  return Pda::from_grid(g);
}

RateReport rate(const Pda& p) {
  const auto f = static_cast<std::int64_t>(p.f());
  if (f == 0) return {Rational(0, 1), Rational(0, 1)};
  return {Rational(static_cast<std::int64_t>(p.s()), f), Rational(static_cast<std::int64_t>(p.z()), f)};
}

void SystemParams::validate() const {
  if (k_users < 1) throw InvalidParameter("K must be >= 1");
  if (library_size < 1) throw InvalidParameter("N must be >= 1");
  if (cache_size > library_size) throw InvalidParameter("M must not exceed N");
}

std::optional<std::size_t> SystemParams::mn_t() const {
  if (library_size == 0 || (k_users * cache_size) % library_size != 0) return std::nullopt;
  return k_users * cache_size / library_size;
}

}  // namespace pdanet
