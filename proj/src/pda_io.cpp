#include "pdanet/pda_io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "pdanet/error.hpp"

namespace pdanet {

namespace {

struct Token {
  std::string_view text;
  std::size_t line;
  std::size_t column;
};

/// Splits the input into lines of tokens, keeping 1-based positions.
std::vector<std::vector<Token>> tokenize(std::string_view text) {
  std::vector<std::vector<Token>> lines;
  std::size_t line = 1;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view row = text.substr(pos, end - pos);
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < row.size()) {
      while (i < row.size() && (row[i] == ' ' || row[i] == '\t')) ++i;
      if (i >= row.size()) break;
      const std::size_t start = i;
      while (i < row.size() && row[i] != ' ' && row[i] != '\t') ++i;
      tokens.push_back({row.substr(start, i - start), line, start + 1});
    }
    lines.push_back(std::move(tokens));
    ++line;
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

std::size_t parse_count(const Token& tok, const char* what) {
  std::size_t v = 0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(std::string("expected ") + what + ", got '" + std::string(tok.text) + "'", tok.line,
                     tok.column);
  }
  return v;
}

}  // namespace

PdaText parse_pda_text(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty() || lines[0].empty()) throw ParseError("missing header 'K F Z S'", 1, 1);
  const auto& header = lines[0];
  if (header.size() != 4) {
    const Token& t = header.size() > 4 ? header[4] : header.back();
    throw ParseError("header must hold exactly 4 integers K F Z S", t.line, t.column);
  }
  PdaText out;
  out.k = parse_count(header[0], "K");
  out.f = parse_count(header[1], "F");
  out.z = parse_count(header[2], "Z");
  out.s = parse_count(header[3], "S");
  if (out.k == 0) throw ParseError("K must be >= 1", header[0].line, header[0].column);
  if (out.z > out.f) throw ParseError("Z must not exceed F", header[2].line, header[2].column);

  std::vector<std::vector<int>> rows;
  rows.reserve(out.f);
  for (std::size_t r = 0; r < out.f; ++r) {
    const std::size_t li = r + 1;
    if (li >= lines.size()) {
      throw ParseError("expected " + std::to_string(out.f) + " rows, found " + std::to_string(r), li + 1, 1);
    }
    const auto& toks = lines[li];
    if (toks.size() != out.k) {
      const std::size_t col = toks.size() > out.k ? toks[out.k].column : (toks.empty() ? 1 : toks.back().column);
      throw ParseError("row " + std::to_string(r + 1) + " has " + std::to_string(toks.size()) +
                           " entries, expected " + std::to_string(out.k),
                       li + 1, col);
    }
    std::vector<int> row;
    row.reserve(out.k);
    for (const Token& t : toks) {
      if (t.text == "*") {
        row.push_back(0);
        continue;
      }
      int v = 0;
      const char* first = t.text.data();
      const char* last = first + t.text.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{} || ptr != last || v < 1) {
        throw ParseError("expected '*' or a positive integer, got '" + std::string(t.text) + "'", t.line,
                         t.column);
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  for (std::size_t li = out.f + 1; li < lines.size(); ++li) {
    if (!lines[li].empty()) {
      throw ParseError("trailing data after the last row", lines[li][0].line, lines[li][0].column);
    }
  }
  // A single trailing newline yields one empty line; more blank lines are garbage too.
  if (lines.size() > out.f + 2) throw ParseError("trailing blank lines", out.f + 3, 1);

  out.grid = rows.empty() ? Grid(0, out.k) : Grid::from_rows(rows);
  if (!out.grid.colors_consecutive()) out.grid = canonicalize(out.grid);
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed for '" + path + "'");
}

PdaText read_pda_file(const std::string& path) { return parse_pda_text(read_text_file(path)); }

Pda to_pda(const PdaText& parsed) {
  const VerifyReport report = verify(parsed.grid, parsed.z, parsed.s);
  if (!report.valid) throw InvalidPda("not a PDA:\n" + report.str());
  return Pda::from_grid(parsed.grid, parsed.z);
}

std::string format_pda_text(const Grid& g) {
  std::ostringstream os;
  const std::size_t z = g.cols() > 0 ? g.stars_in_column(0) : 0;
  os << g.cols() << ' ' << g.rows() << ' ' << z << ' ' << g.distinct_colors() << '\n';
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      if (j > 0) os << ' ';
      const Entry e = g.at(i, j);
      if (e.is_star()) {
        os << '*';
      } else {
        os << e.value();
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string format_pda_text(const Pda& p) { return format_pda_text(p.grid()); }

void write_pda_file(const std::string& path, const Pda& p) { write_text_file(path, format_pda_text(p)); }
void write_pda_file(const std::string& path, const Grid& g) { write_text_file(path, format_pda_text(g)); }

}  // namespace pdanet
