#pragma once

// PDA text format:
//
//   K F Z S
//   <F lines of K whitespace-separated tokens, each `*` or a decimal color>
//
// The writer emits single spaces and '\n' line endings. The reader accepts any
// horizontal whitespace, tolerates a final newline and rejects anything else
// after the last row.

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>

#include "pdanet/pda.hpp"

namespace pdanet {

/// Header values and the grid as read, before any PDA validation.
struct PdaText {
  std::size_t k = 0;
  std::size_t f = 0;
  std::size_t z = 0;
  std::size_t s = 0;
  Grid grid;
};

/// Throws ParseError with the 1-based position of the first bad token.
/// Non-consecutive colors are renumbered canonically.
PdaText parse_pda_text(std::string_view text);
PdaText read_pda_file(const std::string& path);

/// Validates the parsed grid against its header. Throws InvalidPda.
Pda to_pda(const PdaText& parsed);

std::string format_pda_text(const Pda& p);
std::string format_pda_text(const Grid& g);
void write_pda_file(const std::string& path, const Pda& p);
void write_pda_file(const std::string& path, const Grid& g);

/// Reads a whole file into memory. Throws Error if it cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace pdanet
