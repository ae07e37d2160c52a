#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdanet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PDANET_DEFINE_ERROR(Name)        \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

// pda
PDANET_DEFINE_ERROR(MalformedGrid);
PDANET_DEFINE_ERROR(InvalidParameter);
PDANET_DEFINE_ERROR(InvalidPda);

// graph
PDANET_DEFINE_ERROR(DegreeViolation);
PDANET_DEFINE_ERROR(ColoringViolation);
PDANET_DEFINE_ERROR(IncompleteColoring);

// seqcodec
PDANET_DEFINE_ERROR(InvalidPlacement);
PDANET_DEFINE_ERROR(LengthMismatch);

// neural
PDANET_DEFINE_ERROR(ShapeError);
PDANET_DEFINE_ERROR(VocabularyError);
PDANET_DEFINE_ERROR(NoFeasibleAction);
PDANET_DEFINE_ERROR(InvalidPointer);
PDANET_DEFINE_ERROR(BadTarget);
PDANET_DEFINE_ERROR(InvalidBatch);

// cachesim
PDANET_DEFINE_ERROR(DimensionError);
PDANET_DEFINE_ERROR(DecodeError);

#undef PDANET_DEFINE_ERROR

/// Text or JSON input that could not be parsed. Positions are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace pdanet
