#pragma once

#include <string>

#include "pdanet/neural.hpp"

namespace pdanet::neural {

inline constexpr int kCheckpointVersion = 1;

/// JSON container: format tag, version, model config and every tensor with
/// its shape. Doubles are written with round-trip precision.
std::string format_checkpoint(const ModelParams& params);
/// Throws ParseError on malformed input and ShapeError on shape mismatches.
ModelParams parse_checkpoint(const std::string& text);

void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

}  // namespace pdanet::neural
