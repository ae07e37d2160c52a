#pragma once

// Star patterns (which packets each user caches) used to seed the coloring
// pipeline. Each returns, per column, the 0-based star rows.

#include <cstddef>
#include <vector>

namespace pdanet {

using StarPattern = std::vector<std::vector<std::size_t>>;

/// Column k caches the t-subsets containing k: the Maddah-Ali--Niesen placement
/// with F = C(K, t) rows in lexicographic order.
StarPattern mn_star_pattern(std::size_t k_users, std::size_t t);

/// Column k caches rows (k*Z + r) mod F for r < Z, which spreads stars evenly
/// over rows.
StarPattern cyclic_star_pattern(std::size_t k_users, std::size_t f, std::size_t z);

/// The MN pattern when t = KZ/F is an integer in [1, K-1] and F = C(K, t);
/// the cyclic pattern otherwise.
StarPattern default_star_pattern(std::size_t k_users, std::size_t f, std::size_t z);

}  // namespace pdanet
