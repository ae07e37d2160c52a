#include "pdanet/placement.hpp"

#include "pdanet/error.hpp"
#include "pdanet/pda.hpp"

namespace pdanet {

StarPattern mn_star_pattern(std::size_t k_users, std::size_t t) {
  const Pda p = construct_mn_pda(k_users, t);
  StarPattern stars(k_users);
  for (std::size_t k = 0; k < k_users; ++k) {
    for (std::size_t j = 0; j < p.f(); ++j) {
      if (p.at(j, k).is_star()) stars[k].push_back(j);
    }
  }
  return stars;
}

StarPattern cyclic_star_pattern(std::size_t k_users, std::size_t f, std::size_t z) {
  if (z > f) throw InvalidParameter("Z must not exceed F");
  StarPattern stars(k_users);
  for (std::size_t k = 0; k < k_users; ++k) {
    for (std::size_t r = 0; r < z; ++r) stars[k].push_back((k * z + r) % f);
  }
  return stars;
}

StarPattern default_star_pattern(std::size_t k_users, std::size_t f, std::size_t z) {
  if (f > 0 && (k_users * z) % f == 0) {
    const std::size_t t = k_users * z / f;
    if (t >= 1 && t + 1 <= k_users && k_users <= 62) {
      bool fits = false;
      try {
        fits = binomial(k_users, t) == f;
      } catch (const InvalidParameter&) {
        fits = false;
      }
      if (fits) return mn_star_pattern(k_users, t);
    }
  }
  return cyclic_star_pattern(k_users, f, z);
}

}  // namespace pdanet
