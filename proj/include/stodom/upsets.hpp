#pragma once

#include <cstdint>
#include <vector>

#include "stodom/common.hpp"

namespace stodom {

// Family of up-sets of {0,1}^n. Each member is a bitmask over the 2^n
// configurations: configuration mask c belongs to member U iff bit c of U is
// set. Requires n <= 5 so that members fit in 32 bits.
struct UpSetFamily {
  int n = 0;
  std::vector<std::uint32_t> sets;
};

inline bool is_up_set(std::uint32_t member, int n) {
  const std::uint32_t nconf = 1u << n;
  for (std::uint32_t c = 0; c < nconf; ++c) {
    if (!((member >> c) & 1u)) continue;
    for (int i = 0; i < n; ++i) {
      const std::uint32_t up = c | (1u << i);
      if (up != c && !((member >> up) & 1u)) return false;
    }
  }
  return true;
}

namespace detail {

// Extends a partial membership decision over configurations processed in
// decreasing mask order. All strict supersets of c are numerically larger
// than c, so they are already decided when c is reached; c may join the
// up-set only if its immediate supersets are all in.
inline void extend_up_sets(int n, std::uint32_t c_plus_one, std::uint32_t member,
                           std::vector<std::uint32_t>& out) {
  if (c_plus_one == 0) {
    out.push_back(member);
    return;
  }
  const std::uint32_t c = c_plus_one - 1;
  extend_up_sets(n, c, member, out);  // c stays out
  bool closed = true;
  for (int i = 0; i < n && closed; ++i) {
    const std::uint32_t up = c | (1u << i);
    if (up != c && !((member >> up) & 1u)) closed = false;
  }
  if (closed) extend_up_sets(n, c, member | (1u << c), out);
}

}  // namespace detail

// Complete family of up-sets of {0,1}^n, including the empty set and the full
// set. The family size is the Dedekind number for n.
inline UpSetFamily enumerate_up_sets(int n) {
  if (n < 1) throw param_error("enumerate_up_sets: n must be >= 1");
  if (n > 5) throw size_error("enumerate_up_sets: n > 5 (family too large)");
  UpSetFamily fam;
  fam.n = n;
  detail::extend_up_sets(n, 1u << n, 0u, fam.sets);
  return fam;
}

}  // namespace stodom
