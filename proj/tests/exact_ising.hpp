#pragma once

#include <cmath>
#include <vector>

#include "stodom/ising_lattice.hpp"

namespace stodom_test {

// Exact Boltzmann law of the 3x3 interior with a fixed boundary ring:
// weight ~ exp(J sum sigma_x sigma_y) over all nearest-neighbour pairs with
// at least one interior endpoint. Interior state index packs raster-order
// spins as bits (1 = up). Independent of the heat-bath implementation.
inline std::vector<double> boltzmann_3x3(double coupling, stodom::Boundary boundary) {
  const int b = boundary == stodom::Boundary::plus ? 1 : -1;
  std::vector<double> w(512);
  double total = 0.0;
  for (int state = 0; state < 512; ++state) {
    auto spin = [&](int x, int y) {  // 0-based over the 5x5 grid incl. ring
      if (x < 1 || x > 3 || y < 1 || y > 3) return b;
      const int bit = (y - 1) * 3 + (x - 1);
      return ((state >> bit) & 1) ? 1 : -1;
    };
    double energy = 0.0;
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 5; ++x) {
        const bool interior = x >= 1 && x <= 3 && y >= 1 && y <= 3;
        if (x + 1 < 5) {
          const bool other = x + 1 >= 1 && x + 1 <= 3 && y >= 1 && y <= 3;
          if (interior || other) energy += spin(x, y) * spin(x + 1, y);
        }
        if (y + 1 < 5) {
          const bool other = x >= 1 && x <= 3 && y + 1 >= 1 && y + 1 <= 3;
          if (interior || other) energy += spin(x, y) * spin(x, y + 1);
        }
      }
    }
    w[static_cast<std::size_t>(state)] = std::exp(coupling * energy);
    total += w[static_cast<std::size_t>(state)];
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace stodom_test
