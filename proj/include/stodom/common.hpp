#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stodom {

// Absolute tolerance for comparisons that would be exact in real arithmetic
// (weights are products of at most ~20 factors, so error stays far below this).
inline constexpr double kWeightTol = 1e-12;

// Error taxonomy. The CLI maps these to exit codes: param 2, numerical 3,
// hypothesis 4.
struct param_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input exceeds an enforced size guard (memory or combinatorial explosion).
struct size_error : param_error {
  using param_error::param_error;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A precondition of a theorem-backed operation does not hold for the input.
struct hypothesis_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c;
}

inline int popcount32(std::uint32_t x) { return __builtin_popcount(x); }

// x^k by repeated multiplication; keeps boundary cases bit-identical across
// the modules that form the same products.
inline double pow_int(double x, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v *= x;
  return v;
}

}  // namespace stodom
