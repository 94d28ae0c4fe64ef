#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "stodom/common.hpp"

namespace stodom {

// A 0/1 configuration as an explicit site sequence. Site i of a mask-encoded
// configuration is bit i (site 0 = least significant). For rectangular
// windows the scan order is the raster order: left to right along the bottom
// row first, then upwards row by row.
using BitConfig = std::vector<std::uint8_t>;

inline BitConfig config_from_mask(std::uint32_t mask, int n) {
  BitConfig c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
  return c;
}

inline std::uint32_t mask_from_config(const BitConfig& c) {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i]) m |= (1u << i);
  return m;
}

// Coordinatewise partial order x <= y.
inline bool config_leq(const BitConfig& x, const BitConfig& y) {
  if (x.size() != y.size()) throw param_error("config_leq: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > y[i]) return false;
  return true;
}

inline int raster_index(int x, int y, int width) { return y * width + x; }

// Probability assignment on {0,1}^n, indexed by configuration mask.
struct FiniteMeasure {
  int n = 0;
  std::vector<double> weights;  // size 2^n, index = mask

  FiniteMeasure() = default;
  FiniteMeasure(int n_sites, std::vector<double> w) : n(n_sites), weights(std::move(w)) {
    validate();
  }

  std::size_t size() const { return weights.size(); }

  void validate() const {
    if (n < 1) throw param_error("FiniteMeasure: n must be >= 1");
    if (n > 20) throw size_error("FiniteMeasure: n > 20 not supported");
    if (weights.size() != (std::size_t{1} << n))
      throw param_error("FiniteMeasure: weight vector must have 2^n entries");
    double s = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw param_error("FiniteMeasure: negative weight");
      s += w;
    }
    if (std::abs(s - 1.0) > kWeightTol)
      throw param_error("FiniteMeasure: weights must sum to 1 within 1e-12");
  }
};

// Product measure with density rho: the configuration with k ones has weight
// rho^k (1-rho)^(n-k).
inline FiniteMeasure product_measure(int n, double rho) {
  if (n < 1 || n > 20) throw param_error("product_measure: n must be in [1,20]");
  if (!(rho >= 0.0 && rho <= 1.0)) throw param_error("product_measure: rho must be in [0,1]");
  std::vector<double> w(std::size_t{1} << n);
  for (std::uint32_t m = 0; m < w.size(); ++m) {
    const int k = popcount32(m);
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= rho;
    for (int i = 0; i < n - k; ++i) v *= 1.0 - rho;
    w[m] = v;
  }
  return FiniteMeasure(n, std::move(w));
}

inline void to_json(nlohmann::json& j, const FiniteMeasure& m) {
  j = nlohmann::json{{"n", m.n}, {"weights", m.weights}};
}

inline void from_json(const nlohmann::json& j, FiniteMeasure& m) {
  m.n = j.at("n").get<int>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.validate();
}

}  // namespace stodom
