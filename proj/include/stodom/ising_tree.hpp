#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "stodom/common.hpp"
#include "stodom/measure.hpp"
#include "stodom/rng.hpp"

namespace stodom {

// Transition matrix of a 2-state tree-indexed Markov chain, stored by its
// independent entries p01 = P(0,1) and p11 = P(1,1).
struct TreeChainMatrix {
  double p01 = 0.0;
  double p11 = 0.0;

  double p00() const { return 1.0 - p01; }
  double p10() const { return 1.0 - p11; }
  bool monotone() const { return p01 <= p11 + kWeightTol; }

  // Stationary distribution; 2-state chains are reversible so detailed
  // balance pi(0) p01 = pi(1) p10 pins it.
  double pi0() const {
    const double denom = p01 + p10();
    if (denom <= 0.0) throw numerical_error("TreeChainMatrix: reducible chain has no unique pi");
    return p10() / denom;
  }
  double pi1() const { return 1.0 - pi0(); }
};

inline double log_cosh(double x) {
  const double a = std::abs(x);
  if (a > 20.0) return a - std::log(2.0) + std::log1p(std::exp(-2.0 * a));
  return std::log(std::cosh(x));
}

// Recursion function for the root field on the degree-3 tree:
// f_J(t) = log[cosh(J+t)/cosh(t-J)]. Odd in t, slope 2 tanh J at the origin.
inline double f_eval(double j, double t) { return log_cosh(j + t) - log_cosh(t - j); }

inline double tree_critical_j() { return std::atanh(0.5); }  // = (1/2) log 3

struct FixedPointResult {
  double j = 0.0;
  double t = 0.0;
  double residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

// Positive fixed point t_J of f_J. Returns exactly 0 for J <= J_c so that the
// three Gibbs matrices coincide bitwise there. Above J_c, f_J is concave on
// [0, inf) and crosses the diagonal once from above; since f_J <= 2J the
// bracket [tiny, J+10] always contains the crossing.
inline FixedPointResult solve_t(double j) {
  if (j < 0.0) throw param_error("solve_t: J must be >= 0");
  if (j <= tree_critical_j()) return {j, 0.0, 0.0, 0.0, 0.0};
  double lo = 1e-9;
  double hi = j + 10.0;
  if (f_eval(j, lo) - lo <= 0.0 || f_eval(j, hi) - hi >= 0.0)
    throw numerical_error("solve_t: bracket does not straddle the fixed point");
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f_eval(j, mid) - mid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double t = 0.5 * (lo + hi);
  const double residual = std::abs(f_eval(j, t) - t);
  if (residual > 1e-12) throw numerical_error("solve_t: bisection residual above 1e-12");
  return {j, t, residual, lo, hi};
}

struct ChainTriple {
  TreeChainMatrix plus;
  TreeChainMatrix minus;
  TreeChainMatrix free;
};

// The plus, minus and free Gibbs states on the degree-3 tree as tree-indexed
// chains. All three coincide for J <= J_c and are strictly ordered in P(0,1)
// when t_J > 0.
inline ChainTriple chain_matrices(double j) {
  if (j < 0.0) throw param_error("chain_matrices: J must be >= 0");
  const double t = solve_t(j).t;
  ChainTriple out;
  out.plus.p01 = std::exp(t - j) / (2.0 * std::cosh(j - t));
  out.plus.p11 = std::exp(j + t) / (2.0 * std::cosh(j + t));
  out.minus.p01 = std::exp(-t - j) / (2.0 * std::cosh(j + t));
  out.minus.p11 = std::exp(j - t) / (2.0 * std::cosh(j - t));
  out.free.p01 = std::exp(-j) / (2.0 * std::cosh(j));
  out.free.p11 = std::exp(j) / (2.0 * std::cosh(j));
  return out;
}

// Supremum of product densities dominated by the tree-indexed chain: P(0,1).
inline double max_product_density(const TreeChainMatrix& p) {
  if (!p.monotone()) throw hypothesis_error("max_product_density: matrix must satisfy P(0,1) <= P(1,1)");
  return p.p01;
}

// Domination between two tree-indexed chains: both entry inequalities.
inline bool chain_dominates(const TreeChainMatrix& p, const TreeChainMatrix& q) {
  if (!p.monotone() || !q.monotone())
    throw hypothesis_error("chain_dominates: matrices must be monotone");
  return p.p01 >= q.p01 - kWeightTol && p.p11 >= q.p11 - kWeightTol;
}

// Threshold coupling strength: the plus state at J2 dominates the (unique)
// state at subcritical J1 exactly when J1 >= alpha(J2) = J2 - t_{J2}.
inline double alpha(double j2) {
  if (j2 < tree_critical_j() - 1e-12) throw param_error("alpha: J2 must be >= J_c");
  const double a = j2 - solve_t(j2).t;
  const double jc = tree_critical_j();
  return a < 0.0 ? 0.0 : (a > jc ? jc : a);
}

// Ball of radius n in the degree-3 tree, breadth-first order: the root has
// three children, every later interior vertex two. |V(T_n)| = 3*2^n - 2.
struct TreeBall {
  int depth = 0;
  std::vector<int> parent;  // parent[0] = -1 for the root
};

inline TreeBall tree_ball(int depth) {
  if (depth < 0 || depth > 12) throw size_error("tree_ball: depth must be in [0,12]");
  TreeBall ball;
  ball.depth = depth;
  ball.parent.push_back(-1);
  std::vector<int> frontier{0};
  for (int level = 1; level <= depth; ++level) {
    std::vector<int> next;
    for (int v : frontier) {
      const int kids = (v == 0) ? 3 : 2;
      for (int k = 0; k < kids; ++k) {
        ball.parent.push_back(v);
        next.push_back(static_cast<int>(ball.parent.size()) - 1);
      }
    }
    frontier = std::move(next);
  }
  return ball;
}

// Root from pi, then outward along edges by P, in breadth-first order.
inline BitConfig sample_tree_chain(const TreeChainMatrix& p, int depth, std::uint64_t seed) {
  const TreeBall ball = tree_ball(depth);
  Rng rng(seed);
  BitConfig config(ball.parent.size());
  config[0] = rng.next_double() < p.pi1() ? 1 : 0;
  for (std::size_t v = 1; v < ball.parent.size(); ++v) {
    const double p1 = config[static_cast<std::size_t>(ball.parent[v])] ? p.p11 : p.p01;
    config[v] = rng.next_double() < p1 ? 1 : 0;
  }
  return config;
}

inline double all_zero_prob_closed_form(const TreeChainMatrix& p, int depth) {
  const TreeBall ball = tree_ball(depth);
  return p.pi0() * pow_int(p.p00(), static_cast<int>(ball.parent.size()) - 1);
}

// Exact joint law of the chain on T_depth as a FiniteMeasure (depth <= 2 keeps
// the site count within the exact-oracle range).
inline FiniteMeasure expand_tree_chain(const TreeChainMatrix& p, int depth) {
  const TreeBall ball = tree_ball(depth);
  const int n = static_cast<int>(ball.parent.size());
  if (n > 20) throw size_error("expand_tree_chain: too many vertices");
  std::vector<double> w(std::size_t{1} << n);
  for (std::uint32_t m = 0; m < w.size(); ++m) {
    double v = (m & 1u) ? p.pi1() : p.pi0();
    for (int x = 1; x < n; ++x) {
      const bool parent_one = (m >> ball.parent[static_cast<std::size_t>(x)]) & 1u;
      const bool self_one = (m >> x) & 1u;
      const double edge = parent_one ? (self_one ? p.p11 : p.p10()) : (self_one ? p.p01 : p.p00());
      v *= edge;
    }
    w[m] = v;
  }
  return FiniteMeasure(n, std::move(w));
}

}  // namespace stodom
