#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "stodom/common.hpp"
#include "stodom/measure.hpp"
#include "stodom/rng.hpp"

namespace stodom {

// ── Graph substrate ──────────────────────────────────────────────────────────

struct DirectedEdge {
  int target;
  double rate;
};

// Finite contact-process substrate: directed infection edges with rates,
// recovery rate 1 at every site. A susceptible site x becomes infected at the
// sum of the rates of edges u -> x over currently infected u.
struct GraphSpec {
  int vertex_count = 0;
  std::vector<std::vector<DirectedEdge>> out;

  // Segment [lo, hi] of Z; site x sends to x+1 at rate beta*p and to x-1 at
  // rate beta*(1-p), so the symmetric process with parameter lambda is
  // beta = 2*lambda, p = 1/2.
  static GraphSpec z_segment(int lo, int hi, double beta, double p) {
    if (hi < lo) throw param_error("z_segment: empty range");
    if (beta < 0.0 || p < 0.0 || p > 1.0) throw param_error("z_segment: invalid rates");
    GraphSpec g;
    g.vertex_count = hi - lo + 1;
    g.out.resize(static_cast<std::size_t>(g.vertex_count));
    for (int i = 0; i < g.vertex_count; ++i) {
      if (i + 1 < g.vertex_count && beta * p > 0.0) g.out[static_cast<std::size_t>(i)].push_back({i + 1, beta * p});
      if (i - 1 >= 0 && beta * (1.0 - p) > 0.0) g.out[static_cast<std::size_t>(i)].push_back({i - 1, beta * (1.0 - p)});
    }
    return g;
  }

  // Truncated half-line {0,...,len-1} with one-way infection toward 0
  // (site k is infected from k+1 at rate lambda), plus n_star leaf vertices
  // attached to 0, each infected from 0 at rate lambda. Leaves infect nobody.
  // Star vertex j has index len + j.
  static GraphSpec half_line_star(int len, int n_star, double lambda) {
    if (len < 1 || n_star < 0) throw param_error("half_line_star: invalid sizes");
    if (lambda < 0.0) throw param_error("half_line_star: lambda must be >= 0");
    GraphSpec g;
    g.vertex_count = len + n_star;
    g.out.resize(static_cast<std::size_t>(g.vertex_count));
    for (int k = 1; k < len; ++k) g.out[static_cast<std::size_t>(k)].push_back({k - 1, lambda});
    for (int j = 0; j < n_star; ++j) g.out[0].push_back({len + j, lambda});
    return g;
  }

  // Side-L torus in two dimensions, rate lambda per directed edge.
  static GraphSpec torus2d(int side, double lambda) {
    if (side < 2) throw param_error("torus2d: side must be >= 2");
    if (lambda < 0.0) throw param_error("torus2d: lambda must be >= 0");
    GraphSpec g;
    g.vertex_count = side * side;
    g.out.resize(static_cast<std::size_t>(g.vertex_count));
    auto id = [side](int x, int y) { return ((y + side) % side) * side + (x + side) % side; };
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        auto& e = g.out[static_cast<std::size_t>(id(x, y))];
        e.push_back({id(x + 1, y), lambda});
        e.push_back({id(x - 1, y), lambda});
        e.push_back({id(x, y + 1), lambda});
        e.push_back({id(x, y - 1), lambda});
      }
    }
    return g;
  }

  double out_rate(int v) const {
    double s = 0.0;
    for (const auto& e : out[static_cast<std::size_t>(v)]) s += e.rate;
    return s;
  }
};

// ── Trajectory record ────────────────────────────────────────────────────────

enum class EventType { infect, recover };

struct ContactEvent {
  double time;
  int site;
  EventType type;
};

struct Trajectory {
  double horizon = 0.0;
  std::vector<ContactEvent> events;  // state-changing events only
  std::vector<std::pair<double, BitConfig>> snapshots;
  BitConfig final_state;
};

namespace detail {

// Fenwick tree over per-site event weights, used for exact next-event
// selection on arbitrary graphs.
class FenwickRates {
 public:
  explicit FenwickRates(int n) : n_(n), tree_(static_cast<std::size_t>(n) + 1, 0.0) {}

  void add(int i, double delta) {
    for (int k = i + 1; k <= n_; k += k & -k) tree_[static_cast<std::size_t>(k)] += delta;
  }

  double total() const { return prefix(n_); }

  // Largest index with prefix sum <= target; returns (index, residual).
  std::pair<int, double> locate(double target) const {
    int idx = 0;
    int bit = 1;
    while ((bit << 1) <= n_) bit <<= 1;
    for (; bit > 0; bit >>= 1) {
      const int next = idx + bit;
      if (next <= n_ && tree_[static_cast<std::size_t>(next)] <= target) {
        idx = next;
        target -= tree_[static_cast<std::size_t>(next)];
      }
    }
    return {idx, target};  // idx in [0, n), target < weight(idx) up to roundoff
  }

 private:
  double prefix(int k) const {
    double s = 0.0;
    for (; k > 0; k -= k & -k) s += tree_[static_cast<std::size_t>(k)];
    return s;
  }

  int n_;
  std::vector<double> tree_;
};

}  // namespace detail

// ── Exact event-driven simulation (resampled exponential clocks) ─────────────
//
// Every infected site carries weight 1 + out_rate: rate 1 for its recovery
// clock plus the rates of its outgoing infection clocks. Attempted infections
// onto already-infected targets consume an event but change nothing, exactly
// as arrows do in the graphical representation.
class FenwickRunner {
 public:
  explicit FenwickRunner(const GraphSpec& graph)
      : graph_(graph),
        rates_(graph.vertex_count),
        site_weight_(static_cast<std::size_t>(graph.vertex_count)),
        state_(static_cast<std::size_t>(graph.vertex_count), 0) {
    if (graph.vertex_count <= 0) throw param_error("FenwickRunner: empty graph");
    for (int v = 0; v < graph.vertex_count; ++v)
      site_weight_[static_cast<std::size_t>(v)] = 1.0 + graph.out_rate(v);
  }

  void reset(const BitConfig& init) {
    if (static_cast<int>(init.size()) != graph_.vertex_count)
      throw param_error("FenwickRunner: init length must match vertex count");
    for (int v = 0; v < graph_.vertex_count; ++v) {
      if (state_[static_cast<std::size_t>(v)]) rates_.add(v, -site_weight_[static_cast<std::size_t>(v)]);
      state_[static_cast<std::size_t>(v)] = 0;
    }
    infected_ = 0;
    time_ = 0.0;
    for (int v = 0; v < graph_.vertex_count; ++v)
      if (init[static_cast<std::size_t>(v)]) infect(v);
  }

  // Advances to min(t_end, extinction); on_event(time, site, type) observes
  // every state change.
  template <typename OnEvent>
  void run_until(double t_end, Rng& rng, OnEvent&& on_event) {
    while (infected_ > 0 && time_ < t_end) {
      const double total = rates_.total();
      time_ += rng.next_exponential(total);
      if (time_ >= t_end) {
        time_ = t_end;
        return;
      }
      auto [site, residual] = rates_.locate(rng.next_double() * total);
      if (site >= graph_.vertex_count) site = graph_.vertex_count - 1;  // roundoff guard
      if (residual < 1.0) {
        recover(site);
        on_event(time_, site, EventType::recover);
      } else {
        residual -= 1.0;
        int target = -1;
        for (const auto& e : graph_.out[static_cast<std::size_t>(site)]) {
          if (residual < e.rate) {
            target = e.target;
            break;
          }
          residual -= e.rate;
        }
        if (target < 0 && !graph_.out[static_cast<std::size_t>(site)].empty())
          target = graph_.out[static_cast<std::size_t>(site)].back().target;
        if (target >= 0 && !state_[static_cast<std::size_t>(target)]) {
          infect(target);
          on_event(time_, target, EventType::infect);
        }
      }
    }
    if (infected_ == 0 && time_ < t_end) time_ = t_end;  // absorbed
  }

  void run_until(double t_end, Rng& rng) {
    run_until(t_end, rng, [](double, int, EventType) {});
  }

  bool extinct() const { return infected_ == 0; }
  int infected_count() const { return infected_; }
  bool site_infected(int v) const { return state_[static_cast<std::size_t>(v)] != 0; }
  const std::vector<std::uint8_t>& state() const { return state_; }
  double time() const { return time_; }

 private:
  void infect(int v) {
    state_[static_cast<std::size_t>(v)] = 1;
    rates_.add(v, site_weight_[static_cast<std::size_t>(v)]);
    ++infected_;
  }

  void recover(int v) {
    state_[static_cast<std::size_t>(v)] = 0;
    rates_.add(v, -site_weight_[static_cast<std::size_t>(v)]);
    --infected_;
  }

  const GraphSpec& graph_;
  detail::FenwickRates rates_;
  std::vector<double> site_weight_;
  std::vector<std::uint8_t> state_;
  int infected_ = 0;
  double time_ = 0.0;
};

inline Trajectory simulate(const GraphSpec& graph, const BitConfig& init, double horizon,
                           std::uint64_t seed, std::vector<double> snapshot_times = {}) {
  if (!(horizon > 0.0)) throw param_error("simulate: horizon must be positive");
  FenwickRunner runner(graph);
  runner.reset(init);
  std::sort(snapshot_times.begin(), snapshot_times.end());

  Trajectory traj;
  traj.horizon = horizon;
  std::size_t snap_i = 0;

  Rng rng(seed);
  runner.run_until(horizon, rng, [&](double t, int site, EventType type) {
    // Snapshot times inside (previous event, t) see the pre-event state; the
    // runner has already applied the flip, so revert it in the copy.
    if (snap_i < snapshot_times.size() && snapshot_times[snap_i] < t) {
      BitConfig pre(runner.state().begin(), runner.state().end());
      pre[static_cast<std::size_t>(site)] = (type == EventType::infect) ? 0 : 1;
      while (snap_i < snapshot_times.size() && snapshot_times[snap_i] < t) {
        traj.snapshots.emplace_back(snapshot_times[snap_i], pre);
        ++snap_i;
      }
    }
    traj.events.push_back({t, site, type});
  });
  while (snap_i < snapshot_times.size() && snapshot_times[snap_i] <= horizon) {
    traj.snapshots.emplace_back(snapshot_times[snap_i],
                                BitConfig(runner.state().begin(), runner.state().end()));
    ++snap_i;
  }
  traj.final_state.assign(runner.state().begin(), runner.state().end());
  return traj;
}

// ── Fast path for homogeneous out-rates ──────────────────────────────────────
//
// When every site has the same total outgoing rate and the same edge-rate
// split, the next event is a uniform pick among infected sites, which removes
// the tree walk from the hot loop. Targets use -1 for edges leaving the
// substrate (they consume an attempt, as in the infinite-volume process).
class UniformGraphRunner {
 public:
  UniformGraphRunner(int vertex_count, int degree, double out_rate,
                     std::vector<int> targets_flat, std::vector<double> edge_fraction_cum)
      : v_count_(vertex_count),
        degree_(degree),
        out_rate_(out_rate),
        targets_(std::move(targets_flat)),
        frac_cum_(std::move(edge_fraction_cum)),
        state_(static_cast<std::size_t>(vertex_count), 0),
        pos_(static_cast<std::size_t>(vertex_count), -1) {
    if (static_cast<int>(targets_.size()) != vertex_count * degree)
      throw param_error("UniformGraphRunner: bad target table");
    infected_.reserve(static_cast<std::size_t>(vertex_count));
  }

  static UniformGraphRunner segment(int length, double beta, double p) {
    std::vector<int> targets(static_cast<std::size_t>(length) * 2);
    for (int i = 0; i < length; ++i) {
      targets[static_cast<std::size_t>(i) * 2] = (i + 1 < length) ? i + 1 : -1;
      targets[static_cast<std::size_t>(i) * 2 + 1] = (i > 0) ? i - 1 : -1;
    }
    return UniformGraphRunner(length, 2, beta, std::move(targets), {p, 1.0});
  }

  static UniformGraphRunner torus(int side, double lambda) {
    std::vector<int> targets(static_cast<std::size_t>(side) * side * 4);
    auto id = [side](int x, int y) { return ((y + side) % side) * side + (x + side) % side; };
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        const std::size_t base = static_cast<std::size_t>(id(x, y)) * 4;
        targets[base] = id(x + 1, y);
        targets[base + 1] = id(x - 1, y);
        targets[base + 2] = id(x, y + 1);
        targets[base + 3] = id(x, y - 1);
      }
    }
    return UniformGraphRunner(side * side, 4, 4.0 * lambda, std::move(targets),
                              {0.25, 0.5, 0.75, 1.0});
  }

  void reset_to(const std::vector<int>& infected_sites) {
    for (int v : touched_) {
      state_[static_cast<std::size_t>(v)] = 0;
      pos_[static_cast<std::size_t>(v)] = -1;
    }
    touched_.clear();
    infected_.clear();
    time_ = 0.0;
    for (int v : infected_sites) infect(v);
  }

  void reset_all_ones() {
    for (int v : touched_) {
      state_[static_cast<std::size_t>(v)] = 0;
      pos_[static_cast<std::size_t>(v)] = -1;
    }
    touched_.clear();
    infected_.clear();
    time_ = 0.0;
    for (int v = 0; v < v_count_; ++v) infect(v);
  }

  // Advances to min(t_end, extinction). on_infect(site) may return true to
  // abort the run early (used by window monitors); pass nullptr-like lambdas
  // returning false otherwise.
  template <typename OnInfect>
  void run_until(double t_end, Rng& rng, OnInfect&& on_infect) {
    const double site_weight = 1.0 + out_rate_;
    while (!infected_.empty() && time_ < t_end) {
      const double total = static_cast<double>(infected_.size()) * site_weight;
      time_ += rng.next_exponential(total);
      if (time_ >= t_end) {
        time_ = t_end;
        return;
      }
      const int site = infected_[rng.next_below(infected_.size())];
      const double u = rng.next_double() * site_weight;
      if (u < 1.0) {
        recover(site);
      } else {
        const double f = (u - 1.0) / out_rate_;
        int k = 0;
        while (k + 1 < degree_ && f >= frac_cum_[static_cast<std::size_t>(k)]) ++k;
        const int target = targets_[static_cast<std::size_t>(site) * degree_ + k];
        if (target >= 0 && !state_[static_cast<std::size_t>(target)]) {
          infect(target);
          if (on_infect(target)) return;
        }
      }
    }
    if (time_ < t_end && infected_.empty()) time_ = t_end;  // absorbed
  }

  void run_until(double t_end, Rng& rng) {
    run_until(t_end, rng, [](int) { return false; });
  }

  bool extinct() const { return infected_.empty(); }
  int infected_count() const { return static_cast<int>(infected_.size()); }
  bool site_infected(int v) const { return state_[static_cast<std::size_t>(v)] != 0; }
  double time() const { return time_; }
  int vertex_count() const { return v_count_; }

 private:
  void infect(int v) {
    if (state_[static_cast<std::size_t>(v)]) return;
    state_[static_cast<std::size_t>(v)] = 1;
    pos_[static_cast<std::size_t>(v)] = static_cast<int>(infected_.size());
    infected_.push_back(v);
    touched_.push_back(v);
  }

  void recover(int v) {
    const int p = pos_[static_cast<std::size_t>(v)];
    const int last = infected_.back();
    infected_[static_cast<std::size_t>(p)] = last;
    pos_[static_cast<std::size_t>(last)] = p;
    infected_.pop_back();
    pos_[static_cast<std::size_t>(v)] = -1;
    state_[static_cast<std::size_t>(v)] = 0;
  }

  int v_count_;
  int degree_;
  double out_rate_;
  std::vector<int> targets_;
  std::vector<double> frac_cum_;
  std::vector<std::uint8_t> state_;
  std::vector<int> pos_;
  std::vector<int> infected_;
  std::vector<int> touched_;
  double time_ = 0.0;
};

// ── Shared-sheet coupling ─────────────────────────────────────────────────────
//
// Generates one state-independent space-time sheet (recovery marks and arrows
// with attached uniforms) and applies it to several copies at once. Copies may
// thin the arrows by a rate multiplier in (0,1]; with shared uniforms this
// couples different infection rates monotonically.
class SheetCoupling {
 public:
  SheetCoupling(const GraphSpec& graph, std::vector<double> rate_multipliers,
                std::vector<BitConfig> inits)
      : graph_(graph), mult_(std::move(rate_multipliers)) {
    if (mult_.empty() || mult_.size() != inits.size())
      throw param_error("SheetCoupling: need one init per copy");
    for (double m : mult_)
      if (!(m > 0.0 && m <= 1.0)) throw param_error("SheetCoupling: multipliers must be in (0,1]");
    for (auto& init : inits) {
      if (static_cast<int>(init.size()) != graph.vertex_count)
        throw param_error("SheetCoupling: init length mismatch");
      states_.emplace_back(init.begin(), init.end());
    }
    cum_.resize(static_cast<std::size_t>(graph.vertex_count));
    double acc = 0.0;
    for (int v = 0; v < graph.vertex_count; ++v) {
      acc += 1.0 + graph.out_rate(v);
      cum_[static_cast<std::size_t>(v)] = acc;
    }
  }

  // Advances the sheet by `duration`; on_event(copy_states) runs after every
  // sheet event (including no-ops).
  template <typename OnEvent>
  void run(double duration, std::uint64_t seed, OnEvent&& on_event) {
    Rng rng(seed);
    const double total = cum_.back();
    double t = 0.0;
    while (true) {
      t += rng.next_exponential(total);
      if (t >= duration) break;
      const double pick = rng.next_double() * total;
      const int site = static_cast<int>(std::lower_bound(cum_.begin(), cum_.end(), pick) - cum_.begin());
      double residual = pick - (site > 0 ? cum_[static_cast<std::size_t>(site) - 1] : 0.0);
      if (residual < 1.0) {
        for (auto& s : states_) s[static_cast<std::size_t>(site)] = 0;
      } else {
        residual -= 1.0;
        int target = -1;
        for (const auto& e : graph_.out[static_cast<std::size_t>(site)]) {
          if (residual < e.rate) {
            target = e.target;
            break;
          }
          residual -= e.rate;
        }
        if (target >= 0) {
          const double thin = rng.next_double();
          for (std::size_t k = 0; k < states_.size(); ++k) {
            if (thin < mult_[k] && states_[k][static_cast<std::size_t>(site)])
              states_[k][static_cast<std::size_t>(target)] = 1;
          }
        }
      }
      on_event(states_);
    }
  }

  void run(double duration, std::uint64_t seed) {
    run(duration, seed, [](const std::vector<std::vector<std::uint8_t>>&) {});
  }

  const std::vector<std::uint8_t>& state(std::size_t copy) const { return states_[copy]; }

 private:
  const GraphSpec& graph_;
  std::vector<double> mult_;
  std::vector<std::vector<std::uint8_t>> states_;
  std::vector<double> cum_;
};

}  // namespace stodom
