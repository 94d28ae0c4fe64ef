#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace stodom {

// Dinic max-flow on integer capacities. Small and dense-friendly; used for
// monotone-coupling feasibility where the graph has <= 2^13 nodes.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : n_(n), adj_(static_cast<std::size_t>(n)) {}

  void add_edge(int from, int to, std::int64_t capacity) {
    adj_[static_cast<std::size_t>(from)].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({to, capacity});
    adj_[static_cast<std::size_t>(to)].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({from, 0});
  }

  std::int64_t run(int source, int sink) {
    std::int64_t flow = 0;
    while (bfs(source, sink)) {
      iter_.assign(static_cast<std::size_t>(n_), 0);
      std::int64_t f;
      while ((f = dfs(source, sink, std::numeric_limits<std::int64_t>::max())) > 0) flow += f;
    }
    return flow;
  }

 private:
  struct Edge {
    int to;
    std::int64_t cap;
  };

  bool bfs(int source, int sink) {
    level_.assign(static_cast<std::size_t>(n_), -1);
    queue_.clear();
    queue_.push_back(source);
    level_[static_cast<std::size_t>(source)] = 0;
    for (std::size_t qi = 0; qi < queue_.size(); ++qi) {
      const int v = queue_[qi];
      for (int id : adj_[static_cast<std::size_t>(v)]) {
        const Edge& e = edges_[static_cast<std::size_t>(id)];
        if (e.cap > 0 && level_[static_cast<std::size_t>(e.to)] < 0) {
          level_[static_cast<std::size_t>(e.to)] = level_[static_cast<std::size_t>(v)] + 1;
          queue_.push_back(e.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(sink)] >= 0;
  }

  std::int64_t dfs(int v, int sink, std::int64_t limit) {
    if (v == sink) return limit;
    for (int& i = iter_[static_cast<std::size_t>(v)];
         i < static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); ++i) {
      const int id = adj_[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)];
      Edge& e = edges_[static_cast<std::size_t>(id)];
      if (e.cap <= 0 || level_[static_cast<std::size_t>(e.to)] != level_[static_cast<std::size_t>(v)] + 1)
        continue;
      const std::int64_t got = dfs(e.to, sink, std::min(limit, e.cap));
      if (got > 0) {
        e.cap -= got;
        edges_[static_cast<std::size_t>(id ^ 1)].cap += got;
        return got;
      }
    }
    return 0;
  }

  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> level_;
  std::vector<int> iter_;
  std::vector<int> queue_;
};

}  // namespace stodom
