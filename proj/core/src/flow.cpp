#include "degensink/measures.hpp"
#include "degensink/scalability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace degensink {

namespace {

// Dinic's algorithm on real capacities. Residuals below eps count as zero.
class MaxFlow {
 public:
  MaxFlow(int n, double eps) : adj_(n), level_(n), it_(n), eps_(eps) {}

  int add_edge(int u, int v, double cap) {
    adj_[u].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({v, cap});
    adj_[v].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({u, 0.0});
    return static_cast<int>(edges_.size()) - 2;
  }

  double run(int s, int t) {
    double total = 0.0;
    while (bfs(s, t)) {
      std::ranges::fill(it_, 0);
      for (;;) {
        const double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= eps_) break;
        total += f;
      }
    }
    return total;
  }

  // Flow pushed through forward edge e.
  double flow(int e) const { return edges_[e + 1].cap; }

 private:
  struct Edge {
    int to;
    double cap;
  };

  bool bfs(int s, int t) {
    std::ranges::fill(level_, -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int e : adj_[u])
        if (edges_[e].cap > eps_ && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[u] + 1;
          q.push(edges_[e].to);
        }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double pushed) {
    if (u == t) return pushed;
    for (int& k = it_[u]; k < static_cast<int>(adj_[u].size()); ++k) {
      const int e = adj_[u][k];
      const int v = edges_[e].to;
      if (edges_[e].cap <= eps_ || level_[v] != level_[u] + 1) continue;
      const double f = dfs(v, t, std::min(pushed, edges_[e].cap));
      if (f > eps_) {
        edges_[e].cap -= f;
        edges_[e ^ 1].cap += f;
        return f;
      }
    }
    return 0.0;
  }

  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> level_, it_;
  double eps_;
};

struct FlowResult {
  double value;
  double target;
  std::optional<Coupling> coupling;
};

FlowResult solve_flow(const Coupling& R, const Measure& mu, const Measure& nu) {
  validate_instance(R, mu, nu);
  if (!is_balanced(mu, nu)) throw InvalidInput("feasibility_flow: unbalanced masses");
  const int N = static_cast<int>(R.rows()), M = static_cast<int>(R.cols());
  const double mass = total_mass(mu);
  const int s = N + M, t = N + M + 1;
  MaxFlow g(N + M + 2, 1e-15 * std::max(mass, 1e-300));
  const double big = 2.0 * mass + 1.0;
  for (int i = 0; i < N; ++i)
    if (mu(i) > 0) g.add_edge(s, i, mu(i));
  for (int j = 0; j < M; ++j)
    if (nu(j) > 0) g.add_edge(N + j, t, nu(j));
  std::vector<std::pair<int, std::pair<int, int>>> inner;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < M; ++j)
      if (R(i, j) > 0) inner.push_back({g.add_edge(i, N + j, big), {i, j}});
  FlowResult res{g.run(s, t), mass, std::nullopt};
  Coupling P = Coupling::Zero(N, M);
  for (const auto& [e, ij] : inner) P(ij.first, ij.second) = g.flow(e);
  res.coupling = P;
  return res;
}

bool reaches(const FlowResult& r) { return r.value >= r.target * (1.0 - 1e-10); }

}  // namespace

bool feasibility_flow(const Coupling& R, const Measure& mu, const Measure& nu) {
  return reaches(solve_flow(R, mu, nu));
}

std::optional<Coupling> feasible_coupling(const Coupling& R, const Measure& mu,
                                          const Measure& nu) {
  auto r = solve_flow(R, mu, nu);
  if (!reaches(r)) return std::nullopt;
  return r.coupling;
}

}  // namespace degensink
