#pragma once

// Independent reference computations used only by tests. Each one follows the
// textbook definition directly and shares no code with the library kernels.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "btv/bowtie.hpp"
#include "btv/graph.hpp"
#include "btv/rng.hpp"

namespace btv::testing {

using Pairs = std::vector<std::pair<NodeIndex, NodeIndex>>;

/// Reflexive transitive closure by Floyd-Warshall: reach[u][v].
inline std::vector<std::vector<char>> closure(std::size_t n, const Pairs& edges) {
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t v = 0; v < n; ++v) reach[v][v] = 1;
  for (const auto& [u, v] : edges) reach[u][v] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = 1;
  return reach;
}

/// Components as mutual-reachability classes, each sorted, ordered by first member.
inline std::vector<std::vector<NodeIndex>> closure_components(std::size_t n, const Pairs& edges) {
  const auto reach = closure(n, edges);
  std::vector<char> seen(n, 0);
  std::vector<std::vector<NodeIndex>> out;
  for (NodeIndex u = 0; u < n; ++u) {
    if (seen[u]) continue;
    std::vector<NodeIndex> c;
    for (NodeIndex v = 0; v < n; ++v) {
      if (reach[u][v] && reach[v][u]) {
        c.push_back(v);
        seen[v] = 1;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

/// Literal set definitions: S = largest component (ties: smallest member),
/// IN/OUT relative to S, TUBES/INTENDRILS/OUTTENDRILS over the remainder.
inline std::vector<BowtieRole> brute_force_roles(std::size_t n, const Pairs& edges) {
  const auto reach = closure(n, edges);
  const auto comps = closure_components(n, edges);
  const std::vector<NodeIndex>* best = &comps.front();
  for (const auto& c : comps) {
    if (c.size() > best->size() || (c.size() == best->size() && c.front() < best->front())) best = &c;
  }
  const NodeIndex s = best->front();
  std::vector<char> in_s(n, 0);
  for (const auto v : *best) in_s[v] = 1;
  std::vector<char> in_set(n, 0), out_set(n, 0);
  for (NodeIndex v = 0; v < n; ++v) {
    if (in_s[v]) continue;
    in_set[v] = reach[v][s];
    out_set[v] = reach[s][v];
  }
  std::vector<BowtieRole> roles(n, BowtieRole::Others);
  for (NodeIndex v = 0; v < n; ++v) {
    if (in_s[v]) {
      roles[v] = BowtieRole::Scc;
      continue;
    }
    if (in_set[v]) {
      roles[v] = BowtieRole::In;
      continue;
    }
    if (out_set[v]) {
      roles[v] = BowtieRole::Out;
      continue;
    }
    bool from_in = false, to_out = false;
    for (NodeIndex u = 0; u < n; ++u) {
      if (in_set[u] && reach[u][v]) from_in = true;
      if (out_set[u] && reach[v][u]) to_out = true;
    }
    if (from_in && to_out) {
      roles[v] = BowtieRole::Tubes;
    } else if (from_in) {
      roles[v] = BowtieRole::InTendrils;
    } else if (to_out) {
      roles[v] = BowtieRole::OutTendrils;
    }
  }
  return roles;
}

/// Stationary distribution by Gaussian elimination on
/// (I - d M^T) p = (1 - d)/n, where M rows are w/W_u, or uniform for
/// nodes without positive out-weight.
inline std::vector<double> dense_pagerank(const DirectedGraph& g, double d) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (NodeIndex u = 0; u < n; ++u) {
    double total = 0.0;
    for (const auto& e : g.out_edges(u)) total += std::max(0.0, e.weight);
    for (NodeIndex v = 0; v < n; ++v) m[u][v] = total > 0.0 ? g.weight(u, v) / total : 1.0 / static_cast<double>(n);
  }
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - d * m[j][i];
    a[i][n] = (1.0 - d) / static_cast<double>(n);
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
    std::swap(a[c], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = a[i][n] / a[i][i];
  return p;
}

/// Betweenness by enumerating every shortest path (unweighted, directed),
/// normalised by (n-1)(n-2).
inline std::vector<double> brute_force_betweenness(std::size_t n, const Pairs& edges) {
  std::vector<std::vector<NodeIndex>> succ(n);
  for (const auto& [u, v] : edges)
    if (u != v) succ[u].push_back(v);
  std::vector<double> score(n, 0.0);
  for (NodeIndex s = 0; s < n; ++s) {
    // BFS distances from s
    std::vector<int> dist(n, -1);
    std::vector<NodeIndex> queue{s};
    dist[s] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h)
      for (const auto w : succ[queue[h]])
        if (dist[w] < 0) {
          dist[w] = dist[queue[h]] + 1;
          queue.push_back(w);
        }
    for (NodeIndex t = 0; t < n; ++t) {
      if (t == s || dist[t] < 0) continue;
      std::vector<std::vector<NodeIndex>> paths;
      std::vector<NodeIndex> path{s};
      auto dfs = [&](auto&& self, NodeIndex v) -> void {
        if (v == t) {
          paths.push_back(path);
          return;
        }
        for (const auto w : succ[v]) {
          if (dist[w] == dist[v] + 1 && static_cast<int>(path.size()) <= dist[t]) {
            path.push_back(w);
            self(self, w);
            path.pop_back();
          }
        }
      };
      dfs(dfs, s);
      for (const auto& p : paths)
        for (std::size_t k = 1; k + 1 < p.size(); ++k) score[p[k]] += 1.0 / static_cast<double>(paths.size());
    }
  }
  const double scale = n < 3 ? 0.0 : 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
  for (auto& v : score) v *= scale;
  return score;
}

/// Exact probability that each node ends recovered in synchronous SIR where
/// infectious w infects susceptible u with probability beta whenever
/// (w -> u) is in `contacts`, and infectious nodes recover with gamma.
/// Absorption probabilities by recursion over the 3^n states.
class ExactSir {
 public:
  ExactSir(std::size_t n, Pairs contacts, double beta, double gamma)
      : n_(n), contacts_(std::move(contacts)), beta_(beta), gamma_(gamma) {}

  std::vector<double> infection_probabilities(NodeIndex seed) {
    std::vector<int> state(n_, 0);
    state[seed] = 1;
    return value(state);
  }

 private:
  std::vector<double> value(const std::vector<int>& state) {
    if (const auto it = memo_.find(state); it != memo_.end()) return it->second;
    std::vector<NodeIndex> infectious, exposed;
    std::vector<double> p_infect;
    for (NodeIndex v = 0; v < n_; ++v)
      if (state[v] == 1) infectious.push_back(v);
    std::vector<double> result(n_, 0.0);
    if (infectious.empty()) {
      for (NodeIndex v = 0; v < n_; ++v) result[v] = state[v] == 2 ? 1.0 : 0.0;
      return memo_[state] = result;
    }
    for (NodeIndex u = 0; u < n_; ++u) {
      if (state[u] != 0) continue;
      int k = 0;
      for (const auto& [w, t] : contacts_)
        if (t == u && state[w] == 1) ++k;
      if (k > 0) {
        exposed.push_back(u);
        p_infect.push_back(1.0 - std::pow(1.0 - beta_, k));
      }
    }
    double stay = 0.0;
    const std::size_t e = exposed.size(), r = infectious.size();
    for (std::size_t im = 0; im < (std::size_t{1} << e); ++im) {
      for (std::size_t rm = 0; rm < (std::size_t{1} << r); ++rm) {
        double p = 1.0;
        auto next = state;
        for (std::size_t i = 0; i < e; ++i) {
          const bool hit = (im >> i) & 1;
          p *= hit ? p_infect[i] : 1.0 - p_infect[i];
          if (hit) next[exposed[i]] = 1;
        }
        for (std::size_t i = 0; i < r; ++i) {
          const bool rec = (rm >> i) & 1;
          p *= rec ? gamma_ : 1.0 - gamma_;
          if (rec) next[infectious[i]] = 2;
        }
        if (p == 0.0) continue;
        if (next == state) {
          stay += p;
          continue;
        }
        const auto sub = value(next);
        for (std::size_t v = 0; v < n_; ++v) result[v] += p * sub[v];
      }
    }
    for (auto& x : result) x /= 1.0 - stay;
    return memo_[state] = result;
  }

  std::size_t n_;
  Pairs contacts_;
  double beta_, gamma_;
  std::map<std::vector<int>, std::vector<double>> memo_;
};

/// Rank R per role by re-doing stub matching and the closure-based
/// decomposition, with replica r drawn from Rng(derive_seed(seed, {r})).
inline std::vector<double> brute_force_ranks(std::size_t n, const Pairs& edges, std::size_t replicas,
                                             std::uint64_t seed) {
  std::vector<NodeIndex> outs, ins;
  for (NodeIndex u = 0; u < n; ++u)
    for (const auto& [a, b] : edges)
      if (a == u) outs.push_back(u);
  for (NodeIndex v = 0; v < n; ++v)
    for (const auto& [a, b] : edges)
      if (b == v) ins.push_back(v);
  auto sizes = [&](const Pairs& es) {
    std::vector<std::size_t> s(kRoleCount, 0);
    for (const auto r : brute_force_roles(n, es)) ++s[static_cast<std::size_t>(r)];
    return s;
  };
  const auto observed = sizes(edges);
  std::vector<double> smaller(7, 0.0);
  for (std::size_t r = 0; r < replicas; ++r) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    auto shuffled = ins;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      const auto j = rng.below(i);
      std::swap(shuffled[i - 1], shuffled[j]);
    }
    Pairs replica;
    for (std::size_t k = 0; k < outs.size(); ++k) replica.emplace_back(outs[k], shuffled[k]);
    const auto s = sizes(replica);
    for (std::size_t k = 0; k < 7; ++k)
      if (s[k] < observed[k]) smaller[k] += 1.0;
  }
  for (auto& x : smaller) x /= static_cast<double>(replicas);
  return smaller;
}

}  // namespace btv::testing
