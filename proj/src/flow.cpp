#include <cmath>

#include "btv/community.hpp"
#include "btv/error.hpp"

namespace btv {

namespace {

void check_flow_args(const DirectedGraph& g, double damping, double tol) {
  if (g.empty()) throw DomainError("stationary flow of an empty graph is undefined");
  if (!(damping > 0.0 && damping < 1.0)) throw DomainError("damping must lie in (0, 1)");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
}

/// Per-edge transition probability w / W_src (0 for zero-weight edges) and
/// the dangling flag per node.
struct Transition {
  std::vector<double> edge_prob;
  std::vector<char> dangling;
};

Transition transition_of(const DirectedGraph& g) {
  Transition t;
  const auto edges = g.edges();
  t.edge_prob.assign(edges.size(), 0.0);
  t.dangling.assign(g.node_count(), 1);
  std::size_t k = 0;
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    const auto out = g.out_edges(u);
    double total = 0.0;
    for (const auto& e : out) {
      if (e.weight > 0.0) total += e.weight;
    }
    if (total > 0.0) {
      t.dangling[u] = 0;
      for (std::size_t j = 0; j < out.size(); ++j) {
        if (out[j].weight > 0.0) t.edge_prob[k + j] = out[j].weight / total;
      }
    }
    k += out.size();
  }
  return t;
}

template <bool Parallel>
FlowDistribution power_iteration(const DirectedGraph& g, double damping, double tol, std::size_t max_iterations) {
  check_flow_args(g, damping, tol);
  const std::size_t n = g.node_count();
  const auto edges = g.edges();
  const auto transition = transition_of(g);
  const double uniform = 1.0 / static_cast<double>(n);

  std::vector<double> p(n, uniform);
  std::vector<double> next(n, 0.0);
  FlowDistribution result;
  result.damping = damping;
  result.tolerance = tol;

  for (std::size_t iter = 1; iter <= max_iterations; ++iter) {
    double dangling_mass = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (transition.dangling[u]) dangling_mass += p[u];
    }
    const double base = (damping * dangling_mass + (1.0 - damping)) * uniform;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (Parallel)
    for (std::ptrdiff_t vi = 0; vi < count; ++vi) {
      const auto v = static_cast<NodeIndex>(vi);
      double inflow = 0.0;
      for (const auto k : g.in_edge_ids(v)) inflow += p[edges[k].src] * transition.edge_prob[k];
      next[v] = base + damping * inflow;
    }
    double total = 0.0;
    for (const double x : next) total += x;
    double residual = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] /= total;
      residual += std::abs(next[v] - p[v]);
    }
    p.swap(next);
    result.iterations = iter;
    result.residual = residual;
    if (residual < tol) {
      result.visit = std::move(p);
      return result;
    }
  }
  throw NumericalError("stationary flow did not converge after " + std::to_string(max_iterations) +
                       " iterations (residual " + std::to_string(result.residual) + ")");
}

}  // namespace

FlowDistribution stationary_flow(const DirectedGraph& g, double damping, double tol, std::size_t max_iterations) {
  return power_iteration<true>(g, damping, tol, max_iterations);
}

namespace reference {
FlowDistribution stationary_flow(const DirectedGraph& g, double damping, double tol, std::size_t max_iterations) {
  return power_iteration<false>(g, damping, tol, max_iterations);
}
}  // namespace reference

}  // namespace btv
