#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "btv/graph.hpp"
#include "btv/partition.hpp"

namespace btv {

/// Stationary visit rates of the damped weighted random walk.
struct FlowDistribution {
  std::vector<double> visit;  // aligned with node indices, sums to 1
  double damping = 0.85;
  double tolerance = 1e-10;
  double residual = 0.0;
  std::size_t iterations = 0;
};

inline constexpr std::size_t kDefaultFlowIterationCap = 100000;

/// Power iteration. Edges of weight 0 are ignored; nodes without positive
/// out-weight teleport uniformly. Converged when the L1 change < tol.
FlowDistribution stationary_flow(const DirectedGraph& g, double damping = 0.85, double tol = 1e-10,
                                 std::size_t max_iterations = kDefaultFlowIterationCap);

/// Two-level map equation in bits:
///   L = q H(Q) + sum_i p_i H(P_i)
/// with module exit flow q_i = teleport-out + link-out of the damped walk.
double map_equation_codelength(const DirectedGraph& g, const Partition& partition, const FlowDistribution& flow);

struct CommunityResult {
  Partition partition;  // labels "1".."K", ranked by module size
  double codelength = 0.0;
  std::size_t best_trial = 0;
  std::vector<double> trial_codelengths;
  std::size_t module_count = 0;
};

/// Greedy map-equation search: local node moves, aggregation of modules into
/// super-nodes, and repeated node-level refinement until no move improves the
/// codelength. Runs `trials` independently seeded searches (in parallel) and
/// keeps the lowest codelength, ties to the lower trial index.
CommunityResult detect_communities(const DirectedGraph& g, std::size_t trials, std::uint64_t seed,
                                   double damping = 0.85);

/// Pairwise co-assignment frequencies across runs.
struct AgreementMatrix {
  std::vector<std::string> ids;
  std::vector<double> values;  // row-major ids.size() x ids.size()

  double at(std::size_t i, std::size_t j) const { return values[i * ids.size() + j]; }
  /// Nodes with at least one partner at 0 < P < 1.
  std::vector<std::string> unstable_nodes() const;
};

AgreementMatrix partition_agreement(std::span<const Partition> runs);

namespace reference {
FlowDistribution stationary_flow(const DirectedGraph& g, double damping = 0.85, double tol = 1e-10,
                                 std::size_t max_iterations = kDefaultFlowIterationCap);
CommunityResult detect_communities(const DirectedGraph& g, std::size_t trials, std::uint64_t seed,
                                   double damping = 0.85);
}  // namespace reference

}  // namespace btv
