#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "btv/bowtie.hpp"
#include "btv/graph.hpp"

namespace btv {

class Partition;

/// Random multigraph with the degree sequences of its source. Edges are kept
/// in stub order; duplicates and self-loops are part of the sample.
struct MultiGraphReplica {
  std::size_t node_count = 0;
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  std::size_t self_loops = 0;
  std::size_t multi_edges = 0;  // edges beyond the first copy of a pair

  Digraph topology() const { return Digraph(node_count, edges); }
};

/// Directed configuration model. Out-stubs are listed by node index (node u
/// repeated out_degree(u) times), in-stubs likewise; the in-stubs are
/// Fisher-Yates shuffled with Rng(seed) (i from m-1 down to 1, j = below(i+1))
/// and paired with the out-stubs position by position.
MultiGraphReplica configuration_rewire(const Digraph& g, std::uint64_t seed);
MultiGraphReplica configuration_rewire(const DirectedGraph& g, std::uint64_t seed);

inline constexpr std::size_t kBowtieRoleCount = 7;  // roles without UNASSIGNED

struct RoleRank {
  std::size_t observed = 0;
  std::size_t smaller = 0;  // replicas with a strictly smaller component
  double rank = 0.0;        // smaller / replicas
  std::size_t min = 0;
  double median = 0.0;
  std::size_t max = 0;
};

struct RankReport {
  std::string part = "ALL";
  std::size_t node_count = 0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  std::array<RoleRank, kBowtieRoleCount> roles{};

  const RoleRank& at(BowtieRole r) const { return roles[static_cast<std::size_t>(r)]; }
};

/// Rank R of every bow-tie role against `replicas` configuration-model
/// samples. Replica r uses stream derive_seed(seed, {r}). Every replica's
/// degree sequences are checked against the source.
RankReport component_rank(const DirectedGraph& g, std::size_t replicas, std::uint64_t seed);

/// Per-part significance: each part's induced subgraph is rewired and ranked
/// on its own. Parts labelled UNASSIGNED or smaller than min_size are skipped.
/// Part streams are derive_seed(seed, {label_hash(label)}).
std::vector<RankReport> component_rank(const DirectedGraph& g, const Partition& partition, std::size_t replicas,
                                       std::uint64_t seed, std::size_t min_size = 5);

/// FNV-1a of the label bytes.
std::uint64_t label_hash(std::string_view label) noexcept;

nlohmann::json rank_reports_json(const std::vector<RankReport>& reports);
/// part,role,observed,R,min,median,max
std::string rank_reports_csv(const std::vector<RankReport>& reports);

namespace reference {
RankReport component_rank(const DirectedGraph& g, std::size_t replicas, std::uint64_t seed);
}

}  // namespace btv
