#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace btv {

using NodeIndex = std::uint32_t;

enum class Polarity : std::uint8_t { Anti, Pro, Neutral };

inline constexpr std::size_t kPolarityCount = 3;

/// "r", "b", "g" as used in the published dataset.
char polarity_code(Polarity p) noexcept;
Polarity parse_polarity(std::string_view code);

/// Snapshot name (lower case, e.g. "feb2019") plus its position in time.
struct SnapshotLabel {
  std::string name;
  int order = 0;

  friend bool operator==(const SnapshotLabel&, const SnapshotLabel&) = default;
};

struct PageNode {
  std::string id;
  Polarity polarity = Polarity::Neutral;
  std::map<std::string, std::int64_t> fans;  // snapshot name -> fan count

  /// Fan count at `snapshot`; throws LookupError when the column is missing.
  std::int64_t fans_at(std::string_view snapshot) const;

  friend bool operator==(const PageNode&, const PageNode&) = default;
};

struct Edge {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Unweighted CSR adjacency in both directions. Parallel edges are allowed,
/// which lets configuration-model replicas share the reachability code.
class Digraph {
 public:
  Digraph() = default;
  Digraph(std::size_t node_count, std::span<const std::pair<NodeIndex, NodeIndex>> edges);

  std::size_t node_count() const noexcept { return out_offsets_.empty() ? 0 : out_offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return out_targets_.size(); }

  std::span<const NodeIndex> successors(NodeIndex u) const noexcept {
    return {out_targets_.data() + out_offsets_[u], out_targets_.data() + out_offsets_[u + 1]};
  }
  std::span<const NodeIndex> predecessors(NodeIndex u) const noexcept {
    return {in_sources_.data() + in_offsets_[u], in_sources_.data() + in_offsets_[u + 1]};
  }

  std::size_t out_degree(NodeIndex u) const noexcept { return out_offsets_[u + 1] - out_offsets_[u]; }
  std::size_t in_degree(NodeIndex u) const noexcept { return in_offsets_[u + 1] - in_offsets_[u]; }

 private:
  std::vector<std::size_t> out_offsets_;
  std::vector<NodeIndex> out_targets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<NodeIndex> in_sources_;
};

enum class Direction { In, Out };

/// Immutable directed weighted graph over attributed pages.
///
/// Nodes are stored in lexicographic id order, so NodeIndex order is the
/// canonical node order. Edges are sorted by (src, dst) and unique.
class DirectedGraph {
 public:
  struct EdgeRecord {
    std::string src;
    std::string dst;
    double weight = 0.0;
  };

  DirectedGraph() = default;

  /// Validates and canonicalises. Duplicate (src, dst) records are rejected;
  /// deduplication of raw input rows happens in load_snapshot.
  static DirectedGraph from_records(SnapshotLabel snapshot, std::vector<PageNode> nodes,
                                    std::span<const EdgeRecord> edges);

  const SnapshotLabel& snapshot() const noexcept { return snapshot_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  std::span<const PageNode> nodes() const noexcept { return nodes_; }
  const PageNode& node(NodeIndex i) const { return nodes_[i]; }
  const std::string& id(NodeIndex i) const { return nodes_[i].id; }
  Polarity polarity(NodeIndex i) const { return nodes_[i].polarity; }

  std::optional<NodeIndex> find(std::string_view id) const;
  /// Throws LookupError for unknown ids.
  NodeIndex index_of(std::string_view id) const;

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Edge> out_edges(NodeIndex u) const noexcept {
    return {edges_.data() + out_offsets_[u], edges_.data() + out_offsets_[u + 1]};
  }
  /// Indices into edges() of the edges entering u, ordered by source.
  std::span<const std::size_t> in_edge_ids(NodeIndex u) const noexcept {
    return {in_edge_ids_.data() + in_offsets_[u], in_edge_ids_.data() + in_offsets_[u + 1]};
  }

  /// A[u][v], or 0 when the edge is absent.
  double weight(NodeIndex u, NodeIndex v) const noexcept;
  bool has_edge(NodeIndex u, NodeIndex v) const noexcept;

  const Digraph& topology() const noexcept { return topology_; }

  friend bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    return a.snapshot_ == b.snapshot_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  void build_index();

  SnapshotLabel snapshot_;
  std::vector<PageNode> nodes_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<std::size_t> in_edge_ids_;
  Digraph topology_;

  friend DirectedGraph induced_subgraph_by_index(const DirectedGraph&, std::span<const NodeIndex>);
  friend DirectedGraph reverse(const DirectedGraph&);
};

/// Snapshots available in a nodes CSV, in column (chronological) order.
std::vector<SnapshotLabel> read_snapshot_labels(const std::filesystem::path& nodes_path);

/// Loads one snapshot. Edge weight = fans(u) * fans(v) at that snapshot.
/// Exact duplicate edge rows are collapsed with a warning.
DirectedGraph load_snapshot(const std::filesystem::path& nodes_path,
                            const std::filesystem::path& edges_path,
                            const SnapshotLabel& snapshot);

/// Sum of A[j][node] (IN) or A[node][j] (OUT). Self-loops count in both.
double weighted_degree(const DirectedGraph& g, std::string_view node, Direction direction);
double weighted_degree(const DirectedGraph& g, NodeIndex node, Direction direction);

DirectedGraph induced_subgraph(const DirectedGraph& g, std::span<const std::string> keep);
DirectedGraph induced_subgraph_by_index(const DirectedGraph& g, std::span<const NodeIndex> keep);

DirectedGraph reverse(const DirectedGraph& g);

struct EdgeSummary {
  struct Cell {
    std::size_t count = 0;
    double mean_weight = 0.0;
  };
  // [source polarity][target polarity]
  Cell by_polarity[kPolarityCount][kPolarityCount];
  std::size_t edge_count = 0;
  std::size_t two_way_edges = 0;
  std::size_t self_loops = 0;
  double two_way_share = 0.0;
  double self_share = 0.0;
};

EdgeSummary edge_summary(const DirectedGraph& g);

}  // namespace btv
