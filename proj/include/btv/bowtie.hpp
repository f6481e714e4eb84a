#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "btv/graph.hpp"

namespace btv {

class Partition;

enum class BowtieRole : std::uint8_t {
  Scc,
  In,
  Out,
  Tubes,
  InTendrils,
  OutTendrils,
  Others,
  Unassigned,
};

inline constexpr std::size_t kRoleCount = 8;
inline constexpr std::array<BowtieRole, kRoleCount> kAllRoles = {
    BowtieRole::Scc,        BowtieRole::In,          BowtieRole::Out,    BowtieRole::Tubes,
    BowtieRole::InTendrils, BowtieRole::OutTendrils, BowtieRole::Others, BowtieRole::Unassigned};

std::string_view role_name(BowtieRole role) noexcept;
BowtieRole parse_role(std::string_view name);

using RoleSizes = std::array<std::size_t, kRoleCount>;

inline std::size_t& at(RoleSizes& sizes, BowtieRole r) { return sizes[static_cast<std::size_t>(r)]; }
inline std::size_t at(const RoleSizes& sizes, BowtieRole r) { return sizes[static_cast<std::size_t>(r)]; }

// --- index-space kernels over a topology ---------------------------------

/// Iterative Tarjan. Components are returned in reverse topological order of
/// the condensation; members of each component are sorted ascending.
std::vector<std::vector<NodeIndex>> strongly_connected_components(const Digraph& g);

/// Maximum-cardinality SCC; ties go to the component holding the smallest
/// node index (= lexicographically smallest id). Throws DomainError when empty.
std::vector<NodeIndex> largest_scc(const Digraph& g);

/// Marks every node reachable from `sources` (sources included).
std::vector<char> reachable_mask(const Digraph& g, std::span<const NodeIndex> sources);
/// Marks every node from which some source is reachable (sources included).
std::vector<char> reaching_mask(const Digraph& g, std::span<const NodeIndex> sources);

/// Seven-role assignment per node index.
std::vector<BowtieRole> bowtie_roles(const Digraph& g);

RoleSizes count_roles(std::span<const BowtieRole> roles);

// --- graph-level API -------------------------------------------------------

struct PartBowtie {
  std::string label;
  std::size_t node_count = 0;
  bool unassigned = false;
  RoleSizes sizes{};
};

/// Role of every node of one graph. `ids` and `roles` are aligned and in
/// canonical (lexicographic) order. `parts` is filled for recursive runs.
struct BowtieDecomposition {
  std::string snapshot;
  std::vector<std::string> ids;
  std::vector<Polarity> polarities;
  std::vector<BowtieRole> roles;
  std::vector<std::string> part_of;  // empty for whole-graph decompositions
  std::vector<PartBowtie> parts;
  RoleSizes sizes{};

  std::optional<BowtieRole> role_of(std::string_view id) const;
};

std::vector<std::vector<std::string>> strongly_connected_components(const DirectedGraph& g);
std::vector<std::string> largest_scc(const DirectedGraph& g);
std::vector<std::string> reachable_from(const DirectedGraph& g, std::span<const std::string> sources);

BowtieDecomposition decompose(const DirectedGraph& g);

/// Decomposes every part's induced subgraph independently (inter-part edges
/// ignored). Parts smaller than `min_size`, and the UNASSIGNED part of a
/// collapsed partition, get BowtieRole::Unassigned. Parts run in parallel.
BowtieDecomposition recursive_decompose(const DirectedGraph& g, const Partition& partition,
                                        std::size_t min_size = 5);

// --- exports ---------------------------------------------------------------

/// id,polarity,partition_part,role
std::string roles_csv(const BowtieDecomposition& d);
nlohmann::json decomposition_summary_json(const BowtieDecomposition& d);

namespace reference {
/// Serial per-part loop kept for comparison with the parallel kernel.
BowtieDecomposition recursive_decompose(const DirectedGraph& g, const Partition& partition,
                                        std::size_t min_size = 5);
}  // namespace reference

}  // namespace btv
