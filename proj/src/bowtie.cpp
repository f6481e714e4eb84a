#include "btv/bowtie.hpp"

#include <algorithm>

#include "btv/error.hpp"
#include "btv/partition.hpp"
#include "csv.hpp"

namespace btv {

namespace {
constexpr std::array<std::string_view, kRoleCount> kRoleNames = {
    "SCC", "IN", "OUT", "TUBES", "INTENDRILS", "OUTTENDRILS", "OTHERS", "UNASSIGNED"};
}

std::string_view role_name(BowtieRole role) noexcept { return kRoleNames[static_cast<std::size_t>(role)]; }

BowtieRole parse_role(std::string_view name) {
  for (std::size_t i = 0; i < kRoleCount; ++i) {
    if (kRoleNames[i] == name) return static_cast<BowtieRole>(i);
  }
  throw ValidationError("unknown bow-tie role '" + std::string(name) + "'");
}

std::vector<std::vector<NodeIndex>> strongly_connected_components(const Digraph& g) {
  const std::size_t n = g.node_count();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited);
  std::vector<std::size_t> low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<NodeIndex> stack;
  struct Frame {
    NodeIndex node;
    std::size_t next;
  };
  std::vector<Frame> frames;
  std::vector<std::vector<NodeIndex>> components;
  std::size_t counter = 0;

  auto visit = [&](NodeIndex v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    frames.push_back({v, 0});
  };

  for (NodeIndex root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    visit(root);
    while (!frames.empty()) {
      const NodeIndex v = frames.back().node;
      const auto succ = g.successors(v);
      if (frames.back().next < succ.size()) {
        const NodeIndex w = succ[frames.back().next++];
        if (index[w] == kUnvisited) {
          visit(w);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      frames.pop_back();
      if (low[v] == index[v]) {
        std::vector<NodeIndex> component;
        NodeIndex w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
      if (!frames.empty()) {
        const NodeIndex parent = frames.back().node;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return components;
}

std::vector<NodeIndex> largest_scc(const Digraph& g) {
  if (g.node_count() == 0) throw DomainError("largest SCC of an empty graph is undefined");
  auto components = strongly_connected_components(g);
  auto best = components.begin();
  for (auto it = components.begin(); it != components.end(); ++it) {
    if (it->size() > best->size() || (it->size() == best->size() && it->front() < best->front())) best = it;
  }
  return std::move(*best);
}

namespace {

template <typename Neighbours>
std::vector<char> flood(std::size_t n, std::span<const NodeIndex> sources, Neighbours&& neighbours) {
  std::vector<char> mark(n, 0);
  std::vector<NodeIndex> queue;
  queue.reserve(n);
  for (const NodeIndex s : sources) {
    if (!mark[s]) {
      mark[s] = 1;
      queue.push_back(s);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const NodeIndex w : neighbours(queue[head])) {
      if (!mark[w]) {
        mark[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return mark;
}

}  // namespace

std::vector<char> reachable_mask(const Digraph& g, std::span<const NodeIndex> sources) {
  return flood(g.node_count(), sources, [&](NodeIndex v) { return g.successors(v); });
}

std::vector<char> reaching_mask(const Digraph& g, std::span<const NodeIndex> sources) {
  return flood(g.node_count(), sources, [&](NodeIndex v) { return g.predecessors(v); });
}

std::vector<BowtieRole> bowtie_roles(const Digraph& g) {
  const std::size_t n = g.node_count();
  const auto core = largest_scc(g);
  std::vector<char> in_core(n, 0);
  for (const NodeIndex v : core) in_core[v] = 1;

  const auto from_core = reachable_mask(g, core);
  const auto to_core = reaching_mask(g, core);

  std::vector<NodeIndex> in_set;
  std::vector<NodeIndex> out_set;
  std::vector<BowtieRole> roles(n, BowtieRole::Others);
  for (NodeIndex v = 0; v < n; ++v) {
    if (in_core[v]) {
      roles[v] = BowtieRole::Scc;
    } else if (to_core[v]) {
      roles[v] = BowtieRole::In;
      in_set.push_back(v);
    } else if (from_core[v]) {
      roles[v] = BowtieRole::Out;
      out_set.push_back(v);
    }
  }

  // Remaining nodes are classified by reachability from IN and towards OUT.
  const auto from_in = reachable_mask(g, in_set);
  const auto to_out = reaching_mask(g, out_set);
  for (NodeIndex v = 0; v < n; ++v) {
    if (roles[v] != BowtieRole::Others) continue;
    if (from_in[v] && to_out[v]) {
      roles[v] = BowtieRole::Tubes;
    } else if (from_in[v]) {
      roles[v] = BowtieRole::InTendrils;
    } else if (to_out[v]) {
      roles[v] = BowtieRole::OutTendrils;
    }
  }
  return roles;
}

RoleSizes count_roles(std::span<const BowtieRole> roles) {
  RoleSizes sizes{};
  for (const auto r : roles) ++at(sizes, r);
  return sizes;
}

// --- graph-level -----------------------------------------------------------

std::optional<BowtieRole> BowtieDecomposition::role_of(std::string_view id) const {
  const auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return std::nullopt;
  return roles[static_cast<std::size_t>(it - ids.begin())];
}

namespace {

std::vector<std::string> ids_of(const DirectedGraph& g, std::span<const NodeIndex> members) {
  std::vector<std::string> ids;
  ids.reserve(members.size());
  for (const auto v : members) ids.push_back(g.id(v));
  return ids;
}

BowtieDecomposition skeleton(const DirectedGraph& g) {
  BowtieDecomposition d;
  d.snapshot = g.snapshot().name;
  d.ids.reserve(g.node_count());
  d.polarities.reserve(g.node_count());
  for (const auto& n : g.nodes()) {
    d.ids.push_back(n.id);
    d.polarities.push_back(n.polarity);
  }
  return d;
}

std::vector<NodeIndex> indices_of(const DirectedGraph& g, std::span<const std::string> ids) {
  std::vector<NodeIndex> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(g.index_of(id));
  return out;
}

struct PartResult {
  PartBowtie summary;
  std::vector<BowtieRole> roles;  // aligned with the part's members
};

PartResult decompose_part(const DirectedGraph& g, const Partition::Part& part, std::size_t min_size) {
  PartResult result;
  result.summary.label = part.label;
  result.summary.node_count = part.members.size();
  if (part.label == kUnassignedLabel || part.members.size() < min_size) {
    result.summary.unassigned = true;
    result.roles.assign(part.members.size(), BowtieRole::Unassigned);
  } else {
    const auto sub = induced_subgraph_by_index(g, part.members);
    result.roles = bowtie_roles(sub.topology());
  }
  result.summary.sizes = count_roles(result.roles);
  return result;
}

BowtieDecomposition assemble(const DirectedGraph& g, const std::vector<Partition::Part>& parts,
                             std::vector<PartResult>& results) {
  auto d = skeleton(g);
  d.roles.assign(g.node_count(), BowtieRole::Unassigned);
  d.part_of.assign(g.node_count(), std::string{});
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& members = parts[p].members;
    for (std::size_t k = 0; k < members.size(); ++k) {
      d.roles[members[k]] = results[p].roles[k];
      d.part_of[members[k]] = parts[p].label;
    }
    d.parts.push_back(std::move(results[p].summary));
  }
  d.sizes = count_roles(d.roles);
  return d;
}

}  // namespace

std::vector<std::vector<std::string>> strongly_connected_components(const DirectedGraph& g) {
  std::vector<std::vector<std::string>> out;
  for (const auto& c : strongly_connected_components(g.topology())) out.push_back(ids_of(g, c));
  return out;
}

std::vector<std::string> largest_scc(const DirectedGraph& g) { return ids_of(g, largest_scc(g.topology())); }

std::vector<std::string> reachable_from(const DirectedGraph& g, std::span<const std::string> sources) {
  const auto mask = reachable_mask(g.topology(), indices_of(g, sources));
  std::vector<std::string> out;
  for (NodeIndex v = 0; v < mask.size(); ++v) {
    if (mask[v]) out.push_back(g.id(v));
  }
  return out;
}

BowtieDecomposition decompose(const DirectedGraph& g) {
  auto d = skeleton(g);
  d.roles = bowtie_roles(g.topology());
  d.sizes = count_roles(d.roles);
  return d;
}

BowtieDecomposition recursive_decompose(const DirectedGraph& g, const Partition& partition, std::size_t min_size) {
  const auto parts = partition.parts_in(g);
  std::vector<PartResult> results(parts.size());
  const auto count = static_cast<std::ptrdiff_t>(parts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t p = 0; p < count; ++p) {
    results[static_cast<std::size_t>(p)] = decompose_part(g, parts[static_cast<std::size_t>(p)], min_size);
  }
  return assemble(g, parts, results);
}

namespace reference {

BowtieDecomposition recursive_decompose(const DirectedGraph& g, const Partition& partition, std::size_t min_size) {
  const auto parts = partition.parts_in(g);
  std::vector<PartResult> results;
  results.reserve(parts.size());
  for (const auto& part : parts) results.push_back(decompose_part(g, part, min_size));
  return assemble(g, parts, results);
}

}  // namespace reference

// --- exports ---------------------------------------------------------------

std::string roles_csv(const BowtieDecomposition& d) {
  std::string out = "id,polarity,partition_part,role\n";
  for (std::size_t i = 0; i < d.ids.size(); ++i) {
    out += detail::csv_escape(d.ids[i]);
    out += ',';
    out += polarity_code(d.polarities[i]);
    out += ',';
    out += d.part_of.empty() ? std::string("ALL") : detail::csv_escape(d.part_of[i]);
    out += ',';
    out += role_name(d.roles[i]);
    out += '\n';
  }
  return out;
}

namespace {
nlohmann::json sizes_json(const RoleSizes& sizes) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto r : kAllRoles) j[std::string(role_name(r))] = at(sizes, r);
  return j;
}
}  // namespace

nlohmann::json decomposition_summary_json(const BowtieDecomposition& d) {
  nlohmann::json parts = nlohmann::json::array();
  if (d.parts.empty()) {
    parts.push_back({{"part", "ALL"}, {"node_count", d.ids.size()}, {"unassigned", false}, {"sizes", sizes_json(d.sizes)}});
  }
  for (const auto& p : d.parts) {
    parts.push_back({{"part", p.label}, {"node_count", p.node_count}, {"unassigned", p.unassigned}, {"sizes", sizes_json(p.sizes)}});
  }
  return {{"snapshot", d.snapshot},
          {"kind", d.part_of.empty() ? "whole" : "recursive"},
          {"node_count", d.ids.size()},
          {"sizes", sizes_json(d.sizes)},
          {"parts", parts}};
}

}  // namespace btv
