#include "btv/partition.hpp"

#include <algorithm>
#include <fstream>

#include "btv/error.hpp"
#include "btv/text.hpp"
#include "csv.hpp"

namespace btv {

std::string_view source_name(PartitionSource s) noexcept {
  switch (s) {
    case PartitionSource::MetadataGroups: return "metadata_groups";
    case PartitionSource::Detected: return "detected";
    case PartitionSource::External: return "external";
  }
  return "external";
}

Partition Partition::from_parts(const std::vector<std::pair<std::string, std::vector<std::string>>>& parts,
                                PartitionSource source) {
  std::map<std::string, std::string> assignment;
  for (const auto& [label, members] : parts) {
    for (const auto& id : members) {
      if (!assignment.emplace(id, label).second) {
        throw ValidationError("node '" + id + "' appears in more than one part");
      }
    }
  }
  return Partition(std::move(assignment), source);
}

std::optional<std::string> Partition::label_of(std::string_view id) const {
  const auto it = assignment_.find(std::string(id));
  if (it == assignment_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Partition::labels_for(const DirectedGraph& g) const {
  if (assignment_.size() != g.node_count()) {
    throw ValidationError("partition covers " + std::to_string(assignment_.size()) + " nodes, graph has " +
                          std::to_string(g.node_count()));
  }
  std::vector<std::string> labels;
  labels.reserve(g.node_count());
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const auto it = assignment_.find(g.id(i));
    if (it == assignment_.end()) throw ValidationError("partition does not cover node '" + g.id(i) + "'");
    labels.push_back(it->second);
  }
  return labels;
}

std::vector<Partition::Part> Partition::parts_in(const DirectedGraph& g) const {
  const auto labels = labels_for(g);
  std::map<std::string, std::vector<NodeIndex>> grouped;
  for (NodeIndex i = 0; i < labels.size(); ++i) grouped[labels[i]].push_back(i);
  std::vector<Part> parts;
  parts.reserve(grouped.size());
  for (auto& [label, members] : grouped) parts.push_back({label, std::move(members)});
  std::sort(parts.begin(), parts.end(), [](const Part& a, const Part& b) { return label_less(a.label, b.label); });
  return parts;
}

std::map<std::string, std::size_t> Partition::part_sizes() const {
  std::map<std::string, std::size_t> sizes;
  for (const auto& [id, label] : assignment_) ++sizes[label];
  return sizes;
}

std::string_view group_label(Polarity p) noexcept {
  switch (p) {
    case Polarity::Anti: return "anti";
    case Polarity::Pro: return "pro";
    case Polarity::Neutral: return "neutral";
  }
  return "neutral";
}

Partition polarity_partition(const DirectedGraph& g) {
  std::map<std::string, std::string> assignment;
  for (const auto& n : g.nodes()) assignment.emplace(n.id, std::string(group_label(n.polarity)));
  return Partition(std::move(assignment), PartitionSource::MetadataGroups);
}

Partition collapse_small(const Partition& partition, std::size_t min_size) {
  const auto sizes = partition.part_sizes();
  std::map<std::string, std::string> assignment;
  for (const auto& [id, label] : partition.assignment()) {
    const bool small = sizes.at(label) < min_size;
    assignment.emplace_hint(assignment.end(), id, small ? std::string(kUnassignedLabel) : label);
  }
  return Partition(std::move(assignment), partition.source());
}

std::string partition_csv(const Partition& p) {
  std::string out = "id,part_label\n";
  for (const auto& [id, label] : p.assignment()) {
    out += detail::csv_escape(id);
    out += ',';
    out += detail::csv_escape(label);
    out += '\n';
  }
  return out;
}

void write_partition_csv(const Partition& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << partition_csv(p);
}

Partition read_partition_csv(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path);
  const auto id_col = table.column("id", path);
  const auto label_col = table.column("part_label", path);
  std::map<std::string, std::string> assignment;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = path.string() + ":" + std::to_string(table.line_numbers[r]);
    if (row[label_col].empty()) throw ValidationError(where + ": empty part label");
    const auto [it, inserted] = assignment.emplace(row[id_col], row[label_col]);
    if (!inserted && it->second != row[label_col]) {
      throw ValidationError(where + ": node '" + row[id_col] + "' assigned to overlapping parts");
    }
  }
  return Partition(std::move(assignment), PartitionSource::External);
}

}  // namespace btv
