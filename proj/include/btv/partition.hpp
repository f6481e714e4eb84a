#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "btv/graph.hpp"

namespace btv {

inline constexpr std::string_view kUnassignedLabel = "UNASSIGNED";

enum class PartitionSource { MetadataGroups, Detected, External };

std::string_view source_name(PartitionSource s) noexcept;

/// Hard partition: every node id carries exactly one part label.
class Partition {
 public:
  struct Part {
    std::string label;
    std::vector<NodeIndex> members;  // ascending
  };

  Partition() = default;
  Partition(std::map<std::string, std::string> assignment, PartitionSource source)
      : assignment_(std::move(assignment)), source_(source) {}

  /// Builds from explicit parts; a node listed twice is a ValidationError.
  static Partition from_parts(const std::vector<std::pair<std::string, std::vector<std::string>>>& parts,
                              PartitionSource source);

  const std::map<std::string, std::string>& assignment() const noexcept { return assignment_; }
  PartitionSource source() const noexcept { return source_; }
  std::size_t size() const noexcept { return assignment_.size(); }

  std::optional<std::string> label_of(std::string_view id) const;

  /// Labels aligned with g's node indices. ValidationError unless the
  /// partition covers exactly g's node set.
  std::vector<std::string> labels_for(const DirectedGraph& g) const;

  /// Parts in label_less order, members as g's node indices.
  std::vector<Part> parts_in(const DirectedGraph& g) const;

  std::map<std::string, std::size_t> part_sizes() const;

  friend bool operator==(const Partition& a, const Partition& b) { return a.assignment_ == b.assignment_; }

 private:
  std::map<std::string, std::string> assignment_;
  PartitionSource source_ = PartitionSource::External;
};

/// Vaccination-group partition: labels "anti", "pro", "neutral".
Partition polarity_partition(const DirectedGraph& g);
std::string_view group_label(Polarity p) noexcept;

/// Parts with fewer than min_size members are relabelled UNASSIGNED.
Partition collapse_small(const Partition& partition, std::size_t min_size = 5);

/// id,part_label
void write_partition_csv(const Partition& p, const std::filesystem::path& path);
std::string partition_csv(const Partition& p);
Partition read_partition_csv(const std::filesystem::path& path);

}  // namespace btv
