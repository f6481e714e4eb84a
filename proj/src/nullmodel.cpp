#include "btv/nullmodel.hpp"

#include <algorithm>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "btv/error.hpp"
#include "btv/partition.hpp"
#include "btv/rng.hpp"
#include "btv/text.hpp"
#include "csv.hpp"

namespace btv {

MultiGraphReplica configuration_rewire(const Digraph& g, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  if (n == 0) throw DomainError("cannot rewire an empty graph");
  std::vector<NodeIndex> out_stubs;
  std::vector<NodeIndex> in_stubs;
  out_stubs.reserve(g.edge_count());
  in_stubs.reserve(g.edge_count());
  for (NodeIndex u = 0; u < n; ++u) {
    out_stubs.insert(out_stubs.end(), g.out_degree(u), u);
    in_stubs.insert(in_stubs.end(), g.in_degree(u), u);
  }
  Rng rng(seed);
  for (std::size_t i = in_stubs.size(); i > 1; --i) std::swap(in_stubs[i - 1], in_stubs[rng.below(i)]);

  MultiGraphReplica replica;
  replica.node_count = n;
  replica.edges.reserve(out_stubs.size());
  for (std::size_t k = 0; k < out_stubs.size(); ++k) {
    replica.edges.emplace_back(out_stubs[k], in_stubs[k]);
    if (out_stubs[k] == in_stubs[k]) ++replica.self_loops;
  }
  auto sorted = replica.edges;
  std::sort(sorted.begin(), sorted.end());
  replica.multi_edges = static_cast<std::size_t>(sorted.end() - std::unique(sorted.begin(), sorted.end()));
  return replica;
}

MultiGraphReplica configuration_rewire(const DirectedGraph& g, std::uint64_t seed) {
  return configuration_rewire(g.topology(), seed);
}

std::uint64_t label_hash(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

void check_degrees(const Digraph& source, const Digraph& replica, std::size_t r) {
  for (NodeIndex u = 0; u < source.node_count(); ++u) {
    if (source.out_degree(u) != replica.out_degree(u) || source.in_degree(u) != replica.in_degree(u)) {
      throw std::logic_error("replica " + std::to_string(r) + " does not preserve the degree of node " +
                             std::to_string(u));
    }
  }
}

RoleSizes replica_sizes(const Digraph& source, std::uint64_t seed, std::size_t r) {
  const auto replica = configuration_rewire(source, derive_seed(seed, {static_cast<std::uint64_t>(r)}));
  const auto topology = replica.topology();
  check_degrees(source, topology, r);
  spdlog::debug("replica {}: {} self-loops, {} multi-edges", r, replica.self_loops, replica.multi_edges);
  return count_roles(bowtie_roles(topology));
}

RankReport summarise(const Digraph& source, std::span<const RoleSizes> samples, std::uint64_t seed) {
  RankReport report;
  report.node_count = source.node_count();
  report.replicas = samples.size();
  report.seed = seed;
  const auto observed = count_roles(bowtie_roles(source));
  std::vector<std::size_t> values(samples.size());
  for (std::size_t k = 0; k < kBowtieRoleCount; ++k) {
    auto& rr = report.roles[k];
    rr.observed = observed[k];
    for (std::size_t r = 0; r < samples.size(); ++r) {
      values[r] = samples[r][k];
      if (values[r] < rr.observed) ++rr.smaller;
    }
    rr.rank = static_cast<double>(rr.smaller) / static_cast<double>(samples.size());
    std::sort(values.begin(), values.end());
    rr.min = values.front();
    rr.max = values.back();
    const std::size_t mid = values.size() / 2;
    rr.median = values.size() % 2 ? static_cast<double>(values[mid])
                                  : 0.5 * (static_cast<double>(values[mid - 1]) + static_cast<double>(values[mid]));
  }
  return report;
}

template <bool Parallel>
RankReport rank_topology(const Digraph& source, std::size_t replicas, std::uint64_t seed) {
  if (replicas < 1) throw DomainError("replicas must be >= 1");
  if (source.node_count() == 0) throw DomainError("cannot rank an empty graph");
  std::vector<RoleSizes> samples(replicas);
  const auto count = static_cast<std::ptrdiff_t>(replicas);
#pragma omp parallel for schedule(dynamic, 4) if (Parallel)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    samples[static_cast<std::size_t>(r)] = replica_sizes(source, seed, static_cast<std::size_t>(r));
  }
  return summarise(source, samples, seed);
}

}  // namespace

RankReport component_rank(const DirectedGraph& g, std::size_t replicas, std::uint64_t seed) {
  return rank_topology<true>(g.topology(), replicas, seed);
}

std::vector<RankReport> component_rank(const DirectedGraph& g, const Partition& partition, std::size_t replicas,
                                       std::uint64_t seed, std::size_t min_size) {
  std::vector<RankReport> reports;
  for (const auto& part : partition.parts_in(g)) {
    if (part.label == kUnassignedLabel || part.members.size() < min_size) continue;
    const auto sub = induced_subgraph_by_index(g, part.members);
    auto report = rank_topology<true>(sub.topology(), replicas, derive_seed(seed, {label_hash(part.label)}));
    report.part = part.label;
    reports.push_back(std::move(report));
  }
  return reports;
}

namespace reference {
RankReport component_rank(const DirectedGraph& g, std::size_t replicas, std::uint64_t seed) {
  return rank_topology<false>(g.topology(), replicas, seed);
}
}  // namespace reference

nlohmann::json rank_reports_json(const std::vector<RankReport>& reports) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& report : reports) {
    nlohmann::json roles = nlohmann::json::object();
    for (std::size_t k = 0; k < kBowtieRoleCount; ++k) {
      const auto& rr = report.roles[k];
      roles[std::string(role_name(static_cast<BowtieRole>(k)))] = {
          {"observed", rr.observed},
          {"R", rr.rank},
          {"smaller", rr.smaller},
          {"replica_stats", {{"min", rr.min}, {"median", rr.median}, {"max", rr.max}}}};
    }
    out.push_back({{"part", report.part},
                   {"node_count", report.node_count},
                   {"replicas", report.replicas},
                   {"seed", report.seed},
                   {"roles", roles}});
  }
  return out;
}

std::string rank_reports_csv(const std::vector<RankReport>& reports) {
  std::string out = "part,role,observed,R,min,median,max\n";
  for (const auto& report : reports) {
    for (std::size_t k = 0; k < kBowtieRoleCount; ++k) {
      const auto& rr = report.roles[k];
      out += detail::csv_escape(report.part) + ',' + std::string(role_name(static_cast<BowtieRole>(k))) + ',' +
             std::to_string(rr.observed) + ',' + format_number(rr.rank) + ',' + std::to_string(rr.min) + ',' +
             format_number(rr.median) + ',' + std::to_string(rr.max) + '\n';
    }
  }
  return out;
}

}  // namespace btv
