#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "btv/graph.hpp"
#include "btv/rng.hpp"

namespace btv::testing {

inline constexpr const char* kFeb = "feb2019";
inline constexpr const char* kOct = "oct2019";

struct NodeSpec {
  std::string id;
  char polarity = 'g';
  std::int64_t fans = 1;
  std::int64_t later_fans = -1;  // -1: same as fans
};

/// Graph at kFeb with product-kernel weights.
inline DirectedGraph make_graph(const std::vector<NodeSpec>& nodes,
                                const std::vector<std::pair<std::string, std::string>>& edges) {
  std::vector<PageNode> pages;
  std::map<std::string, std::int64_t> fans;
  for (const auto& n : nodes) {
    PageNode p;
    p.id = n.id;
    p.polarity = parse_polarity(std::string(1, n.polarity));
    p.fans[kFeb] = n.fans;
    p.fans[kOct] = n.later_fans < 0 ? n.fans : n.later_fans;
    fans[n.id] = n.fans;
    pages.push_back(std::move(p));
  }
  std::vector<DirectedGraph::EdgeRecord> records;
  for (const auto& [s, t] : edges) {
    records.push_back({s, t, static_cast<double>(fans.at(s)) * static_cast<double>(fans.at(t))});
  }
  return DirectedGraph::from_records({kFeb, 0}, std::move(pages), records);
}

/// Unattributed graph over ids "n00".."nXX", all anti, one fan each.
inline DirectedGraph make_topology(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<NodeSpec> nodes;
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "n%02zu", i);
    nodes.push_back({buf, 'r', 1});
  }
  std::vector<std::pair<std::string, std::string>> named;
  for (const auto& [u, v] : edges) named.emplace_back(nodes[static_cast<std::size_t>(u)].id,
                                                      nodes[static_cast<std::size_t>(v)].id);
  return make_graph(nodes, named);
}

/// Erdos-Renyi style digraph (self-loops allowed) with random polarities and fans.
inline DirectedGraph random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<NodeSpec> nodes;
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "v%03zu", i);
    nodes.push_back({buf, "rbg"[rng.below(3)], static_cast<std::int64_t>(rng.below(1000)),
                     static_cast<std::int64_t>(rng.below(1000))});
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (rng.bernoulli(p)) edges.emplace_back(nodes[u].id, nodes[v].id);
    }
  }
  return make_graph(nodes, edges);
}

/// Edge list of a graph's topology in index space.
inline std::vector<std::pair<NodeIndex, NodeIndex>> edge_pairs(const DirectedGraph& g) {
  std::vector<std::pair<NodeIndex, NodeIndex>> out;
  for (const auto& e : g.edges()) out.emplace_back(e.src, e.dst);
  return out;
}

/// Vaccination-like synthetic dataset: a pro group with a large reciprocal
/// core, an anti group fanning out from a small core, a sparse neutral group,
/// and random cross-group edges. Writes nodes.csv, edges_feb2019.csv and
/// edges_oct2019.csv into `dir`.
inline void write_synthetic_dataset(const std::filesystem::path& dir, std::uint64_t seed, std::size_t per_group = 40) {
  Rng rng(seed);
  std::filesystem::create_directories(dir);
  struct Page {
    std::string id;
    char polarity;
    std::int64_t feb;
    std::int64_t oct;
  };
  std::vector<Page> pages;
  char buf[32];
  for (const char pol : {'r', 'b', 'g'}) {
    for (std::size_t i = 0; i < per_group; ++i) {
      std::snprintf(buf, sizeof buf, "%c_%03zu", pol == 'r' ? 'a' : pol == 'b' ? 'p' : 'n', i);
      const auto feb = static_cast<std::int64_t>(rng.below(5000));
      const auto change = static_cast<std::int64_t>(rng.below(600)) - 150;
      pages.push_back({buf, pol, feb, std::max<std::int64_t>(0, feb + change)});
    }
  }
  const auto group = [&](std::size_t g, std::size_t i) { return pages[g * per_group + i].id; };
  auto edges_for = [&](double density) {
    std::vector<std::pair<std::string, std::string>> edges;
    const std::size_t core = per_group * 3 / 5;
    // pro: reciprocal ring core plus chords, periphery pointing in or out
    for (std::size_t i = 0; i < core; ++i) {
      edges.emplace_back(group(1, i), group(1, (i + 1) % core));
      if (rng.bernoulli(density)) edges.emplace_back(group(1, (i + 1) % core), group(1, i));
    }
    for (std::size_t i = core; i < per_group; ++i) {
      const auto target = group(1, rng.below(core));
      rng.bernoulli(0.5) ? edges.emplace_back(group(1, i), target) : edges.emplace_back(target, group(1, i));
    }
    // anti: core of 4, everything else reachable from it
    for (std::size_t i = 0; i < 4; ++i) edges.emplace_back(group(0, i), group(0, (i + 1) % 4));
    for (std::size_t i = 4; i < per_group; ++i) edges.emplace_back(group(0, rng.below(i)), group(0, i));
    // neutral: a few isolated pairs
    for (std::size_t i = 0; i + 1 < per_group; i += 6) edges.emplace_back(group(2, i), group(2, i + 1));
    // cross-group recommendations
    for (std::size_t k = 0; k < per_group * density * 2; ++k) {
      const std::size_t ga = rng.below(3), gb = rng.below(3);
      if (ga != gb) edges.emplace_back(group(ga, rng.below(per_group)), group(gb, rng.below(per_group)));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
  };
  {
    std::ofstream out(dir / "nodes.csv");
    out << "id,polarity,fans_feb2019,fans_oct2019\n";
    for (const auto& p : pages) out << p.id << ',' << p.polarity << ',' << p.feb << ',' << p.oct << '\n';
  }
  for (const auto& [name, density] : {std::pair{"edges_feb2019.csv", 0.3}, std::pair{"edges_oct2019.csv", 0.5}}) {
    std::ofstream out(dir / name);
    out << "source_id,target_id\n";
    for (const auto& [s, t] : edges_for(density)) out << s << ',' << t << '\n';
  }
}

}  // namespace btv::testing

namespace btv::testing {

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("btv-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace btv::testing
