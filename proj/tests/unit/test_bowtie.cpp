#include <doctest.h>

#include <set>

#include "btv/bowtie.hpp"
#include "btv/error.hpp"
#include "btv/partition.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace btv;
using namespace btv::testing;

namespace {

BowtieRole role(const BowtieDecomposition& d, const std::string& id) { return *d.role_of(id); }

}  // namespace

TEST_CASE("strongly connected components") {
  const auto cycle = make_topology(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(strongly_connected_components(cycle).size() == 1);
  const auto path = make_topology(3, {{0, 1}, {1, 2}});
  CHECK(strongly_connected_components(path).size() == 3);
}

TEST_CASE("components match the closure oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = random_graph(1 + rng.below(10), 0.05 + 0.3 * rng.uniform(), rng);
    auto ours = strongly_connected_components(g.topology());
    std::sort(ours.begin(), ours.end());
    auto oracle = closure_components(g.node_count(), edge_pairs(g));
    std::sort(oracle.begin(), oracle.end());
    CHECK(ours == oracle);
  }
}

TEST_CASE("largest_scc tie-break and edge cases") {
  const auto single = make_topology(1, {});
  CHECK(largest_scc(single) == std::vector<std::string>{"n00"});
  const auto pairs = make_graph({{"a"}, {"b"}, {"c"}, {"d"}}, {{"c", "d"}, {"d", "c"}, {"a", "b"}, {"b", "a"}});
  CHECK(largest_scc(pairs) == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(largest_scc(make_topology(0, {})), DomainError);
}

TEST_CASE("deep chains do not exhaust the call stack") {
  const NodeIndex m = 200000;
  std::vector<std::pair<NodeIndex, NodeIndex>> cycle, path;
  for (NodeIndex i = 0; i < m; ++i) cycle.emplace_back(i, (i + 1) % m);
  for (NodeIndex i = 0; i + 1 < m; ++i) path.emplace_back(i, i + 1);
  CHECK(largest_scc(Digraph(m, cycle)).size() == m);
  const auto roles = bowtie_roles(Digraph(m, path));
  CHECK(count_roles(roles)[static_cast<std::size_t>(BowtieRole::Scc)] == 1);
}

TEST_CASE("reachable_from") {
  const auto g = make_graph({{"a"}, {"b"}, {"c"}, {"x"}}, {{"a", "b"}, {"b", "c"}});
  CHECK(reachable_from(g, std::vector<std::string>{"x"}) == std::vector<std::string>{"x"});
  CHECK(reachable_from(g, std::vector<std::string>{"a"}) == std::vector<std::string>{"a", "b", "c"});
  CHECK_THROWS_AS(reachable_from(g, std::vector<std::string>{"zz"}), LookupError);
}

TEST_CASE("reachable_from matches closure on random graphs") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_graph(12, 0.12, rng);
    const auto reach = closure(12, edge_pairs(g));
    const NodeIndex s = static_cast<NodeIndex>(rng.below(12));
    std::vector<std::string> expected;
    for (NodeIndex v = 0; v < 12; ++v)
      if (reach[s][v]) expected.push_back(g.id(v));
    CHECK(reachable_from(g, std::vector<std::string>{g.id(s)}) == expected);
  }
}

TEST_CASE("decompose worked examples") {
  const auto cycle = decompose(make_topology(3, {{0, 1}, {1, 2}, {2, 0}}));
  CHECK(at(cycle.sizes, BowtieRole::Scc) == 3);

  const auto g = make_graph({{"a"}, {"b"}, {"s1"}, {"s2"}, {"x"}},
                            {{"a", "s1"}, {"s1", "s2"}, {"s2", "s1"}, {"s2", "b"}});
  const auto d = decompose(g);
  CHECK(role(d, "a") == BowtieRole::In);
  CHECK(role(d, "s1") == BowtieRole::Scc);
  CHECK(role(d, "s2") == BowtieRole::Scc);
  CHECK(role(d, "b") == BowtieRole::Out);
  CHECK(role(d, "x") == BowtieRole::Others);

  const auto ab = decompose(make_graph({{"a"}, {"b"}}, {{"a", "b"}}));
  CHECK(role(ab, "a") == BowtieRole::Scc);
  CHECK(role(ab, "b") == BowtieRole::Out);

  const auto loop = decompose(make_graph({{"a"}, {"b"}}, {{"b", "b"}}));
  CHECK(role(loop, "a") == BowtieRole::Scc);
  CHECK(role(loop, "b") == BowtieRole::Others);

  CHECK_THROWS_AS(decompose(make_topology(0, {})), DomainError);
}

TEST_CASE("tubes and tendrils") {
  // in -> s <-> s2 -> out ; in -> t -> out ; in -> it ; ot -> out
  const auto g = make_graph({{"in"}, {"s"}, {"s2"}, {"out"}, {"t"}, {"it"}, {"ot"}},
                            {{"in", "s"}, {"s", "s2"}, {"s2", "s"}, {"s2", "out"}, {"in", "t"}, {"t", "out"},
                             {"in", "it"}, {"ot", "out"}});
  const auto d = decompose(g);
  CHECK(role(d, "t") == BowtieRole::Tubes);
  CHECK(role(d, "it") == BowtieRole::InTendrils);
  CHECK(role(d, "ot") == BowtieRole::OutTendrils);
}

TEST_CASE("property: partition law and set-definition invariants") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    const auto g = random_graph(n, 0.01 + 0.2 * rng.uniform(), rng);
    const auto d = decompose(g);
    std::size_t total = 0;
    for (const auto r : kAllRoles) total += at(d.sizes, r);
    CHECK(total == n);
    CHECK(at(d.sizes, BowtieRole::Unassigned) == 0);

    const auto reach = closure(n, edge_pairs(g));
    std::vector<NodeIndex> s, in, out;
    for (NodeIndex v = 0; v < n; ++v) {
      if (d.roles[v] == BowtieRole::Scc) s.push_back(v);
      if (d.roles[v] == BowtieRole::In) in.push_back(v);
      if (d.roles[v] == BowtieRole::Out) out.push_back(v);
    }
    for (const auto a : s)
      for (const auto b : s) CHECK(reach[a][b]);
    for (const auto v : in)
      for (const auto x : s) CHECK(reach[v][x]);
    for (const auto v : out)
      for (const auto x : s) CHECK(reach[x][v]);
    for (NodeIndex v = 0; v < n; ++v) {
      if (d.roles[v] == BowtieRole::InTendrils)
        for (const auto o : out) CHECK_FALSE(reach[v][o]);
      if (d.roles[v] == BowtieRole::OutTendrils)
        for (const auto i : in) CHECK_FALSE(reach[i][v]);
    }
    const auto again = decompose(g);
    CHECK(again.roles == d.roles);
  }
}

TEST_CASE("oracle equivalence on small graphs") {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const auto g = random_graph(n, 0.05 + 0.35 * rng.uniform(), rng);
    CHECK(decompose(g).roles == brute_force_roles(n, edge_pairs(g)));
  }
}

TEST_CASE("recursive_decompose") {
  // two 5-cycles joined by one cross edge
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 5; ++i) edges.emplace_back(i, (i + 1) % 5);
  for (int i = 0; i < 5; ++i) edges.emplace_back(5 + i, 5 + (i + 1) % 5);
  edges.emplace_back(0, 5);
  const auto g = make_topology(10, edges);
  std::vector<std::pair<std::string, std::vector<std::string>>> parts(2);
  parts[0].first = "x";
  parts[1].first = "y";
  for (NodeIndex v = 0; v < 10; ++v) parts[v < 5 ? 0 : 1].second.push_back(g.id(v));
  const auto p = Partition::from_parts(parts, PartitionSource::External);
  const auto d = recursive_decompose(g, p);
  CHECK(at(d.sizes, BowtieRole::Scc) == 10);
  REQUIRE(d.parts.size() == 2);
  CHECK(d.parts[0].label == "x");

  // the whole-graph run treats the cross edge normally
  CHECK(at(decompose(g).sizes, BowtieRole::Out) == 5);
}

TEST_CASE("recursive_decompose with small parts and validation") {
  const auto g = make_topology(7, {{0, 1}, {1, 0}, {5, 6}});
  std::vector<std::pair<std::string, std::vector<std::string>>> parts = {
      {"big", {"n00", "n01", "n02", "n03", "n04"}}, {"tiny", {"n05", "n06"}}};
  const auto d = recursive_decompose(g, Partition::from_parts(parts, PartitionSource::External));
  CHECK(role(d, "n05") == BowtieRole::Unassigned);
  CHECK(role(d, "n06") == BowtieRole::Unassigned);
  CHECK(role(d, "n00") == BowtieRole::Scc);
  CHECK(role(d, "n02") == BowtieRole::Others);

  std::vector<std::pair<std::string, std::vector<std::string>>> partial = {{"p", {"n00"}}};
  CHECK_THROWS_AS(recursive_decompose(g, Partition::from_parts(partial, PartitionSource::External)), ValidationError);
  std::vector<std::pair<std::string, std::vector<std::string>>> overlap = {{"p", {"n00"}}, {"q", {"n00"}}};
  CHECK_THROWS_AS(Partition::from_parts(overlap, PartitionSource::External), ValidationError);
}

TEST_CASE("property: trivial partition with min_size 1 equals decompose; parallel equals serial") {
  Rng rng(29);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = random_graph(1 + rng.below(60), 0.05, rng);
    std::map<std::string, std::string> all;
    for (const auto& n : g.nodes()) all.emplace(n.id, "all");
    const Partition trivial(all, PartitionSource::External);
    CHECK(recursive_decompose(g, trivial, 1).roles == decompose(g).roles);

    const auto groups = polarity_partition(g);
    const auto par = recursive_decompose(g, groups);
    const auto ser = reference::recursive_decompose(g, groups);
    CHECK(par.roles == ser.roles);
    CHECK(par.part_of == ser.part_of);
  }
}

TEST_CASE("exports") {
  const auto g = make_graph({{"a", 'r'}, {"b", 'b'}}, {{"a", "b"}});
  const auto csv = roles_csv(decompose(g));
  CHECK(csv == "id,polarity,partition_part,role\na,r,ALL,SCC\nb,b,ALL,OUT\n");
  const auto j = decomposition_summary_json(decompose(g));
  CHECK(j["sizes"]["SCC"] == 1);
  CHECK(j["kind"] == "whole");
  CHECK(parse_role("OUTTENDRILS") == BowtieRole::OutTendrils);
  CHECK_THROWS_AS(parse_role("nope"), ValidationError);
}
