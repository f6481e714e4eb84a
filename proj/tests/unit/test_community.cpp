#include <doctest.h>

#include <cmath>
#include <numeric>

#include "btv/community.hpp"
#include "btv/error.hpp"
#include "btv/partition.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace btv;
using namespace btv::testing;

namespace {

Partition partition_of(const DirectedGraph& g, const std::vector<int>& module) {
  std::map<std::string, std::string> a;
  for (NodeIndex v = 0; v < g.node_count(); ++v) a.emplace(g.id(v), std::to_string(module[v]));
  return Partition(a, PartitionSource::External);
}

double plogp(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

/// Codelength from the full teleporting transition matrix: module exit flow is
/// the probability mass leaving the module in one step of the recorded walk.
double oracle_codelength(const DirectedGraph& g, const std::vector<int>& module, double d) {
  const std::size_t n = g.node_count();
  const auto p = dense_pagerank(g, d);
  std::vector<std::vector<double>> t(n, std::vector<double>(n));
  for (NodeIndex u = 0; u < n; ++u) {
    double total = 0.0;
    for (const auto& e : g.out_edges(u)) total += e.weight;
    for (NodeIndex v = 0; v < n; ++v) {
      t[u][v] = total > 0 ? d * g.weight(u, v) / total + (1 - d) / static_cast<double>(n) : 1.0 / static_cast<double>(n);
    }
  }
  const int k = *std::max_element(module.begin(), module.end()) + 1;
  std::vector<double> q(k, 0.0), pm(k, 0.0);
  for (NodeIndex u = 0; u < n; ++u) {
    pm[module[u]] += p[u];
    for (NodeIndex v = 0; v < n; ++v)
      if (module[u] != module[v]) q[module[u]] += p[u] * t[u][v];
  }
  double sum_q = 0.0, a = 0.0, b = 0.0, c = 0.0;
  for (int i = 0; i < k; ++i) {
    sum_q += q[i];
    a += plogp(q[i]);
    c += plogp(q[i] + pm[i]);
  }
  for (const double x : p) b += plogp(x);
  return plogp(sum_q) - 2 * a - b + c;
}

DirectedGraph two_blobs(std::size_t size, bool weak_link) {
  std::vector<NodeSpec> nodes;
  for (std::size_t i = 0; i < 2 * size; ++i) nodes.push_back({"b" + std::to_string(10 + i), 'g', 10});
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t blob = 0; blob < 2; ++blob)
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j)
        if (i != j) edges.emplace_back(nodes[blob * size + i].id, nodes[blob * size + j].id);
  if (weak_link) {
    nodes[0].fans = 1;  // lighter endpoint for the bridge
    edges.emplace_back(nodes[0].id, nodes[size].id);
  }
  return make_graph(nodes, edges);
}

}  // namespace

TEST_CASE("stationary_flow examples") {
  const auto cycle = make_graph({{"a", 'g', 2}, {"b", 'g', 2}}, {{"a", "b"}, {"b", "a"}});
  const auto f = stationary_flow(cycle);
  CHECK(f.visit[0] == doctest::Approx(0.5));
  CHECK(f.visit[1] == doctest::Approx(0.5));
  const auto loop = make_graph({{"a"}}, {{"a", "a"}});
  CHECK(stationary_flow(loop).visit[0] == doctest::Approx(1.0));
}

TEST_CASE("stationary_flow matches the dense linear solve") {
  const auto g = make_graph({{"a", 'r', 3}, {"b", 'b', 1}, {"c", 'g', 7}, {"d", 'g', 2}, {"e", 'r', 5}},
                            {{"a", "b"}, {"a", "c"}, {"b", "c"}, {"c", "a"}, {"c", "d"}, {"d", "e"}, {"e", "a"}, {"e", "e"}});
  const auto f = stationary_flow(g);
  const auto oracle = dense_pagerank(g, 0.85);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(f.visit[i] - oracle[i]) < 1e-8);

  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto r = random_graph(2 + rng.below(20), 0.2, rng);
    const auto fr = stationary_flow(r, 0.85, 1e-12);
    const auto dr = dense_pagerank(r, 0.85);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.node_count(); ++i) {
      CHECK(std::abs(fr.visit[i] - dr[i]) < 1e-8);
      CHECK(fr.visit[i] >= 0.0);
      sum += fr.visit[i];
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    CHECK(reference::stationary_flow(r, 0.85, 1e-12).visit == fr.visit);
  }
}

TEST_CASE("stationary_flow errors") {
  CHECK_THROWS_AS(stationary_flow(make_topology(0, {})), DomainError);
  const auto g = make_topology(2, {{0, 1}});
  CHECK_THROWS_AS(stationary_flow(g, 1.0), DomainError);
  CHECK_THROWS_AS(stationary_flow(g, 0.0), DomainError);
  CHECK_THROWS_AS(stationary_flow(g, 0.85, 1e-10, 1), NumericalError);
}

TEST_CASE("zero-weight edges do not change flow or codelength") {
  const auto with = make_graph({{"a", 'g', 0}, {"b", 'g', 2}, {"c", 'g', 3}}, {{"a", "b"}, {"b", "c"}, {"c", "b"}});
  const auto without = make_graph({{"a", 'g', 0}, {"b", 'g', 2}, {"c", 'g', 3}}, {{"b", "c"}, {"c", "b"}});
  const auto fw = stationary_flow(with);
  const auto fo = stationary_flow(without);
  CHECK(fw.visit == fo.visit);
  const std::vector<int> m{0, 1, 1};
  CHECK(map_equation_codelength(with, partition_of(with, m), fw) ==
        map_equation_codelength(without, partition_of(without, m), fo));
}

TEST_CASE("codelength limits") {
  const auto g = make_graph({{"a", 'g', 1}, {"b", 'g', 4}, {"c", 'g', 2}},
                            {{"a", "b"}, {"b", "c"}, {"c", "a"}, {"b", "a"}});
  const auto f = stationary_flow(g);
  double entropy = 0.0;
  for (const double p : f.visit) entropy -= plogp(p);
  CHECK(map_equation_codelength(g, partition_of(g, {0, 0, 0}), f) == doctest::Approx(entropy));

  const auto cycle = make_graph({{"a"}, {"b"}}, {{"a", "b"}, {"b", "a"}});
  const auto fc = stationary_flow(cycle);
  CHECK(map_equation_codelength(cycle, partition_of(cycle, {0, 1}), fc) >
        map_equation_codelength(cycle, partition_of(cycle, {0, 0}), fc));

  const auto blobs = two_blobs(5, false);
  const auto fb = stationary_flow(blobs);
  std::vector<int> split(10, 0), one(10, 0);
  for (int i = 5; i < 10; ++i) split[i] = 1;
  CHECK(map_equation_codelength(blobs, partition_of(blobs, split), fb) <
        map_equation_codelength(blobs, partition_of(blobs, one), fb));
}

TEST_CASE("codelength matches the transition-matrix oracle") {
  Rng rng(43);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = random_graph(2 + rng.below(12), 0.25, rng);
    std::vector<int> m(g.node_count());
    const int k = 1 + static_cast<int>(rng.below(4));
    for (auto& x : m) x = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    // labels must be dense for the oracle
    std::map<int, int> dense;
    for (auto& x : m) x = dense.emplace(x, static_cast<int>(dense.size())).first->second;
    const auto f = stationary_flow(g, 0.85, 1e-13);
    CHECK(map_equation_codelength(g, partition_of(g, m), f) == doctest::Approx(oracle_codelength(g, m, 0.85)).epsilon(1e-7));
  }
}

TEST_CASE("detect_communities finds planted blobs") {
  const auto g = two_blobs(6, true);
  const auto r = detect_communities(g, 5, 1);
  CHECK(r.module_count == 2);
  const auto& a = r.partition.assignment();
  for (int i = 0; i < 6; ++i) CHECK(a.at(g.id(i)) == a.at(g.id(0)));
  for (int i = 6; i < 12; ++i) CHECK(a.at(g.id(i)) == a.at(g.id(6)));
  CHECK(a.at(g.id(0)) != a.at(g.id(6)));
}

TEST_CASE("detect_communities never does worse than simple baselines") {
  std::vector<std::pair<int, int>> ring;
  for (int i = 0; i < 30; ++i) ring.emplace_back(i, (i + 1) % 30);
  Rng rng(47);
  std::vector<DirectedGraph> graphs{make_topology(30, ring)};
  for (int t = 0; t < 10; ++t) graphs.push_back(random_graph(5 + rng.below(40), 0.08, rng));
  for (const auto& g : graphs) {
    const auto r = detect_communities(g, 3, 9);
    const auto f = stationary_flow(g);
    std::vector<int> singles(g.node_count());
    std::iota(singles.begin(), singles.end(), 0);
    const std::vector<int> one(g.node_count(), 0);
    CHECK(r.codelength <= map_equation_codelength(g, partition_of(g, one), f) + 1e-9);
    CHECK(r.codelength <= map_equation_codelength(g, partition_of(g, singles), f) + 1e-9);
    CHECK(r.codelength == doctest::Approx(map_equation_codelength(g, r.partition, f)).epsilon(1e-9));
    CHECK(r.trial_codelengths.size() == 3);
    CHECK(r.codelength == *std::min_element(r.trial_codelengths.begin(), r.trial_codelengths.end()));
  }
}

TEST_CASE("detect_communities is deterministic and matches the serial reference") {
  Rng rng(53);
  for (int t = 0; t < 5; ++t) {
    const auto g = random_graph(30 + rng.below(30), 0.06, rng);
    const auto a = detect_communities(g, 4, 77);
    const auto b = detect_communities(g, 4, 77);
    const auto s = reference::detect_communities(g, 4, 77);
    CHECK(a.partition == b.partition);
    CHECK(a.partition == s.partition);
    CHECK(a.trial_codelengths == s.trial_codelengths);
    CHECK(a.best_trial == s.best_trial);
  }
}

TEST_CASE("module labels are ranked by size") {
  const auto g = two_blobs(6, true);
  const auto sizes = detect_communities(g, 2, 3).partition.part_sizes();
  CHECK(sizes.count("1") == 1);
  CHECK(sizes.count("2") == 1);
  CHECK_THROWS_AS(detect_communities(g, 0, 3), DomainError);
}

TEST_CASE("collapse_small") {
  std::vector<std::pair<std::string, std::vector<std::string>>> parts;
  int next = 0;
  for (const int size : {6, 5, 4, 1}) {
    std::vector<std::string> members;
    for (int i = 0; i < size; ++i) members.push_back("m" + std::to_string(next++));
    parts.emplace_back("p" + std::to_string(size), members);
  }
  const auto p = Partition::from_parts(parts, PartitionSource::Detected);
  const auto c = collapse_small(p);
  CHECK(c.part_sizes().at(std::string(kUnassignedLabel)) == 5);
  CHECK(c.part_sizes().at("p6") == 6);
  CHECK(c.part_sizes().at("p5") == 5);
  CHECK(collapse_small(c) == c);

  std::vector<std::pair<std::string, std::vector<std::string>>> big = {{"x", {"a", "b", "c", "d", "e"}}};
  const auto q = Partition::from_parts(big, PartitionSource::Detected);
  CHECK(collapse_small(q) == q);
  std::vector<std::pair<std::string, std::vector<std::string>>> four = {{"x", {"a", "b", "c", "d"}}};
  CHECK(collapse_small(Partition::from_parts(four, PartitionSource::Detected)).part_sizes().count("x") == 0);
}

TEST_CASE("partition_agreement") {
  std::map<std::string, std::string> r1{{"u", "1"}, {"v", "1"}, {"w", "2"}};
  std::map<std::string, std::string> r2{{"u", "1"}, {"v", "2"}, {"w", "2"}};
  const std::vector<Partition> same{Partition(r1, PartitionSource::Detected), Partition(r1, PartitionSource::Detected)};
  const auto m = partition_agreement(same);
  CHECK(m.at(0, 1) == 1.0);
  CHECK(m.at(0, 2) == 0.0);
  CHECK(m.unstable_nodes().empty());

  const std::vector<Partition> mixed{Partition(r1, PartitionSource::Detected), Partition(r2, PartitionSource::Detected)};
  const auto mm = partition_agreement(mixed);
  CHECK(mm.at(0, 1) == 0.5);
  CHECK(mm.at(1, 0) == 0.5);
  for (std::size_t i = 0; i < 3; ++i) CHECK(mm.at(i, i) == 1.0);
  CHECK(mm.unstable_nodes() == std::vector<std::string>{"u", "v", "w"});

  std::map<std::string, std::string> other{{"u", "1"}, {"x", "1"}, {"w", "2"}};
  const std::vector<Partition> bad{Partition(r1, PartitionSource::Detected), Partition(other, PartitionSource::Detected)};
  CHECK_THROWS_AS(partition_agreement(bad), ValidationError);
}

TEST_CASE("partition CSV round trip") {
  const auto dir = scratch_dir("partition");
  std::map<std::string, std::string> a{{"x", "1"}, {"y", "UNASSIGNED"}, {"z,1", "2"}};
  const Partition p(a, PartitionSource::Detected);
  write_partition_csv(p, dir / "p.csv");
  const auto back = read_partition_csv(dir / "p.csv");
  CHECK(back == p);
  CHECK(back.source() == PartitionSource::External);
  write_text(dir / "bad.csv", "id,part_label\nx,1\nx,2\n");
  CHECK_THROWS_AS(read_partition_csv(dir / "bad.csv"), ValidationError);
}
