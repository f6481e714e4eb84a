#include "btv/graph_io.hpp"

#include <fstream>
#include <set>

#include "btv/error.hpp"
#include "csv.hpp"

namespace btv {

using nlohmann::json;

json graph_to_json(const DirectedGraph& g) {
  json doc;
  doc["snapshot"] = {{"name", g.snapshot().name}, {"order", g.snapshot().order}};
  json nodes = json::array();
  for (const auto& n : g.nodes()) {
    json fans = json::object();
    for (const auto& [label, count] : n.fans) fans[label] = count;
    nodes.push_back({{"id", n.id}, {"polarity", std::string(1, polarity_code(n.polarity))}, {"fans", fans}});
  }
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({{"src", g.id(e.src)}, {"dst", g.id(e.dst)}, {"weight", e.weight}});
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return doc;
}

DirectedGraph graph_from_json(const json& doc) {
  try {
    SnapshotLabel snapshot;
    const auto& s = doc.at("snapshot");
    if (s.is_string()) {
      snapshot.name = s.get<std::string>();
    } else {
      snapshot.name = s.at("name").get<std::string>();
      snapshot.order = s.value("order", 0);
    }
    std::vector<PageNode> nodes;
    for (const auto& n : doc.at("nodes")) {
      PageNode node;
      node.id = n.at("id").get<std::string>();
      node.polarity = parse_polarity(n.at("polarity").get<std::string>());
      for (const auto& [label, count] : n.at("fans").items()) node.fans[label] = count.get<std::int64_t>();
      nodes.push_back(std::move(node));
    }
    std::vector<DirectedGraph::EdgeRecord> edges;
    for (const auto& e : doc.at("edges")) {
      edges.push_back({e.at("src").get<std::string>(), e.at("dst").get<std::string>(), e.at("weight").get<double>()});
    }
    return DirectedGraph::from_records(std::move(snapshot), std::move(nodes), edges);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed graph JSON: ") + e.what());
  }
}

json edge_summary_to_json(const EdgeSummary& s) {
  json cells = json::array();
  constexpr Polarity kAll[] = {Polarity::Anti, Polarity::Pro, Polarity::Neutral};
  for (auto a : kAll) {
    for (auto b : kAll) {
      const auto& c = s.by_polarity[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      cells.push_back({{"source_polarity", std::string(1, polarity_code(a))},
                       {"target_polarity", std::string(1, polarity_code(b))},
                       {"count", c.count},
                       {"mean_weight", c.mean_weight}});
    }
  }
  return {{"edge_count", s.edge_count},      {"two_way_edges", s.two_way_edges}, {"self_loops", s.self_loops},
          {"two_way_share", s.two_way_share}, {"self_share", s.self_share},      {"by_polarity", cells}};
}

void write_snapshot_csv(const DirectedGraph& g, const std::filesystem::path& nodes_path,
                        const std::filesystem::path& edges_path) {
  std::set<std::string> labels;
  for (const auto& n : g.nodes()) {
    for (const auto& [label, count] : n.fans) labels.insert(label);
  }
  std::ofstream nodes(nodes_path, std::ios::binary);
  if (!nodes) throw IoError("cannot write " + nodes_path.string());
  nodes << "id,polarity";
  for (const auto& l : labels) nodes << ",fans_" << l;
  nodes << '\n';
  for (const auto& n : g.nodes()) {
    nodes << detail::csv_escape(n.id) << ',' << polarity_code(n.polarity);
    for (const auto& l : labels) {
      nodes << ',';
      if (const auto it = n.fans.find(l); it != n.fans.end()) nodes << it->second;
    }
    nodes << '\n';
  }
  std::ofstream edges(edges_path, std::ios::binary);
  if (!edges) throw IoError("cannot write " + edges_path.string());
  edges << "source_id,target_id\n";
  for (const auto& e : g.edges()) edges << detail::csv_escape(g.id(e.src)) << ',' << detail::csv_escape(g.id(e.dst)) << '\n';
}

}  // namespace btv
