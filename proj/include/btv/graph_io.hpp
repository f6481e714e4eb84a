#pragma once

#include <filesystem>

#include <json.hpp>

#include "btv/graph.hpp"

namespace btv {

/// {snapshot, nodes:[{id,polarity,fans}], edges:[{src,dst,weight}]}
nlohmann::json graph_to_json(const DirectedGraph& g);
DirectedGraph graph_from_json(const nlohmann::json& doc);

nlohmann::json edge_summary_to_json(const EdgeSummary& s);

/// Writes nodes/edges CSVs that load_snapshot reads back into an identical graph.
void write_snapshot_csv(const DirectedGraph& g, const std::filesystem::path& nodes_path,
                        const std::filesystem::path& edges_path);

}  // namespace btv
