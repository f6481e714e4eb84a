#include "btv/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <set>

#include <spdlog/spdlog.h>

#include "btv/error.hpp"
#include "csv.hpp"

namespace btv {

std::string_view category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::Validation: return "validation";
    case ErrorCategory::Lookup: return "lookup";
    case ErrorCategory::Domain: return "domain";
    case ErrorCategory::Precondition: return "precondition";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Numerical: return "numerical";
  }
  return "unknown";
}

char polarity_code(Polarity p) noexcept {
  switch (p) {
    case Polarity::Anti: return 'r';
    case Polarity::Pro: return 'b';
    case Polarity::Neutral: return 'g';
  }
  return '?';
}

Polarity parse_polarity(std::string_view code) {
  if (code == "r") return Polarity::Anti;
  if (code == "b") return Polarity::Pro;
  if (code == "g") return Polarity::Neutral;
  throw ValidationError("unknown polarity code '" + std::string(code) + "'");
}

std::int64_t PageNode::fans_at(std::string_view snapshot) const {
  const auto it = fans.find(std::string(snapshot));
  if (it == fans.end()) {
    throw LookupError("page '" + id + "' has no fan count for snapshot '" + std::string(snapshot) + "'");
  }
  return it->second;
}

// --- Digraph --------------------------------------------------------------

Digraph::Digraph(std::size_t node_count, std::span<const std::pair<NodeIndex, NodeIndex>> edges) {
  out_offsets_.assign(node_count + 1, 0);
  in_offsets_.assign(node_count + 1, 0);
  for (const auto& [u, v] : edges) {
    ++out_offsets_[u + 1];
    ++in_offsets_[v + 1];
  }
  std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
  std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
  out_targets_.resize(edges.size());
  in_sources_.resize(edges.size());
  std::vector<std::size_t> out_cursor(out_offsets_.begin(), out_offsets_.end() - 1);
  std::vector<std::size_t> in_cursor(in_offsets_.begin(), in_offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    out_targets_[out_cursor[u]++] = v;
    in_sources_[in_cursor[v]++] = u;
  }
}

// --- DirectedGraph --------------------------------------------------------

DirectedGraph DirectedGraph::from_records(SnapshotLabel snapshot, std::vector<PageNode> nodes,
                                          std::span<const EdgeRecord> edges) {
  DirectedGraph g;
  g.snapshot_ = std::move(snapshot);
  std::sort(nodes.begin(), nodes.end(), [](const PageNode& a, const PageNode& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].id == nodes[i - 1].id) throw ValidationError("duplicate node id '" + nodes[i].id + "'");
  }
  for (const auto& n : nodes) {
    for (const auto& [label, count] : n.fans) {
      if (count < 0) throw ValidationError("negative fan count for '" + n.id + "' at " + label);
    }
  }
  g.nodes_ = std::move(nodes);
  g.index_.reserve(g.nodes_.size());
  for (NodeIndex i = 0; i < g.nodes_.size(); ++i) g.index_.emplace(g.nodes_[i].id, i);

  g.edges_.reserve(edges.size());
  for (const auto& e : edges) {
    const auto s = g.find(e.src);
    const auto t = g.find(e.dst);
    if (!s) throw LookupError("edge source '" + e.src + "' is not a node");
    if (!t) throw LookupError("edge target '" + e.dst + "' is not a node");
    if (!(e.weight >= 0.0)) throw ValidationError("edge weight must be >= 0 for " + e.src + "->" + e.dst);
    g.edges_.push_back({*s, *t, e.weight});
  }
  std::sort(g.edges_.begin(), g.edges_.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
  for (std::size_t i = 1; i < g.edges_.size(); ++i) {
    if (g.edges_[i].src == g.edges_[i - 1].src && g.edges_[i].dst == g.edges_[i - 1].dst) {
      throw ValidationError("duplicate edge " + g.id(g.edges_[i].src) + "->" + g.id(g.edges_[i].dst));
    }
  }
  g.build_index();
  return g;
}

void DirectedGraph::build_index() {
  if (index_.size() != nodes_.size()) {
    index_.clear();
    index_.reserve(nodes_.size());
    for (NodeIndex i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i].id, i);
  }
  const std::size_t n = nodes_.size();
  out_offsets_.assign(n + 1, 0);
  in_offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++out_offsets_[e.src + 1];
    ++in_offsets_[e.dst + 1];
  }
  std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
  std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
  in_edge_ids_.resize(edges_.size());
  std::vector<std::size_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
  // edges_ is sorted by source, so each in-list comes out ordered by source.
  for (std::size_t k = 0; k < edges_.size(); ++k) in_edge_ids_[cursor[edges_[k].dst]++] = k;

  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  pairs.reserve(edges_.size());
  for (const auto& e : edges_) pairs.emplace_back(e.src, e.dst);
  topology_ = Digraph(n, pairs);
}

std::optional<NodeIndex> DirectedGraph::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex DirectedGraph::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw LookupError("unknown node id '" + std::string(id) + "'");
}

double DirectedGraph::weight(NodeIndex u, NodeIndex v) const noexcept {
  const auto out = out_edges(u);
  const auto it = std::lower_bound(out.begin(), out.end(), v, [](const Edge& e, NodeIndex t) { return e.dst < t; });
  return (it != out.end() && it->dst == v) ? it->weight : 0.0;
}

bool DirectedGraph::has_edge(NodeIndex u, NodeIndex v) const noexcept {
  const auto out = out_edges(u);
  const auto it = std::lower_bound(out.begin(), out.end(), v, [](const Edge& e, NodeIndex t) { return e.dst < t; });
  return it != out.end() && it->dst == v;
}

// --- ingestion ------------------------------------------------------------

namespace {

constexpr std::string_view kFanPrefix = "fans_";

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::int64_t parse_fans(const std::string& text, const std::string& where) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) throw ValidationError(where + ": fan count '" + text + "' is not an integer");
  if (value < 0) throw ValidationError(where + ": negative fan count " + text);
  return value;
}

}  // namespace

std::vector<SnapshotLabel> read_snapshot_labels(const std::filesystem::path& nodes_path) {
  const auto table = detail::read_csv(nodes_path);
  std::vector<SnapshotLabel> labels;
  for (const auto& column : table.header) {
    if (column.starts_with(kFanPrefix)) {
      labels.push_back({lower(column.substr(kFanPrefix.size())), static_cast<int>(labels.size())});
    }
  }
  return labels;
}

DirectedGraph load_snapshot(const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path,
                            const SnapshotLabel& snapshot) {
  const auto node_table = detail::read_csv(nodes_path);
  const auto id_col = node_table.column("id", nodes_path);
  const auto pol_col = node_table.column("polarity", nodes_path);
  std::vector<std::pair<std::size_t, std::string>> fan_cols;
  for (std::size_t c = 0; c < node_table.header.size(); ++c) {
    const auto& h = node_table.header[c];
    if (h.starts_with(kFanPrefix)) fan_cols.emplace_back(c, lower(h.substr(kFanPrefix.size())));
  }
  const std::string wanted = lower(snapshot.name);
  const bool has_snapshot = std::any_of(fan_cols.begin(), fan_cols.end(), [&](const auto& fc) { return fc.second == wanted; });
  if (!has_snapshot) {
    throw ValidationError(nodes_path.string() + ": no column fans_" + wanted);
  }

  std::vector<PageNode> nodes;
  nodes.reserve(node_table.rows.size());
  for (std::size_t r = 0; r < node_table.rows.size(); ++r) {
    const auto& row = node_table.rows[r];
    const std::string where = nodes_path.string() + ":" + std::to_string(node_table.line_numbers[r]);
    PageNode node;
    node.id = row[id_col];
    if (node.id.empty()) throw ValidationError(where + ": empty id");
    try {
      node.polarity = parse_polarity(row[pol_col]);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    for (const auto& [c, label] : fan_cols) {
      if (row[c].empty()) {
        if (label == wanted) throw ValidationError(where + ": missing fans_" + label);
        continue;
      }
      node.fans[label] = parse_fans(row[c], where);
    }
    nodes.push_back(std::move(node));
  }

  std::unordered_map<std::string, std::int64_t> fans_now;
  fans_now.reserve(nodes.size());
  for (const auto& n : nodes) {
    if (!fans_now.emplace(n.id, n.fans.at(wanted)).second) {
      throw ValidationError(nodes_path.string() + ": duplicate node id '" + n.id + "'");
    }
  }

  const auto edge_table = detail::read_csv(edges_path);
  const auto src_col = edge_table.column("source_id", edges_path);
  const auto dst_col = edge_table.column("target_id", edges_path);
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<DirectedGraph::EdgeRecord> records;
  records.reserve(edge_table.rows.size());
  std::size_t duplicates = 0;
  for (std::size_t r = 0; r < edge_table.rows.size(); ++r) {
    const auto& row = edge_table.rows[r];
    const std::string where = edges_path.string() + ":" + std::to_string(edge_table.line_numbers[r]);
    const auto s = fans_now.find(row[src_col]);
    const auto t = fans_now.find(row[dst_col]);
    if (s == fans_now.end()) throw ValidationError(where + ": unknown source id '" + row[src_col] + "'");
    if (t == fans_now.end()) throw ValidationError(where + ": unknown target id '" + row[dst_col] + "'");
    if (!seen.emplace(row[src_col], row[dst_col]).second) {
      ++duplicates;
      continue;
    }
    records.push_back({row[src_col], row[dst_col], static_cast<double>(s->second) * static_cast<double>(t->second)});
  }
  if (duplicates > 0) {
    spdlog::warn("{}: collapsed {} duplicate edge row(s)", edges_path.string(), duplicates);
  }
  SnapshotLabel label{wanted, snapshot.order};
  return DirectedGraph::from_records(std::move(label), std::move(nodes), records);
}

// --- elementary operations ------------------------------------------------

double weighted_degree(const DirectedGraph& g, NodeIndex node, Direction direction) {
  if (node >= g.node_count()) throw LookupError("node index out of range");
  double total = 0.0;
  if (direction == Direction::Out) {
    for (const auto& e : g.out_edges(node)) total += e.weight;
  } else {
    const auto edges = g.edges();
    for (const auto k : g.in_edge_ids(node)) total += edges[k].weight;
  }
  return total;
}

double weighted_degree(const DirectedGraph& g, std::string_view node, Direction direction) {
  return weighted_degree(g, g.index_of(node), direction);
}

DirectedGraph induced_subgraph_by_index(const DirectedGraph& g, std::span<const NodeIndex> keep) {
  std::vector<NodeIndex> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  constexpr NodeIndex kDropped = static_cast<NodeIndex>(-1);
  std::vector<NodeIndex> remap(g.node_count(), kDropped);
  DirectedGraph sub;
  sub.snapshot_ = g.snapshot_;
  sub.nodes_.reserve(sorted.size());
  for (const NodeIndex old : sorted) {
    if (old >= g.node_count()) throw LookupError("node index out of range");
    remap[old] = static_cast<NodeIndex>(sub.nodes_.size());
    sub.nodes_.push_back(g.nodes_[old]);
  }
  // Index order is preserved, so filtered edges stay sorted by (src, dst).
  for (const auto& e : g.edges_) {
    if (remap[e.src] != kDropped && remap[e.dst] != kDropped) sub.edges_.push_back({remap[e.src], remap[e.dst], e.weight});
  }
  sub.build_index();
  return sub;
}

DirectedGraph induced_subgraph(const DirectedGraph& g, std::span<const std::string> keep) {
  std::vector<NodeIndex> indices;
  indices.reserve(keep.size());
  for (const auto& id : keep) indices.push_back(g.index_of(id));
  return induced_subgraph_by_index(g, indices);
}

DirectedGraph reverse(const DirectedGraph& g) {
  DirectedGraph r;
  r.snapshot_ = g.snapshot_;
  r.nodes_ = g.nodes_;
  r.edges_.reserve(g.edges_.size());
  for (const auto& e : g.edges_) r.edges_.push_back({e.dst, e.src, e.weight});
  std::sort(r.edges_.begin(), r.edges_.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
  r.build_index();
  return r;
}

EdgeSummary edge_summary(const DirectedGraph& g) {
  EdgeSummary s;
  double weight_sums[kPolarityCount][kPolarityCount] = {};
  for (const auto& e : g.edges()) {
    const auto ps = static_cast<std::size_t>(g.polarity(e.src));
    const auto pt = static_cast<std::size_t>(g.polarity(e.dst));
    ++s.by_polarity[ps][pt].count;
    weight_sums[ps][pt] += e.weight;
    if (e.src == e.dst) {
      ++s.self_loops;
    } else if (g.has_edge(e.dst, e.src)) {
      ++s.two_way_edges;
    }
  }
  for (std::size_t a = 0; a < kPolarityCount; ++a) {
    for (std::size_t b = 0; b < kPolarityCount; ++b) {
      auto& cell = s.by_polarity[a][b];
      cell.mean_weight = cell.count ? weight_sums[a][b] / static_cast<double>(cell.count) : 0.0;
    }
  }
  s.edge_count = g.edge_count();
  if (s.edge_count > 0) {
    s.two_way_share = static_cast<double>(s.two_way_edges) / static_cast<double>(s.edge_count);
    s.self_share = static_cast<double>(s.self_loops) / static_cast<double>(s.edge_count);
  }
  return s;
}

}  // namespace btv
