#include "btv/features.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "btv/community.hpp"
#include "btv/error.hpp"
#include "btv/parallel.hpp"
#include "btv/partition.hpp"
#include "btv/text.hpp"
#include "csv.hpp"

namespace btv {

std::string_view feature_role(BowtieRole role) noexcept {
  switch (role) {
    case BowtieRole::Scc:
    case BowtieRole::In:
    case BowtieRole::Out: return role_name(role);
    default: return "NA";
  }
}

double log_fan(std::int64_t fans) {
  if (fans < 0) throw ValidationError("fan count must be non-negative");
  return std::log10(1.0 + static_cast<double>(fans));
}

namespace {

/// Brandes dependency accumulation from one source into `score`.
class BrandesWorkspace {
 public:
  explicit BrandesWorkspace(std::size_t n) : sigma_(n), dist_(n), delta_(n), preds_(n) { order_.reserve(n); }

  void accumulate(const DirectedGraph& g, NodeIndex s, bool weighted, std::vector<double>& score) {
    std::fill(sigma_.begin(), sigma_.end(), 0.0);
    std::fill(dist_.begin(), dist_.end(), std::numeric_limits<double>::infinity());
    std::fill(delta_.begin(), delta_.end(), 0.0);
    for (auto& p : preds_) p.clear();
    order_.clear();
    sigma_[s] = 1.0;
    dist_[s] = 0.0;
    if (weighted) {
      dijkstra(g, s);
    } else {
      bfs(g, s);
    }
    for (std::size_t k = order_.size(); k-- > 0;) {
      const NodeIndex w = order_[k];
      for (const NodeIndex v : preds_[w]) delta_[v] += sigma_[v] / sigma_[w] * (1.0 + delta_[w]);
      if (w != s) score[w] += delta_[w];
    }
  }

 private:
  void bfs(const DirectedGraph& g, NodeIndex s) {
    order_.push_back(s);
    for (std::size_t head = 0; head < order_.size(); ++head) {
      const NodeIndex v = order_[head];
      for (const auto& e : g.out_edges(v)) {
        const NodeIndex w = e.dst;
        if (w == v) continue;
        if (std::isinf(dist_[w])) {
          dist_[w] = dist_[v] + 1.0;
          order_.push_back(w);
        }
        if (dist_[w] == dist_[v] + 1.0) {
          sigma_[w] += sigma_[v];
          preds_[w].push_back(v);
        }
      }
    }
  }

  void dijkstra(const DirectedGraph& g, NodeIndex s) {
    using Item = std::pair<double, NodeIndex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    std::vector<char> done(g.node_count(), 0);
    queue.emplace(0.0, s);
    while (!queue.empty()) {
      const auto [d, v] = queue.top();
      queue.pop();
      if (done[v]) continue;
      done[v] = 1;
      order_.push_back(v);
      for (const auto& e : g.out_edges(v)) {
        const NodeIndex w = e.dst;
        if (w == v || !(e.weight > 0.0)) continue;
        const double candidate = d + 1.0 / e.weight;
        if (candidate < dist_[w]) {
          dist_[w] = candidate;
          sigma_[w] = sigma_[v];
          preds_[w].assign(1, v);
          queue.emplace(candidate, w);
        } else if (candidate == dist_[w] && !done[w]) {
          sigma_[w] += sigma_[v];
          preds_[w].push_back(v);
        }
      }
    }
  }

  std::vector<double> sigma_;
  std::vector<double> dist_;
  std::vector<double> delta_;
  std::vector<std::vector<NodeIndex>> preds_;
  std::vector<NodeIndex> order_;
};

void normalise(std::vector<double>& score) {
  const double n = static_cast<double>(score.size());
  const double scale = score.size() < 3 ? 0.0 : 1.0 / ((n - 1.0) * (n - 2.0));
  for (auto& v : score) v *= scale;
}

}  // namespace

std::vector<double> betweenness(const DirectedGraph& g, bool weighted) {
  const std::size_t n = g.node_count();
  // Sources are split into fixed chunks; chunk sums are combined in order.
  std::vector<std::vector<double>> partial(kReductionChunks, std::vector<double>(n, 0.0));
  const auto chunks = static_cast<std::ptrdiff_t>(kReductionChunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    BrandesWorkspace ws(n);
    const std::size_t begin = n * static_cast<std::size_t>(c) / kReductionChunks;
    const std::size_t end = n * static_cast<std::size_t>(c + 1) / kReductionChunks;
    for (std::size_t s = begin; s < end; ++s) {
      ws.accumulate(g, static_cast<NodeIndex>(s), weighted, partial[static_cast<std::size_t>(c)]);
    }
  }
  std::vector<double> score(n, 0.0);
  for (const auto& part : partial) {
    for (std::size_t v = 0; v < n; ++v) score[v] += part[v];
  }
  normalise(score);
  return score;
}

namespace reference {
std::vector<double> betweenness(const DirectedGraph& g, bool weighted) {
  const std::size_t n = g.node_count();
  std::vector<double> score(n, 0.0);
  BrandesWorkspace ws(n);
  for (NodeIndex s = 0; s < n; ++s) ws.accumulate(g, s, weighted, score);
  normalise(score);
  return score;
}
}  // namespace reference

std::vector<DegreeComposition> degree_composition(const DirectedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::array<double, kPolarityCount>> in(n), out(n);
  std::vector<double> k_in(n, 0.0), k_out(n, 0.0);
  for (auto& a : in) a.fill(0.0);
  for (auto& a : out) a.fill(0.0);
  for (const auto& e : g.edges()) {
    in[e.dst][static_cast<std::size_t>(g.polarity(e.src))] += e.weight;
    out[e.src][static_cast<std::size_t>(g.polarity(e.dst))] += e.weight;
    k_in[e.dst] += e.weight;
    k_out[e.src] += e.weight;
  }
  std::vector<DegreeComposition> rows(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (k_in[v] > 0.0) {
      for (auto& x : in[v]) x /= k_in[v];
      rows[v].in = in[v];
    }
    if (k_out[v] > 0.0) {
      for (auto& x : out[v]) x /= k_out[v];
      rows[v].out = out[v];
    }
  }
  return rows;
}

namespace {

void check_cover(const DirectedGraph& g, const BowtieDecomposition& d, std::string_view what) {
  bool ok = d.ids.size() == g.node_count();
  for (NodeIndex i = 0; ok && i < g.node_count(); ++i) ok = d.ids[i] == g.id(i);
  if (!ok) throw ValidationError(std::string(what) + " decomposition does not cover the feature graph");
}

std::optional<double> share(double part, double total) {
  if (!(total > 0.0)) return std::nullopt;
  return part / total;
}

}  // namespace

std::vector<FeatureRecord> extract_features(const DirectedGraph& g, const Partition& communities,
                                            const BowtieDecomposition& wbt, const BowtieDecomposition& abt,
                                            const std::map<std::string, std::int64_t>& next_fans,
                                            bool weighted_betweenness) {
  check_cover(g, wbt, "within-group");
  check_cover(g, abt, "across-group");
  const auto labels = communities.labels_for(g);
  const std::size_t n = g.node_count();

  std::vector<double> k_in(n, 0.0), k_out(n, 0.0), ps_in(n, 0.0), ps_out(n, 0.0), cs_in(n, 0.0), cs_out(n, 0.0);
  for (const auto& e : g.edges()) {
    const bool same_polarity = g.polarity(e.src) == g.polarity(e.dst);
    const bool same_community = labels[e.src] == labels[e.dst];
    k_in[e.dst] += e.weight;
    k_out[e.src] += e.weight;
    if (same_polarity) {
      ps_in[e.dst] += e.weight;
      ps_out[e.src] += e.weight;
    }
    if (same_community) {
      cs_in[e.dst] += e.weight;
      cs_out[e.src] += e.weight;
    }
  }

  const auto pagerank = stationary_flow(g).visit;
  const auto between = betweenness(g, weighted_betweenness);
  const auto& snapshot = g.snapshot().name;

  std::vector<FeatureRecord> records;
  for (NodeIndex i = 0; i < n; ++i) {
    if (g.polarity(i) == Polarity::Neutral) continue;
    const auto next = next_fans.find(g.id(i));
    if (next == next_fans.end()) throw ValidationError("no next-snapshot fan count for page '" + g.id(i) + "'");
    FeatureRecord r;
    r.id = g.id(i);
    r.polarity = g.polarity(i);
    r.community = labels[i];
    r.wbt = feature_role(wbt.roles[i]);
    r.abt = feature_role(abt.roles[i]);
    r.fans = g.node(i).fans_at(snapshot);
    r.log_fans = log_fan(r.fans);
    r.k_in = k_in[i];
    r.k_out = k_out[i];
    r.kps_in = share(ps_in[i], k_in[i]);
    r.kps_out = share(ps_out[i], k_out[i]);
    r.kcs_in = share(cs_in[i], k_in[i]);
    r.kcs_out = share(cs_out[i], k_out[i]);
    r.pagerank = pagerank[i];
    r.betweenness = between[i];
    r.fan_delta = next->second - r.fans;
    records.push_back(std::move(r));
  }
  return records;
}

std::string features_csv(std::span<const FeatureRecord> records) {
  std::string out = "# schema=";
  out += kFeatureSchema;
  out += "\nid,p,c,wbt,abt,f,log_f,k_in,k_out,kps_in,kps_out,kcs_in,kcs_out,pagerank,betweenness,fan_delta\n";
  for (const auto& r : records) {
    out += detail::csv_escape(r.id) + ',' + polarity_code(r.polarity) + ',' + detail::csv_escape(r.community) + ',' +
           r.wbt + ',' + r.abt + ',' + std::to_string(r.fans) + ',' + format_number(r.log_fans) + ',' +
           format_number(r.k_in) + ',' + format_number(r.k_out) + ',' + format_optional(r.kps_in) + ',' +
           format_optional(r.kps_out) + ',' + format_optional(r.kcs_in) + ',' + format_optional(r.kcs_out) + ',' +
           format_number(r.pagerank) + ',' + format_number(r.betweenness) + ',' + std::to_string(r.fan_delta) + '\n';
  }
  return out;
}

std::string composition_csv(const DirectedGraph& g, std::span<const DegreeComposition> rows) {
  std::string out = "id,polarity,in_anti,in_pro,in_neutral,out_anti,out_pro,out_neutral\n";
  auto triple = [&](const std::optional<std::array<double, kPolarityCount>>& t) {
    std::string s;
    for (std::size_t k = 0; k < kPolarityCount; ++k) {
      s += ',';
      if (t) s += format_number((*t)[k]);
    }
    return s;
  };
  for (NodeIndex i = 0; i < rows.size(); ++i) {
    out += detail::csv_escape(g.id(i)) + ',' + polarity_code(g.polarity(i)) + triple(rows[i].in) + triple(rows[i].out) +
           '\n';
  }
  return out;
}

}  // namespace btv
