#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "btv/community.hpp"
#include "btv/error.hpp"
#include "btv/rng.hpp"

namespace btv {

namespace {

inline double plogp(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

constexpr double kMinImprovement = 1e-10;
constexpr std::size_t kMaxPasses = 200;
constexpr std::size_t kMaxRefinements = 50;

using Module = std::uint32_t;
using Link = std::pair<std::uint32_t, double>;

/// One aggregation level of the flow network. Self-links are dropped since
/// they never leave a module.
struct FlowNetwork {
  std::vector<double> flow;         // visit rate
  std::vector<double> tele;         // visit rate * teleport probability
  std::vector<std::size_t> members;  // original nodes represented
  std::vector<std::vector<Link>> out;
  std::vector<std::vector<Link>> in;
  std::size_t total_nodes = 0;
  double node_entropy = 0.0;  // sum plogp over original visit rates

  std::size_t size() const { return flow.size(); }
};

FlowNetwork base_network(const DirectedGraph& g, const FlowDistribution& flow) {
  const std::size_t n = g.node_count();
  if (flow.visit.size() != n) throw ValidationError("flow distribution does not match the graph");
  FlowNetwork net;
  net.flow = flow.visit;
  net.tele.resize(n);
  net.members.assign(n, 1);
  net.out.resize(n);
  net.in.resize(n);
  net.total_nodes = n;
  for (NodeIndex u = 0; u < n; ++u) {
    net.node_entropy += plogp(flow.visit[u]);
    double total = 0.0;
    for (const auto& e : g.out_edges(u)) {
      if (e.weight > 0.0) total += e.weight;
    }
    if (total <= 0.0) {
      net.tele[u] = flow.visit[u];
      continue;
    }
    net.tele[u] = flow.visit[u] * (1.0 - flow.damping);
    for (const auto& e : g.out_edges(u)) {
      if (e.weight <= 0.0 || e.dst == u) continue;
      const double f = flow.visit[u] * flow.damping * e.weight / total;
      net.out[u].emplace_back(e.dst, f);
      net.in[e.dst].emplace_back(u, f);
    }
  }
  return net;
}

double exit_flow(double tele, std::size_t members, double link_exit, std::size_t total) {
  const double outside = static_cast<double>(total - members) / static_cast<double>(total);
  return tele * outside + link_exit;
}

double codelength_of(const FlowNetwork& net, std::span<const Module> module) {
  const Module k = module.empty() ? 0 : *std::max_element(module.begin(), module.end()) + 1;
  std::vector<double> p(k, 0.0), t(k, 0.0), l(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t u = 0; u < net.size(); ++u) {
    p[module[u]] += net.flow[u];
    t[module[u]] += net.tele[u];
    count[module[u]] += net.members[u];
    for (const auto& [v, f] : net.out[u]) {
      if (module[v] != module[u]) l[module[u]] += f;
    }
  }
  double sum_q = 0.0, sum_plogp_q = 0.0, sum_plogp_qp = 0.0;
  for (Module m = 0; m < k; ++m) {
    if (count[m] == 0) continue;
    const double q = exit_flow(t[m], count[m], l[m], net.total_nodes);
    sum_q += q;
    sum_plogp_q += plogp(q);
    sum_plogp_qp += plogp(q + p[m]);
  }
  return plogp(sum_q) - 2.0 * sum_plogp_q - net.node_entropy + sum_plogp_qp;
}

/// Greedy local moving of the nodes of one level between modules.
class LocalMover {
 public:
  LocalMover(const FlowNetwork& net, std::vector<Module> module) : net_(net), module_(std::move(module)) {
    const std::size_t n = net.size();
    p_.assign(n, 0.0);
    t_.assign(n, 0.0);
    l_.assign(n, 0.0);
    count_.assign(n, 0);
    for (std::size_t u = 0; u < n; ++u) {
      const Module m = module_[u];
      p_[m] += net.flow[u];
      t_[m] += net.tele[u];
      count_[m] += net.members[u];
      for (const auto& [v, f] : net.out[u]) {
        if (module_[v] != m) l_[m] += f;
      }
    }
    recompute_sums();
    out_to_.assign(n, 0.0);
    in_from_.assign(n, 0.0);
    touched_flag_.assign(n, 0);
  }

  const std::vector<Module>& modules() const { return module_; }

  /// Passes over all nodes in random order until a pass moves nothing.
  bool run(Rng& rng) {
    std::vector<std::uint32_t> order(net_.size());
    std::iota(order.begin(), order.end(), 0u);
    bool moved_any = false;
    for (std::size_t pass = 0; pass < kMaxPasses; ++pass) {
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
      std::size_t moves = 0;
      for (const auto u : order) moves += try_move(u) ? 1 : 0;
      recompute_sums();
      if (moves == 0) break;
      moved_any = true;
    }
    return moved_any;
  }

 private:
  double exit_of(Module m) const { return exit_flow(t_[m], count_[m], l_[m], net_.total_nodes); }

  void recompute_sums() {
    sum_q_ = sum_plogp_q_ = sum_plogp_qp_ = 0.0;
    for (Module m = 0; m < count_.size(); ++m) {
      if (count_[m] == 0) continue;
      const double q = exit_of(m);
      sum_q_ += q;
      sum_plogp_q_ += plogp(q);
      sum_plogp_qp_ += plogp(q + p_[m]);
    }
  }

  bool try_move(std::uint32_t u) {
    const Module from = module_[u];
    double out_total = 0.0;
    double in_total = 0.0;
    touched_.clear();
    auto touch = [&](Module m) {
      if (!touched_flag_[m]) {
        touched_flag_[m] = 1;
        touched_.push_back(m);
      }
    };
    for (const auto& [v, f] : net_.out[u]) {
      out_to_[module_[v]] += f;
      out_total += f;
      touch(module_[v]);
    }
    for (const auto& [v, f] : net_.in[u]) {
      in_from_[module_[v]] += f;
      in_total += f;
      touch(module_[v]);
    }

    const double pu = net_.flow[u];
    const double tu = net_.tele[u];
    const std::size_t nu = net_.members[u];

    // Module `from` without u.
    const std::size_t from_count = count_[from] - nu;
    const double from_p = from_count ? p_[from] - pu : 0.0;
    const double from_t = from_count ? t_[from] - tu : 0.0;
    const double from_l = from_count ? std::max(0.0, l_[from] - (out_total - out_to_[from]) + in_from_[from]) : 0.0;
    const double q_from_old = exit_of(from);
    const double q_from_new = from_count ? exit_flow(from_t, from_count, from_l, net_.total_nodes) : 0.0;

    double best_delta = 0.0;
    Module best = from;
    double best_l = 0.0;
    for (const Module to : touched_) {
      if (to == from) continue;
      const double to_l = std::max(0.0, l_[to] - in_from_[to] + (out_total - out_to_[to]));
      const double q_to_old = exit_of(to);
      const double q_to_new = exit_flow(t_[to] + tu, count_[to] + nu, to_l, net_.total_nodes);
      const double sum_q_new = sum_q_ - q_from_old - q_to_old + q_from_new + q_to_new;
      const double delta = plogp(sum_q_new) - plogp(sum_q_) -
                           2.0 * (plogp(q_from_new) + plogp(q_to_new) - plogp(q_from_old) - plogp(q_to_old)) +
                           (plogp(q_from_new + from_p) + plogp(q_to_new + p_[to] + pu) -
                            plogp(q_from_old + p_[from]) - plogp(q_to_old + p_[to]));
      if (delta < best_delta - kMinImprovement || (best != from && delta < best_delta + kMinImprovement && to < best && delta < -kMinImprovement)) {
        best_delta = delta;
        best = to;
        best_l = to_l;
      }
    }

    const bool moved = best != from;
    if (moved) {
      const double q_to_old = exit_of(best);
      sum_q_ -= q_from_old + q_to_old;
      sum_plogp_q_ -= plogp(q_from_old) + plogp(q_to_old);
      sum_plogp_qp_ -= plogp(q_from_old + p_[from]) + plogp(q_to_old + p_[best]);

      count_[from] = from_count;
      p_[from] = from_p;
      t_[from] = from_t;
      l_[from] = from_l;
      count_[best] += nu;
      p_[best] += pu;
      t_[best] += tu;
      l_[best] = best_l;
      module_[u] = best;

      const double q_from = from_count ? exit_of(from) : 0.0;
      const double q_to = exit_of(best);
      sum_q_ += q_from + q_to;
      sum_plogp_q_ += plogp(q_from) + plogp(q_to);
      sum_plogp_qp_ += (from_count ? plogp(q_from + p_[from]) : 0.0) + plogp(q_to + p_[best]);
    }

    for (const Module m : touched_) {
      out_to_[m] = 0.0;
      in_from_[m] = 0.0;
      touched_flag_[m] = 0;
    }
    // `from` may hold residue when u had no links into its own module.
    out_to_[from] = 0.0;
    in_from_[from] = 0.0;
    return moved;
  }

  const FlowNetwork& net_;
  std::vector<Module> module_;
  std::vector<double> p_, t_, l_;
  std::vector<std::size_t> count_;
  double sum_q_ = 0.0, sum_plogp_q_ = 0.0, sum_plogp_qp_ = 0.0;
  std::vector<double> out_to_, in_from_;
  std::vector<char> touched_flag_;
  std::vector<Module> touched_;
};

/// Renumbers modules densely in order of their smallest member.
std::size_t compact(std::vector<Module>& module) {
  constexpr Module kNone = static_cast<Module>(-1);
  std::vector<Module> remap(module.size(), kNone);
  Module next = 0;
  for (auto& m : module) {
    if (remap[m] == kNone) remap[m] = next++;
    m = remap[m];
  }
  return next;
}

FlowNetwork aggregate(const FlowNetwork& net, std::span<const Module> module, std::size_t k) {
  FlowNetwork next;
  next.flow.assign(k, 0.0);
  next.tele.assign(k, 0.0);
  next.members.assign(k, 0);
  next.out.resize(k);
  next.in.resize(k);
  next.total_nodes = net.total_nodes;
  next.node_entropy = net.node_entropy;
  std::vector<std::map<std::uint32_t, double>> links(k);
  for (std::size_t u = 0; u < net.size(); ++u) {
    const Module m = module[u];
    next.flow[m] += net.flow[u];
    next.tele[m] += net.tele[u];
    next.members[m] += net.members[u];
    for (const auto& [v, f] : net.out[u]) {
      if (module[v] != m) links[m][module[v]] += f;
    }
  }
  for (Module m = 0; m < k; ++m) {
    for (const auto& [w, f] : links[m]) {
      next.out[m].emplace_back(w, f);
      next.in[w].emplace_back(m, f);
    }
  }
  return next;
}

/// Local moving from `initial`, then repeated aggregation until a level
/// merges nothing. Returns a dense module per original node.
std::vector<Module> multilevel_search(const FlowNetwork& base, std::vector<Module> initial, Rng& rng) {
  std::vector<Module> assignment(base.size());
  std::iota(assignment.begin(), assignment.end(), 0u);
  FlowNetwork level = base;
  std::vector<Module> modules = std::move(initial);
  while (true) {
    LocalMover mover(level, std::move(modules));
    mover.run(rng);
    std::vector<Module> top = mover.modules();
    const std::size_t k = compact(top);
    for (auto& a : assignment) a = top[a];
    if (k == level.size()) break;
    level = aggregate(level, top, k);
    modules.resize(k);
    std::iota(modules.begin(), modules.end(), 0u);
  }
  compact(assignment);
  return assignment;
}

struct TrialResult {
  std::vector<Module> modules;
  double codelength = 0.0;
};

TrialResult run_trial(const FlowNetwork& base, std::uint64_t stream_seed) {
  Rng rng(stream_seed);
  TrialResult best;
  best.modules.resize(base.size());
  std::iota(best.modules.begin(), best.modules.end(), 0u);
  best.codelength = codelength_of(base, best.modules);
  for (std::size_t round = 0; round < kMaxRefinements; ++round) {
    auto candidate = multilevel_search(base, best.modules, rng);
    const double length = codelength_of(base, candidate);
    if (!(length < best.codelength - kMinImprovement)) break;
    best.modules = std::move(candidate);
    best.codelength = length;
  }
  std::vector<Module> single(base.size(), 0);
  const double one_module = codelength_of(base, single);
  if (one_module < best.codelength) {
    best.modules = std::move(single);
    best.codelength = one_module;
  }
  return best;
}

Partition label_modules(const DirectedGraph& g, std::span<const Module> modules) {
  const Module k = modules.empty() ? 0 : *std::max_element(modules.begin(), modules.end()) + 1;
  std::vector<std::size_t> size(k, 0);
  std::vector<std::size_t> first(k, static_cast<std::size_t>(-1));
  for (std::size_t u = 0; u < modules.size(); ++u) {
    ++size[modules[u]];
    first[modules[u]] = std::min(first[modules[u]], u);
  }
  std::vector<Module> order(k);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](Module a, Module b) {
    return size[a] != size[b] ? size[a] > size[b] : first[a] < first[b];
  });
  std::vector<std::string> label(k);
  for (std::size_t rank = 0; rank < k; ++rank) label[order[rank]] = std::to_string(rank + 1);
  std::map<std::string, std::string> assignment;
  for (std::size_t u = 0; u < modules.size(); ++u) assignment.emplace(g.id(static_cast<NodeIndex>(u)), label[modules[u]]);
  return Partition(std::move(assignment), PartitionSource::Detected);
}

template <bool Parallel>
CommunityResult detect(const DirectedGraph& g, std::size_t trials, std::uint64_t seed, double damping) {
  if (trials < 1) throw DomainError("trials must be >= 1");
  const auto flow = Parallel ? stationary_flow(g, damping) : reference::stationary_flow(g, damping);
  const auto base = base_network(g, flow);
  std::vector<TrialResult> results(trials);
  const auto count = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic, 1) if (Parallel)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    results[static_cast<std::size_t>(t)] = run_trial(base, derive_seed(seed, {static_cast<std::uint64_t>(t)}));
  }
  std::size_t best = 0;
  for (std::size_t t = 1; t < trials; ++t) {
    if (results[t].codelength < results[best].codelength) best = t;
  }
  CommunityResult out;
  out.partition = label_modules(g, results[best].modules);
  out.codelength = results[best].codelength;
  out.best_trial = best;
  for (const auto& r : results) out.trial_codelengths.push_back(r.codelength);
  out.module_count = results[best].modules.empty()
                         ? 0
                         : *std::max_element(results[best].modules.begin(), results[best].modules.end()) + 1;
  return out;
}

}  // namespace

double map_equation_codelength(const DirectedGraph& g, const Partition& partition, const FlowDistribution& flow) {
  const auto labels = partition.labels_for(g);
  const auto net = base_network(g, flow);
  std::map<std::string, Module> ids;
  std::vector<Module> module(labels.size());
  for (std::size_t u = 0; u < labels.size(); ++u) {
    module[u] = ids.emplace(labels[u], static_cast<Module>(ids.size())).first->second;
  }
  return codelength_of(net, module);
}

CommunityResult detect_communities(const DirectedGraph& g, std::size_t trials, std::uint64_t seed, double damping) {
  return detect<true>(g, trials, seed, damping);
}

namespace reference {
CommunityResult detect_communities(const DirectedGraph& g, std::size_t trials, std::uint64_t seed, double damping) {
  return detect<false>(g, trials, seed, damping);
}
}  // namespace reference

std::vector<std::string> AgreementMatrix::unstable_nodes() const {
  std::vector<std::string> out;
  const std::size_t n = ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = at(i, j);
      if (v > 0.0 && v < 1.0) {
        out.push_back(ids[i]);
        break;
      }
    }
  }
  return out;
}

AgreementMatrix partition_agreement(std::span<const Partition> runs) {
  AgreementMatrix m;
  if (runs.empty()) return m;
  for (const auto& [id, label] : runs.front().assignment()) m.ids.push_back(id);
  const std::size_t n = m.ids.size();
  m.values.assign(n * n, 0.0);
  std::vector<std::string> labels(n);
  for (const auto& run : runs) {
    if (run.size() != n) throw ValidationError("agreement runs cover different node sets");
    std::size_t i = 0;
    for (const auto& [id, label] : run.assignment()) {
      if (id != m.ids[i]) throw ValidationError("agreement runs cover different node sets");
      labels[i++] = label;
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (labels[a] == labels[b]) m.values[a * n + b] += 1.0;
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(runs.size());
  for (auto& v : m.values) v *= scale;
  return m;
}

}  // namespace btv
