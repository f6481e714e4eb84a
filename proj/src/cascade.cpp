#include "btv/cascade.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <tuple>

#include "btv/error.hpp"
#include "btv/text.hpp"

namespace btv {

void SirParams::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");
}

ContactNetwork::ContactNetwork(const DirectedGraph& g, const SirParams& params) : gamma_(params.gamma) {
  params.validate();
  const std::size_t n = g.node_count();
  double mean_weight = 0.0;
  if (params.weighted) {
    std::size_t positive = 0;
    for (const auto& e : g.edges()) {
      if (e.weight > 0.0) {
        mean_weight += e.weight;
        ++positive;
      }
    }
    if (positive) mean_weight /= static_cast<double>(positive);
  }
  auto probability = [&](double weight) {
    if (!params.weighted) return params.beta;
    if (!(weight > 0.0)) return 0.0;
    return std::min(1.0, params.beta * weight / mean_weight);
  };

  offsets_.assign(n + 1, 0);
  const auto edges = g.edges();
  for (NodeIndex w = 0; w < n; ++w) {
    offsets_[w + 1] = offsets_[w] + (params.forward ? g.out_edges(w).size() : g.in_edge_ids(w).size());
  }
  targets_.reserve(offsets_[n]);
  probability_.reserve(offsets_[n]);
  for (NodeIndex w = 0; w < n; ++w) {
    if (params.forward) {
      for (const auto& e : g.out_edges(w)) {
        targets_.push_back(e.dst);
        probability_.push_back(probability(e.weight));
      }
    } else {
      for (const auto k : g.in_edge_ids(w)) {
        targets_.push_back(edges[k].src);
        probability_.push_back(probability(edges[k].weight));
      }
    }
  }
}

CascadeOutcome simulate_cascade(const ContactNetwork& net, NodeIndex seed, Rng& rng) {
  enum : char { kSusceptible, kInfectious, kPending, kRecovered };
  std::vector<char> state(net.node_count(), kSusceptible);
  std::vector<NodeIndex> infectious{seed};
  std::vector<NodeIndex> next;
  std::vector<NodeIndex> newly;
  CascadeOutcome outcome;
  outcome.seed = seed;
  state[seed] = kInfectious;
  while (!infectious.empty()) {
    ++outcome.steps;
    newly.clear();
    for (const NodeIndex w : infectious) {
      const auto contacts = net.contacts(w);
      const auto probabilities = net.probabilities(w);
      for (std::size_t k = 0; k < contacts.size(); ++k) {
        const NodeIndex u = contacts[k];
        if (state[u] == kSusceptible && rng.bernoulli(probabilities[k])) {
          state[u] = kPending;
          newly.push_back(u);
        }
      }
    }
    next.clear();
    for (const NodeIndex w : infectious) {
      if (rng.bernoulli(net.gamma())) {
        state[w] = kRecovered;
        outcome.impacted.push_back(w);
      } else {
        next.push_back(w);
      }
    }
    for (const NodeIndex u : newly) {
      state[u] = kInfectious;
      next.push_back(u);
    }
    std::sort(next.begin(), next.end());
    infectious.swap(next);
  }
  std::sort(outcome.impacted.begin(), outcome.impacted.end());
  return outcome;
}

namespace {

std::vector<double> fans_of(const DirectedGraph& g) {
  std::vector<double> fans;
  fans.reserve(g.node_count());
  for (const auto& node : g.nodes()) fans.push_back(static_cast<double>(node.fans_at(g.snapshot().name)));
  return fans;
}

std::pair<double, double> influence(const DirectedGraph& g, std::span<const double> fans,
                                    const CascadeOutcome& outcome) {
  const Polarity own = g.polarity(outcome.seed);
  double w = 0.0;
  double a = 0.0;
  for (const NodeIndex j : outcome.impacted) {
    if (g.polarity(j) == own) {
      w += fans[j];
    } else if (g.polarity(j) == Polarity::Neutral) {
      a += fans[j];
    }
  }
  return {w, a};
}

void check_aligned(const DirectedGraph& g, const BowtieDecomposition& roles) {
  bool ok = roles.ids.size() == g.node_count();
  for (NodeIndex i = 0; ok && i < g.node_count(); ++i) ok = roles.ids[i] == g.id(i);
  if (!ok) throw ValidationError("bow-tie decomposition does not cover the cascade graph");
}

}  // namespace

std::pair<double, double> influence_of(const CascadeOutcome& outcome, const DirectedGraph& g) {
  const auto fans = fans_of(g);
  return influence(g, fans, outcome);
}

CascadeOutcome run_sir(const DirectedGraph& g, std::string_view seed_page, const SirParams& params,
                       std::uint64_t seed) {
  const NodeIndex start = g.index_of(seed_page);
  if (g.polarity(start) == Polarity::Neutral) {
    throw PreconditionError("cascade seed '" + std::string(seed_page) + "' is a neutral page");
  }
  const ContactNetwork net(g, params);
  Rng rng(seed);
  auto outcome = simulate_cascade(net, start, rng);
  std::tie(outcome.w_influence, outcome.a_influence) = influence_of(outcome, g);
  return outcome;
}

std::string_view influence_kind_name(InfluenceKind k) noexcept {
  return k == InfluenceKind::Within ? "within" : "across";
}

std::optional<double> ComponentInfluence::median(InfluenceKind kind) const {
  if (samples.empty()) return std::nullopt;
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples) values.push_back(kind == InfluenceKind::Within ? s.w_influence : s.a_influence);
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

template <bool Parallel>
std::vector<ComponentInfluence> influence_experiment(const DirectedGraph& g, const BowtieDecomposition& roles,
                                                     std::size_t pieces, const SirParams& params,
                                                     std::uint64_t seed) {
  check_aligned(g, roles);
  const ContactNetwork net(g, params);
  const auto fans = fans_of(g);
  std::vector<ComponentInfluence> out;
  for (const auto role : kCascadeRoles) {
    std::vector<NodeIndex> pool;
    for (NodeIndex i = 0; i < g.node_count(); ++i) {
      if (roles.roles[i] == role && g.polarity(i) != Polarity::Neutral) pool.push_back(i);
    }
    ComponentInfluence ci;
    ci.role = role;
    ci.eligible_pages = pool.size();
    if (!pool.empty()) {
      ci.samples.resize(pieces);
      const auto count = static_cast<std::ptrdiff_t>(pieces);
#pragma omp parallel for schedule(dynamic, 16) if (Parallel)
      for (std::ptrdiff_t k = 0; k < count; ++k) {
        const auto piece = static_cast<std::uint64_t>(k);
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(role), piece}));
        const NodeIndex start = pool[rng.below(pool.size())];
        const auto outcome = simulate_cascade(net, start, rng);
        const auto [w, a] = influence(g, fans, outcome);
        ci.samples[static_cast<std::size_t>(k)] = {static_cast<std::size_t>(k), start, w, a};
      }
    }
    out.push_back(std::move(ci));
  }
  return out;
}

}  // namespace

std::vector<ComponentInfluence> component_influence_experiment(const DirectedGraph& g,
                                                               const BowtieDecomposition& roles,
                                                               std::size_t pieces, const SirParams& params,
                                                               std::uint64_t seed) {
  return influence_experiment<true>(g, roles, pieces, params, seed);
}

std::string influence_samples_csv(const DirectedGraph& g, std::span<const ComponentInfluence> experiments) {
  std::string out = "piece_id,component,seed_id,w_influence,a_influence\n";
  for (const auto& ci : experiments) {
    for (const auto& s : ci.samples) {
      out += std::to_string(s.piece) + ',' + std::string(role_name(ci.role)) + ',' + g.id(s.seed) + ',' +
             format_number(s.w_influence) + ',' + format_number(s.a_influence) + '\n';
    }
  }
  return out;
}

std::vector<double> initialiser_distribution(const DirectedGraph& g, const BowtieDecomposition& roles,
                                             BowtieRole comp_x, BowtieRole comp_y, double x, double y) {
  check_aligned(g, roles);
  if (comp_x == comp_y) throw DomainError("heatmap components must differ");
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("multipliers must be positive");
  std::vector<double> p(g.node_count(), 0.0);
  double total = 0.0;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (g.polarity(i) == Polarity::Neutral) continue;
    p[i] = roles.roles[i] == comp_x ? x : roles.roles[i] == comp_y ? y : 1.0;
    total += p[i];
  }
  if (total <= 0.0) throw DomainError("graph has no anti or pro page to seed from");
  for (auto& v : p) v /= total;
  return p;
}

std::string_view page_filter_name(PageFilter f) noexcept {
  switch (f) {
    case PageFilter::All: return "ALL";
    case PageFilter::Expanding: return "EXPANDING";
    case PageFilter::NonExpanding: return "NONEXPANDING";
  }
  return "ALL";
}

PageFilter parse_page_filter(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (const auto f : {PageFilter::All, PageFilter::Expanding, PageFilter::NonExpanding}) {
    if (page_filter_name(f) == upper) return f;
  }
  throw ValidationError("unknown page filter '" + std::string(name) + "'");
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson inputs differ in length");
  const std::size_t n = x.size();
  if (n < 3) return std::nullopt;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<std::pair<std::size_t, std::size_t>> SweepResult::undefined_cells() const {
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < cc.size(); ++i) {
    for (std::size_t j = 0; j < cc[i].size(); ++j) {
      if (!cc[i][j]) cells.emplace_back(i, j);
    }
  }
  return cells;
}

namespace {

struct PieceResult {
  NodeIndex seed = 0;
  double influence = 0.0;
};

template <bool Parallel>
SweepResult sweep(const DirectedGraph& g, const BowtieDecomposition& roles,
                  const std::map<std::string, std::int64_t>& fan_delta, const SweepConfig& config) {
  check_aligned(g, roles);
  if (config.comp_x == config.comp_y) throw DomainError("heatmap components must differ");
  if (config.multipliers.empty()) throw DomainError("multiplier grid is empty");
  if (config.pieces < 1) throw DomainError("pieces must be >= 1");
  for (const double m : config.multipliers) {
    if (!(m > 0.0)) throw DomainError("multipliers must be positive");
  }

  std::vector<NodeIndex> pages;
  std::vector<double> delta;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (g.polarity(i) == Polarity::Neutral) continue;
    const auto it = fan_delta.find(g.id(i));
    if (it == fan_delta.end()) throw ValidationError("no fan change for page '" + g.id(i) + "'");
    const bool expanding = it->second > 0;
    if ((config.filter == PageFilter::Expanding && !expanding) ||
        (config.filter == PageFilter::NonExpanding && expanding)) {
      continue;
    }
    pages.push_back(i);
    delta.push_back(static_cast<double>(it->second));
  }

  const ContactNetwork net(g, config.params);
  const auto fans = fans_of(g);
  const std::size_t grid = config.multipliers.size();
  const std::size_t pieces = config.pieces;

  SweepResult result;
  result.config = config;
  result.page_count = pages.size();
  result.cc.assign(grid, std::vector<std::optional<double>>(grid));

  std::vector<PieceResult> slots(grid * grid * pieces);
  std::vector<std::vector<double>> cumulative(grid * grid);
  for (std::size_t ix = 0; ix < grid; ++ix) {
    for (std::size_t iy = 0; iy < grid; ++iy) {
      auto p = initialiser_distribution(g, roles, config.comp_x, config.comp_y, config.multipliers[ix],
                                        config.multipliers[iy]);
      std::partial_sum(p.begin(), p.end(), p.begin());
      cumulative[ix * grid + iy] = std::move(p);
    }
  }

  const auto total = static_cast<std::ptrdiff_t>(slots.size());
#pragma omp parallel for schedule(dynamic, 32) if (Parallel)
  for (std::ptrdiff_t s = 0; s < total; ++s) {
    const auto slot = static_cast<std::size_t>(s);
    const std::size_t cell = slot / pieces;
    const std::size_t k = slot % pieces;
    const auto& cdf = cumulative[cell];
    Rng rng(derive_seed(config.seed, {cell / grid, cell % grid, k}));
    const double u = rng.uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const auto start = static_cast<NodeIndex>(it - cdf.begin());
    const auto outcome = simulate_cascade(net, start, rng);
    const auto [w, a] = influence(g, fans, outcome);
    slots[slot] = {start, config.kind == InfluenceKind::Within ? w : a};
  }

  std::vector<double> page_influence(g.node_count());
  std::vector<double> selected(pages.size());
  for (std::size_t cell = 0; cell < grid * grid; ++cell) {
    std::fill(page_influence.begin(), page_influence.end(), 0.0);
    for (std::size_t k = 0; k < pieces; ++k) {
      const auto& r = slots[cell * pieces + k];
      page_influence[r.seed] += r.influence;
    }
    for (std::size_t i = 0; i < pages.size(); ++i) selected[i] = page_influence[pages[i]];
    result.cc[cell / grid][cell % grid] = pearson(selected, delta);
  }
  return result;
}

}  // namespace

SweepResult sweep_heatmap(const DirectedGraph& g, const BowtieDecomposition& roles,
                          const std::map<std::string, std::int64_t>& fan_delta, const SweepConfig& config) {
  return sweep<true>(g, roles, fan_delta, config);
}

namespace reference {

std::vector<ComponentInfluence> component_influence_experiment(const DirectedGraph& g,
                                                               const BowtieDecomposition& roles,
                                                               std::size_t pieces, const SirParams& params,
                                                               std::uint64_t seed) {
  return influence_experiment<false>(g, roles, pieces, params, seed);
}

SweepResult sweep_heatmap(const DirectedGraph& g, const BowtieDecomposition& roles,
                          const std::map<std::string, std::int64_t>& fan_delta, const SweepConfig& config) {
  return sweep<false>(g, roles, fan_delta, config);
}

}  // namespace reference

nlohmann::json sweep_json(const SweepResult& result) {
  const auto& c = result.config;
  nlohmann::json matrix = nlohmann::json::array();
  for (const auto& row : result.cc) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(v ? nlohmann::json(*v) : nlohmann::json());
    matrix.push_back(std::move(r));
  }
  nlohmann::json undefined = nlohmann::json::array();
  for (const auto& [i, j] : result.undefined_cells()) undefined.push_back({i, j});
  return {{"comp_x", role_name(c.comp_x)},
          {"comp_y", role_name(c.comp_y)},
          {"kind", influence_kind_name(c.kind)},
          {"filter", page_filter_name(c.filter)},
          {"pieces", c.pieces},
          {"beta", c.params.beta},
          {"gamma", c.params.gamma},
          {"forward", c.params.forward},
          {"weighted", c.params.weighted},
          {"seed", c.seed},
          {"page_count", result.page_count},
          {"multipliers", c.multipliers},
          {"cc_matrix", matrix},
          {"undefined_cells", undefined}};
}

}  // namespace btv
