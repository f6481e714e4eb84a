#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "btv/bowtie.hpp"
#include "btv/graph.hpp"
#include "btv/rng.hpp"

namespace btv {

struct SirParams {
  double beta = 0.5;     // per contact per step
  double gamma = 0.3;    // recovery per step
  bool forward = false;  // spread along stored edges instead of against them
  bool weighted = false; // contact probability min(1, beta * w / mean positive weight)

  /// DomainError unless 0 <= beta <= 1 and 0 < gamma <= 1.
  void validate() const;
};

/// Who an infectious node can reach in one step, and with which probability.
/// By default information created at w reaches every u with an edge u -> w.
class ContactNetwork {
 public:
  ContactNetwork(const DirectedGraph& g, const SirParams& params);

  std::size_t node_count() const noexcept { return offsets_.size() - 1; }
  std::span<const NodeIndex> contacts(NodeIndex w) const noexcept {
    return {targets_.data() + offsets_[w], targets_.data() + offsets_[w + 1]};
  }
  std::span<const double> probabilities(NodeIndex w) const noexcept {
    return {probability_.data() + offsets_[w], probability_.data() + offsets_[w + 1]};
  }
  double gamma() const noexcept { return gamma_; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeIndex> targets_;
  std::vector<double> probability_;
  double gamma_ = 1.0;
};

struct CascadeOutcome {
  NodeIndex seed = 0;
  std::vector<NodeIndex> impacted;  // recovered set, ascending
  double w_influence = 0.0;
  double a_influence = 0.0;
  std::size_t steps = 0;
};

/// Synchronous SIR from one infectious seed until no node is infectious. Each
/// step: every infectious node tries each susceptible contact once, then every
/// node that was infectious at the start of the step recovers with prob gamma.
/// Influences are left at 0; see influence_of.
CascadeOutcome simulate_cascade(const ContactNetwork& net, NodeIndex seed, Rng& rng);

/// (w, a): fans of impacted pages sharing the seed's polarity, and fans of
/// impacted neutral pages, at the graph's snapshot.
std::pair<double, double> influence_of(const CascadeOutcome& outcome, const DirectedGraph& g);

/// One cascade from `seed_page` with stream Rng(seed). Neutral seeds are a
/// PreconditionError, unknown ids a LookupError.
CascadeOutcome run_sir(const DirectedGraph& g, std::string_view seed_page, const SirParams& params, std::uint64_t seed);

enum class InfluenceKind { Within, Across };
std::string_view influence_kind_name(InfluenceKind k) noexcept;

struct PieceSample {
  std::size_t piece = 0;
  NodeIndex seed = 0;
  double w_influence = 0.0;
  double a_influence = 0.0;
};

struct ComponentInfluence {
  BowtieRole role = BowtieRole::Scc;
  std::size_t eligible_pages = 0;  // non-neutral pages of the component
  std::vector<PieceSample> samples;

  std::optional<double> median(InfluenceKind kind) const;
};

/// Components examined by the cascade experiments, in output order.
inline constexpr std::array<BowtieRole, 3> kCascadeRoles = {BowtieRole::Scc, BowtieRole::Out, BowtieRole::In};

/// `pieces` cascades per component in kCascadeRoles, seeds drawn uniformly
/// from the component's non-neutral pages. Piece k of role r uses stream
/// derive_seed(seed, {r, k}).
std::vector<ComponentInfluence> component_influence_experiment(const DirectedGraph& g,
                                                               const BowtieDecomposition& roles,
                                                               std::size_t pieces, const SirParams& params,
                                                               std::uint64_t seed);

/// piece_id,component,seed_id,w_influence,a_influence
std::string influence_samples_csv(const DirectedGraph& g, std::span<const ComponentInfluence> experiments);

/// P(seed = i) proportional to x on comp_x pages, y on comp_y pages and 1
/// elsewhere; 0 on neutral pages. Aligned with node indices.
std::vector<double> initialiser_distribution(const DirectedGraph& g, const BowtieDecomposition& roles,
                                             BowtieRole comp_x, BowtieRole comp_y, double x, double y);

enum class PageFilter { All, Expanding, NonExpanding };
std::string_view page_filter_name(PageFilter f) noexcept;
PageFilter parse_page_filter(std::string_view name);

/// Pearson correlation; nullopt for fewer than 3 points or zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

inline const std::vector<double> kDefaultMultipliers = {0.1, 0.5, 1.0, 2.0, 10.0};

struct SweepConfig {
  BowtieRole comp_x = BowtieRole::Scc;
  BowtieRole comp_y = BowtieRole::Out;
  std::vector<double> multipliers = kDefaultMultipliers;
  std::size_t pieces = 3000;
  InfluenceKind kind = InfluenceKind::Within;
  PageFilter filter = PageFilter::Expanding;
  SirParams params;
  std::uint64_t seed = 0;
};

struct SweepResult {
  SweepConfig config;
  std::size_t page_count = 0;                       // pages passing the filter
  std::vector<std::vector<std::optional<double>>> cc;  // cc[ix][iy]

  std::vector<std::pair<std::size_t, std::size_t>> undefined_cells() const;
};

/// Correlation heatmap between page influence and fan_delta over the non-neutral
/// pages selected by the filter. Piece k of cell (ix, iy) uses stream
/// derive_seed(seed, {ix, iy, k}).
SweepResult sweep_heatmap(const DirectedGraph& g, const BowtieDecomposition& roles,
                          const std::map<std::string, std::int64_t>& fan_delta, const SweepConfig& config);

nlohmann::json sweep_json(const SweepResult& result);

namespace reference {
std::vector<ComponentInfluence> component_influence_experiment(const DirectedGraph& g,
                                                               const BowtieDecomposition& roles,
                                                               std::size_t pieces, const SirParams& params,
                                                               std::uint64_t seed);
SweepResult sweep_heatmap(const DirectedGraph& g, const BowtieDecomposition& roles,
                          const std::map<std::string, std::int64_t>& fan_delta, const SweepConfig& config);
}  // namespace reference

}  // namespace btv
