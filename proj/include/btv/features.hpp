#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "btv/bowtie.hpp"
#include "btv/graph.hpp"

namespace btv {

class Partition;

inline constexpr std::string_view kFeatureSchema = "btv-features/1";

/// SCC, IN or OUT; every other role (UNASSIGNED included) reads "NA".
std::string_view feature_role(BowtieRole role) noexcept;

struct FeatureRecord {
  std::string id;
  Polarity polarity = Polarity::Anti;
  std::string community;
  std::string wbt;
  std::string abt;
  std::int64_t fans = 0;
  double log_fans = 0.0;
  double k_in = 0.0;
  double k_out = 0.0;
  std::optional<double> kps_in;
  std::optional<double> kps_out;
  std::optional<double> kcs_in;
  std::optional<double> kcs_out;
  double pagerank = 0.0;
  double betweenness = 0.0;
  std::int64_t fan_delta = 0;
};

/// log10(1 + f). Negative counts are a ValidationError.
double log_fan(std::int64_t fans);

/// Directed shortest-path betweenness normalised by (n-1)(n-2). Unweighted by
/// default; the weighted variant uses 1/w as edge length and skips zero-weight
/// edges. Graphs with fewer than 3 nodes give all zeros.
std::vector<double> betweenness(const DirectedGraph& g, bool weighted = false);

/// Shares of weighted in-degree from anti, pro and neutral sources, and of
/// weighted out-degree towards them. nullopt where the degree is 0.
struct DegreeComposition {
  std::optional<std::array<double, kPolarityCount>> in;
  std::optional<std::array<double, kPolarityCount>> out;
};
std::vector<DegreeComposition> degree_composition(const DirectedGraph& g);

/// One record per anti or pro page in canonical order. Neutral pages still
/// contribute to degrees and shares. `next_fans` must hold every emitted page.
std::vector<FeatureRecord> extract_features(const DirectedGraph& g, const Partition& communities,
                                            const BowtieDecomposition& wbt, const BowtieDecomposition& abt,
                                            const std::map<std::string, std::int64_t>& next_fans,
                                            bool weighted_betweenness = false);

/// Leading "# schema=..." comment, then
/// id,p,c,wbt,abt,f,log_f,k_in,k_out,kps_in,kps_out,kcs_in,kcs_out,pagerank,betweenness,fan_delta
std::string features_csv(std::span<const FeatureRecord> records);

/// id,polarity,in_anti,in_pro,in_neutral,out_anti,out_pro,out_neutral
std::string composition_csv(const DirectedGraph& g, std::span<const DegreeComposition> rows);

namespace reference {
std::vector<double> betweenness(const DirectedGraph& g, bool weighted = false);
}

}  // namespace btv
