#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "btv/bowtie.hpp"

namespace btv {

struct RoleFlow {
  std::string slice = "all";  // "all" or a polarity code
  std::array<std::array<std::size_t, kRoleCount>, kRoleCount> counts{};  // [earlier][later]
  std::size_t total = 0;
  std::size_t excluded = 0;  // pages present in only one decomposition
  double stability = 0.0;    // trace / total, 0 when total is 0

  std::size_t at(BowtieRole from, BowtieRole to) const {
    return counts[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
  }
};

/// Contingency table of roles between two decompositions, optionally
/// restricted to pages of one polarity (taken from `earlier`). With
/// allow_partial unset, differing node sets are a ValidationError; otherwise
/// unmatched pages are counted in `excluded`.
RoleFlow role_flows(const BowtieDecomposition& earlier, const BowtieDecomposition& later,
                    std::optional<Polarity> polarity = std::nullopt, bool allow_partial = false);

/// Slices "all", "r", "b", "g".
std::vector<RoleFlow> role_flow_slices(const BowtieDecomposition& earlier, const BowtieDecomposition& later,
                                       bool allow_partial = false);

/// {slices:[{polarity, flows:[{from,to,count}], stability, total, excluded}]}
nlohmann::json sankey_json(const std::vector<RoleFlow>& slices);

}  // namespace btv
