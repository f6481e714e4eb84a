#include "btv/stability.hpp"

#include "btv/error.hpp"

namespace btv {

RoleFlow role_flows(const BowtieDecomposition& earlier, const BowtieDecomposition& later,
                    std::optional<Polarity> polarity, bool allow_partial) {
  RoleFlow flow;
  if (polarity) flow.slice = std::string(1, polarity_code(*polarity));
  // Both id lists are sorted, so a merge walk pairs the pages.
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < earlier.ids.size() || j < later.ids.size()) {
    const bool take_i = j == later.ids.size() || (i < earlier.ids.size() && earlier.ids[i] < later.ids[j]);
    const bool take_j = i == earlier.ids.size() || (j < later.ids.size() && later.ids[j] < earlier.ids[i]);
    if (take_i || take_j) {
      if (!allow_partial) {
        const auto& id = take_i ? earlier.ids[i] : later.ids[j];
        throw ValidationError("page '" + id + "' is missing from one of the decompositions");
      }
      const auto p = take_i ? earlier.polarities[i] : later.polarities[j];
      if (!polarity || *polarity == p) ++flow.excluded;
      take_i ? ++i : ++j;
      continue;
    }
    if (!polarity || earlier.polarities[i] == *polarity) {
      ++flow.counts[static_cast<std::size_t>(earlier.roles[i])][static_cast<std::size_t>(later.roles[j])];
      ++flow.total;
    }
    ++i;
    ++j;
  }
  std::size_t trace = 0;
  for (std::size_t r = 0; r < kRoleCount; ++r) trace += flow.counts[r][r];
  flow.stability = flow.total ? static_cast<double>(trace) / static_cast<double>(flow.total) : 0.0;
  return flow;
}

std::vector<RoleFlow> role_flow_slices(const BowtieDecomposition& earlier, const BowtieDecomposition& later,
                                       bool allow_partial) {
  std::vector<RoleFlow> slices;
  slices.push_back(role_flows(earlier, later, std::nullopt, allow_partial));
  for (const auto p : {Polarity::Anti, Polarity::Pro, Polarity::Neutral}) {
    slices.push_back(role_flows(earlier, later, p, allow_partial));
  }
  return slices;
}

nlohmann::json sankey_json(const std::vector<RoleFlow>& slices) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : slices) {
    nlohmann::json flows = nlohmann::json::array();
    for (const auto from : kAllRoles) {
      for (const auto to : kAllRoles) {
        if (const auto c = s.at(from, to)) flows.push_back({{"from", role_name(from)}, {"to", role_name(to)}, {"count", c}});
      }
    }
    out.push_back({{"polarity", s.slice},
                   {"flows", flows},
                   {"stability", s.stability},
                   {"total", s.total},
                   {"excluded", s.excluded}});
  }
  return {{"slices", out}};
}

}  // namespace btv
