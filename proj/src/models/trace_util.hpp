#pragma once

#include "elect/models.hpp"

namespace elect::detail {

inline void reserve_trace(AgentTrace* trace, const ElectorateSpec& spec, bool communities) {
  if (!trace) return;
  *trace = AgentTrace{};
  const auto n = static_cast<std::size_t>(spec.num_electors);
  trace->district_of.reserve(n);
  trace->vote_of.reserve(n);
  if (communities) trace->community_of.reserve(n);
}

inline void record(AgentTrace* trace, std::size_t district, std::size_t party) {
  if (!trace) return;
  trace->district_of.push_back(static_cast<std::uint32_t>(district));
  trace->vote_of.push_back(static_cast<std::uint32_t>(party));
}

}  // namespace elect::detail
