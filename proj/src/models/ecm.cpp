#include "elect/models.hpp"
#include "trace_util.hpp"

namespace elect {

void crp_partition(Count n, double alpha, Rng& rng, std::vector<std::uint32_t>& label,
                   std::vector<Count>& sizes) {
  label.resize(static_cast<std::size_t>(n));
  sizes.clear();
  for (Count i = 0; i < n; ++i) {
    const double seated = static_cast<double>(i);
    std::uint32_t c;
    // Joining the community of a uniformly chosen earlier elector is the same
    // as joining community j with probability |j| / (i + alpha).
    if (rng.uniform() * (seated + alpha) < seated) {
      c = label[rng.index(static_cast<std::size_t>(i))];
    } else {
      c = static_cast<std::uint32_t>(sizes.size());
      sizes.push_back(0);
    }
    label[static_cast<std::size_t>(i)] = c;
    ++sizes[c];
  }
}

TallyMatrix simulate_ecm(const ElectorateSpec& spec, const EcmParams& params, std::uint64_t seed,
                         AgentTrace* trace) {
  Rng rng(seed);
  auto state = SamplerState::from_spec(spec);
  const std::size_t K = spec.num_parties;
  TallyMatrix tally(spec.num_districts, K);
  detail::reserve_trace(trace, spec, true);

  std::vector<double> dishes(K, 0.0);  // communities that have voted for each party, across districts
  double total_dishes = 0.0;
  std::vector<double> weights(K);
  auto refresh_weights = [&] {
    const bool share = params.weighting == Weighting::Share;
    for (std::size_t k = 0; k < K; ++k) {
      const double reinforce = total_dishes > 0.0 ? (share ? dishes[k] / total_dishes : dishes[k]) : 0.0;
      weights[k] = reinforce + params.beta * spec.popularity[k];
    }
  };

  std::vector<std::uint32_t> label;
  std::vector<Count> sizes;
  std::vector<std::uint32_t> global_id;
  std::vector<std::int32_t> block_vote;
  std::vector<Count> feasible(K);
  std::uint32_t next_id = 0;

  for (std::size_t s = 0; s < spec.num_districts; ++s) {
    const Count n = spec.district_sizes[s];
    crp_partition(n, params.alpha, rng, label, sizes);
    global_id.assign(sizes.size(), 0);
    block_vote.assign(sizes.size(), -1);
    auto row = tally.row(s);

    // Blocks that fit no party's remaining quota are split; each member then
    // votes alone and becomes a community of one.
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      refresh_weights();
      bool any = false;
      for (std::size_t k = 0; k < K; ++k) {
        feasible[k] = state.remaining_party_votes[k] >= sizes[c] ? 1 : 0;
        any = any || feasible[k] > 0;
      }
      if (!any) continue;
      const std::size_t k = constrained_sample(weights, feasible, rng);
      state.remaining_party_votes[k] -= sizes[c];
      row[k] += sizes[c];
      dishes[k] += 1.0;
      total_dishes += 1.0;
      block_vote[c] = static_cast<std::int32_t>(k);
      global_id[c] = next_id++;
    }

    for (Count i = 0; i < n; ++i) {
      const std::uint32_t c = label[static_cast<std::size_t>(i)];
      std::size_t k;
      std::uint32_t id;
      if (block_vote[c] >= 0) {
        k = static_cast<std::size_t>(block_vote[c]);
        id = global_id[c];
      } else {
        refresh_weights();
        k = state.draw_party(weights, rng);
        ++row[k];
        dishes[k] += 1.0;
        total_dishes += 1.0;
        id = next_id++;
      }
      if (trace) {
        detail::record(trace, s, k);
        trace->community_of.push_back(id);
      }
    }
  }
  if (trace) trace->num_communities = next_id;
  return tally;
}

}  // namespace elect
