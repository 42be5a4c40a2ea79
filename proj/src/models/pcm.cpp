#include "elect/fenwick.hpp"
#include "elect/models.hpp"
#include "trace_util.hpp"

namespace elect {

// Each elector first draws a party under the party quotas, then a district
// with weight eta_k * V[s][k] / m_k + (1 - eta_k) / S over districts with room
// left (m_k: votes already cast for k). Both terms are sampled exactly: one
// Fenwick tree per party holds V[s][k] restricted to open districts.
TallyMatrix simulate_pcm(const ElectorateSpec& spec, const PcmParams& params, std::uint64_t seed,
                         AgentTrace* trace) {
  Rng rng(seed);
  auto state = SamplerState::from_spec(spec);
  const std::size_t S = spec.num_districts;
  const std::size_t K = spec.num_parties;
  TallyMatrix tally(S, K);
  detail::reserve_trace(trace, spec, false);

  std::vector<FenwickTree> open_votes(K, FenwickTree(S));
  std::vector<Count> placed(K, 0);
  ActiveSet open(S);
  const bool share = params.weighting == Weighting::Share;

  for (Count i = 0; i < spec.num_electors; ++i) {
    const std::size_t k = state.draw_party(spec.popularity, rng);
    const double eta = params.eta[k];
    const FenwickTree& tree = open_votes[k];

    double reinforce = 0.0;
    if (tree.total() > 0) {
      reinforce = eta * static_cast<double>(tree.total());
      if (share) reinforce /= static_cast<double>(placed[k]);
    }
    double uniform = (1.0 - eta) * static_cast<double>(open.size());
    if (share) uniform /= static_cast<double>(S);
    if (reinforce + uniform <= 0.0) uniform = 1.0;

    std::size_t s;
    if (rng.uniform() * (reinforce + uniform) < reinforce)
      s = tree.find(static_cast<std::int64_t>(rng.index(static_cast<std::size_t>(tree.total()))));
    else
      s = open[rng.index(open.size())];

    ++tally.at(s, k);
    ++placed[k];
    open_votes[k].add(s, 1);
    if (--state.remaining_district_capacity[s] == 0) {
      open.remove(s);
      for (auto& t : open_votes) t.set(s, 0);
    }
    detail::record(trace, s, k);
  }
  return tally;
}

}  // namespace elect
