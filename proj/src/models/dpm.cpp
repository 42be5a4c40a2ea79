#include "elect/models.hpp"
#include "trace_util.hpp"

namespace elect {

TallyMatrix simulate_dpm(const ElectorateSpec& spec, const DpmParams& params, std::uint64_t seed,
                         AgentTrace* trace) {
  Rng rng(seed);
  auto state = SamplerState::from_spec(spec);
  const std::size_t K = spec.num_parties;
  TallyMatrix tally(spec.num_districts, K);
  detail::reserve_trace(trace, spec, false);

  std::vector<double> weights(K);
  for (std::size_t s = 0; s < spec.num_districts; ++s) {
    const double g = params.gamma.size() == 1 ? params.gamma[0] : params.gamma[s];
    auto row = tally.row(s);
    for (Count i = 0; i < spec.district_sizes[s]; ++i) {
      // Share: reinforcement by the district's running vote fraction, which is
      // undefined for the first elector, who follows popularity alone.
      const double scale = params.weighting == Weighting::Count ? 1.0 : (i > 0 ? 1.0 / static_cast<double>(i) : 0.0);
      const double mix = params.weighting == Weighting::Share && i == 0 ? 0.0 : g;
      for (std::size_t k = 0; k < K; ++k)
        weights[k] = mix * static_cast<double>(row[k]) * scale + (1.0 - mix) * spec.popularity[k];
      const std::size_t k = state.draw_party(weights, rng);
      ++row[k];
      detail::record(trace, s, k);
    }
  }
  return tally;
}

}  // namespace elect
