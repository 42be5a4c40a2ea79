#include "elect/models.hpp"
#include "trace_util.hpp"

namespace elect {

TallyMatrix simulate_dm(const ElectorateSpec& spec, const DmParams& params, std::uint64_t seed,
                        AgentTrace* trace) {
  Rng rng(seed);
  auto state = SamplerState::from_spec(spec);
  TallyMatrix tally(spec.num_districts, spec.num_parties);
  detail::reserve_trace(trace, spec, false);

  std::vector<double> alpha(spec.num_parties);
  for (std::size_t k = 0; k < alpha.size(); ++k) alpha[k] = params.concentration * spec.popularity[k];

  for (std::size_t s = 0; s < spec.num_districts; ++s) {
    const std::vector<double> local = rng.dirichlet(alpha);
    auto row = tally.row(s);
    for (Count i = 0; i < spec.district_sizes[s]; ++i) {
      const std::size_t k = state.draw_party(local, rng);
      ++row[k];
      detail::record(trace, s, k);
    }
  }
  return tally;
}

}  // namespace elect
