#include <algorithm>
#include <cmath>
#include <numbers>

#include "elect/models.hpp"
#include "trace_util.hpp"

namespace elect {

std::vector<double> stick_breaking(std::size_t components, double concentration, Rng& rng) {
  std::vector<double> out(components, 0.0);
  double rest = 1.0;
  for (std::size_t j = 0; j + 1 < components; ++j) {
    const double v = rng.beta(1.0, concentration);
    out[j] = v * rest;
    rest -= out[j];
  }
  if (components > 0) out.back() = std::max(rest, 0.0);
  return out;
}

std::vector<std::vector<int>> draw_affinity(std::span<const double> proportions, std::size_t parties,
                                            Rng& rng, int max_attempts) {
  const std::size_t C = proportions.size();
  std::vector<std::vector<int>> phi(C, std::vector<int>(parties, 0));
  for (std::size_t k = 0; k < parties; ++k) {
    bool accepted = false;
    for (int attempt = 0; attempt < max_attempts && !accepted; ++attempt) {
      double weighted = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        phi[c][k] = static_cast<int>(rng.index(3)) - 1;
        weighted += proportions[c] * phi[c][k];
      }
      // No party may be favoured by more than half the population on balance.
      accepted = weighted <= 0.5;
    }
    if (!accepted)
      throw Error(ErrorCode::PhiRejectionExceeded,
                  "no admissible affinity column for party " + std::to_string(k) + " after " +
                      std::to_string(max_attempts) + " attempts");
  }
  return phi;
}

namespace {

/// Standard normal keyed by (stream, elector, party label), independent of
/// the order in which parties are visited.
double keyed_normal(std::uint64_t stream, std::uint64_t elector, std::uint64_t label) {
  const std::uint64_t h = derive_seed(stream, elector, label);
  const double u1 = 1.0 - static_cast<double>(mix64(h) >> 11) * 0x1.0p-53;
  const double u2 = static_cast<double>(mix64(h ^ 0xa0761d6478bd642fULL) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t argmax(std::span<const double> x) {
  return static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin());
}

}  // namespace

TallyMatrix simulate_sim(const ElectorateSpec& spec, const SimParams& params, std::uint64_t seed,
                         AgentTrace* trace) {
  Rng rng(seed);
  const std::size_t S = spec.num_districts;
  const std::size_t K = spec.num_parties;
  const std::size_t C = params.num_communities;
  const auto N = static_cast<std::size_t>(spec.num_electors);

  const std::vector<double> eta = params.community_proportions.empty()
                                      ? stick_breaking(C, params.stick_breaking, rng)
                                      : params.community_proportions;
  const auto phi = params.affinity.empty() ? draw_affinity(eta, K, rng) : params.affinity;
  std::vector<double> sd = params.party_sd;
  if (sd.empty())
    for (std::size_t k = 0; k < K; ++k) sd.push_back(rng.gamma(params.gamma_shape));
  double kappa = 1.0;
  if (params.local_influence) kappa = params.kappa ? *params.kappa : rng.beta(params.kappa_a, params.kappa_b);

  std::vector<std::uint64_t> labels = params.party_labels;
  if (labels.empty())
    for (std::size_t k = 0; k < K; ++k) labels.push_back(k);
  const std::uint64_t noise_stream = derive_seed(seed, 0x5157);

  TallyMatrix tally(S, K);
  detail::reserve_trace(trace, spec, true);
  if (trace) trace->num_communities = C;

  // District choice for a member of community c: weight
  //   alpha * (share of c among the district's current residents) + (1 - alpha) / S
  // over districts with room left. Count weighting uses the member count instead.
  const double alpha = params.district_mixing;
  const bool share = params.weighting == Weighting::Share;
  std::vector<Count> capacity = spec.district_sizes;
  std::vector<Count> residents(S, 0);
  std::vector<Count> members(C * S, 0);
  std::vector<std::vector<double>> weights(C, std::vector<double>(S, (1.0 - alpha) / static_cast<double>(S)));
  auto refresh = [&](std::size_t s) {
    for (std::size_t c = 0; c < C; ++c) {
      const double m = static_cast<double>(members[c * S + s]);
      const double affinity = share ? m / static_cast<double>(residents[s]) : m;
      weights[c][s] = alpha * affinity + (1.0 - alpha) / static_cast<double>(S);
    }
  };

  const bool local = params.local_influence;
  std::vector<double> valuation(local ? N * K : K);
  std::vector<std::uint32_t> district(local ? N : 0);

  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t c = rng.categorical(eta);
    const std::size_t s = constrained_sample(weights[c], capacity, rng);
    ++residents[s];
    ++members[c * S + s];
    refresh(s);

    double* lam = local ? &valuation[i * K] : valuation.data();
    for (std::size_t k = 0; k < K; ++k)
      lam[k] = phi[c][k] + sd[k] * keyed_normal(noise_stream, i, labels[k]);

    if (local) {
      district[i] = static_cast<std::uint32_t>(s);
    } else {
      const std::size_t k = argmax({lam, K});
      ++tally.at(s, k);
      detail::record(trace, s, k);
    }
    if (trace) trace->community_of.push_back(static_cast<std::uint32_t>(c));
  }

  if (local) {
    // Valuations are pulled toward the district mean (which includes the
    // elector) with weight 1 - kappa.
    std::vector<double> mean(S * K, 0.0);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < K; ++k) mean[district[i] * K + k] += valuation[i * K + k];
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t k = 0; k < K; ++k) mean[s * K + k] /= static_cast<double>(residents[s]);
    std::vector<double> adjusted(K);
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t s = district[i];
      for (std::size_t k = 0; k < K; ++k)
        adjusted[k] = kappa * valuation[i * K + k] + (1.0 - kappa) * mean[s * K + k];
      const std::size_t k = argmax(adjusted);
      ++tally.at(s, k);
      detail::record(trace, s, k);
    }
  }
  return tally;
}

}  // namespace elect
