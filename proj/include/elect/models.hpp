#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "elect/core.hpp"

namespace elect {

enum class ModelKind { DM, DPM, ECM, PCM, SIM };

std::string_view model_name(ModelKind kind);
ModelKind parse_model(std::string_view name);

/// How running counts enter a rich-get-richer weight.
///
/// Share divides the count by the population it was drawn from, so the
/// reinforcing term is a fraction comparable to the popularity term it is
/// mixed with. Count uses the raw count as written in the model equations.
enum class Weighting { Share, Count };

std::string_view weighting_name(Weighting w);
Weighting parse_weighting(std::string_view name);

/// District-wise model: theta_s ~ Dirichlet(concentration * theta).
struct DmParams {
  double concentration = 1.0;
};

/// District-wise polarization model. gamma holds one value (broadcast) or one
/// per district.
struct DpmParams {
  std::vector<double> gamma{0.8};
  Weighting weighting = Weighting::Share;
};

/// Elector community model (Chinese restaurant franchise with block votes).
struct EcmParams {
  double alpha = 50.0;
  double beta = 0.5;
  Weighting weighting = Weighting::Share;
};

/// Party-wise concentration model, one eta per party.
struct PcmParams {
  std::vector<double> eta;
  Weighting weighting = Weighting::Share;
};

/// Social identity model.
struct SimParams {
  std::size_t num_communities = 3;
  std::vector<double> community_proportions;  // empty: stick-breaking draw
  double stick_breaking = 1.0;                // c_sbp
  std::vector<std::vector<int>> affinity;     // C x K in {-1,0,1}; empty: drawn
  std::vector<double> party_sd;               // empty: Gamma(gamma_shape) draw
  double gamma_shape = 2.0;                   // c_gam
  double district_mixing = 0.9;               // alpha_crp
  Weighting weighting = Weighting::Share;
  bool local_influence = false;
  double kappa_a = 2.0;
  double kappa_b = 2.0;
  std::optional<double> kappa;  // fixes kappa instead of drawing it
  /// Identity of each party's valuation noise stream; defaults to the party
  /// index. Permuting parties together with their labels permutes the tally.
  std::vector<std::uint64_t> party_labels;
};

using ModelParams = std::variant<DmParams, DpmParams, EcmParams, PcmParams, SimParams>;

ModelKind kind_of(const ModelParams& params);

/// Default parameters for a model in a K-party setting.
ModelParams default_params(ModelKind kind, std::size_t num_parties);

/// Throws InvalidParameter when parameters are out of range for the spec.
void validate_params(const ModelParams& params, const ElectorateSpec& spec);

/// Per-elector record of a run.
struct AgentTrace {
  std::vector<std::uint32_t> district_of;   // Z_i
  std::vector<std::uint32_t> vote_of;       // X_i
  std::vector<std::uint32_t> community_of;  // C_i (ECM: global community id; SIM: social community)
  std::size_t num_communities = 0;

  bool empty() const { return district_of.empty(); }
};

TallyMatrix simulate_dm(const ElectorateSpec& spec, const DmParams& params, std::uint64_t seed,
                        AgentTrace* trace = nullptr);
TallyMatrix simulate_dpm(const ElectorateSpec& spec, const DpmParams& params, std::uint64_t seed,
                         AgentTrace* trace = nullptr);
TallyMatrix simulate_ecm(const ElectorateSpec& spec, const EcmParams& params, std::uint64_t seed,
                         AgentTrace* trace = nullptr);
TallyMatrix simulate_pcm(const ElectorateSpec& spec, const PcmParams& params, std::uint64_t seed,
                         AgentTrace* trace = nullptr);
TallyMatrix simulate_sim(const ElectorateSpec& spec, const SimParams& params, std::uint64_t seed,
                         AgentTrace* trace = nullptr);

/// Dispatches on the parameter type. The spec must already be validated.
TallyMatrix simulate(const ElectorateSpec& spec, const ModelParams& params, std::uint64_t seed,
                     AgentTrace* trace = nullptr);

/// Members of `community` per district.
std::vector<Count> community_histogram(const AgentTrace& trace, std::size_t community,
                                       std::size_t num_districts);

/// Chinese restaurant process over n electors: label[i] is the community of
/// elector i (numbered in creation order), sizes[c] its member count.
void crp_partition(Count n, double alpha, Rng& rng, std::vector<std::uint32_t>& label, std::vector<Count>& sizes);

// Pieces of the social identity pipeline, exposed for testing.
std::vector<double> stick_breaking(std::size_t components, double concentration, Rng& rng);
std::vector<std::vector<int>> draw_affinity(std::span<const double> proportions, std::size_t parties,
                                            Rng& rng, int max_attempts = 10000);

}  // namespace elect
