#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "elect/models.hpp"
#include "elect/stats.hpp"

namespace elect {

struct PriorRange {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
};

/// Independent uniform priors, one per free parameter.
struct PriorSpec {
  std::vector<PriorRange> parameters;

  std::size_t size() const { return parameters.size(); }
  void validate() const;
};

struct ABCConfig {
  int explore_budget = 200;
  int seed_count = 10;
  int exploit_budget = 50;
  double perturb_scale = 0.05;
  double acceptance_eps = 0.05;
  int target_accepted = 100;
  int max_rounds = 20;
  int replicas_per_candidate = 5;
  DistanceWeights distance_weights = kUnitWeights;
  int jobs = 1;

  void validate() const;
};

struct Candidate {
  std::vector<double> psi;
  double distance = std::numeric_limits<double>::infinity();
  std::uint64_t index = 0;  // position in evaluation order; fixes its seeds
};

struct CalibrationResult {
  std::vector<std::string> names;
  std::vector<Candidate> accepted;
  Candidate psi_opt;
  bool converged = false;  // false: nothing met eps, psi_opt is the best seen
  std::int64_t evaluations_used = 0;  // simulator runs
  std::int64_t candidates_evaluated = 0;
  /// Best distance seen after the explore phase and after each exploit round.
  std::vector<double> best_history;
};

/// Scores a parameter vector: mean summary over `replicas` runs whose seeds
/// derive from `seed`.
using SummarySimulator =
    std::function<SummaryStats(const std::vector<double>& psi, std::uint64_t seed, int replicas)>;

/// Binds a model to an electorate. Free parameter names:
///   dm: concentration          dpm: gamma (or gamma[s])
///   ecm: alpha, beta           pcm: eta[k]
///   sim: district_mixing, kappa, stick_breaking, gamma_shape, party_sd[k]
SummarySimulator make_simulator(const ElectorateSpec& spec, const ModelParams& base,
                                const std::vector<std::string>& names);

/// Writes named values into a copy of `base`. Throws InvalidParameter for
/// names the model does not have.
ModelParams apply_parameters(const ModelParams& base, const std::vector<std::string>& names,
                             const std::vector<double>& values, const ElectorateSpec& spec);

/// Free parameters and ranges used when no prior is supplied.
PriorSpec default_prior(ModelKind kind, std::size_t num_parties);

/// Seed of replica r of candidate j. Shared by both algorithms.
std::uint64_t candidate_seed(std::uint64_t seed, std::uint64_t candidate, int replica);

CalibrationResult abc_reject(const SummarySimulator& simulate, const SummaryStats& observed,
                             const PriorSpec& prior, const ABCConfig& config, std::uint64_t seed);

CalibrationResult abc_explore_exploit(const SummarySimulator& simulate, const SummaryStats& observed,
                                      const PriorSpec& prior, const ABCConfig& config, std::uint64_t seed);

}  // namespace elect
