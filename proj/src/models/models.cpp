#include "elect/models.hpp"

#include <cmath>
#include <string>

namespace elect {

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::DM: return "dm";
    case ModelKind::DPM: return "dpm";
    case ModelKind::ECM: return "ecm";
    case ModelKind::PCM: return "pcm";
    case ModelKind::SIM: return "sim";
  }
  return "?";
}

ModelKind parse_model(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "dm") return ModelKind::DM;
  if (lower == "dpm") return ModelKind::DPM;
  if (lower == "ecm") return ModelKind::ECM;
  if (lower == "pcm") return ModelKind::PCM;
  if (lower == "sim") return ModelKind::SIM;
  throw Error(ErrorCode::InvalidParameter, "unknown model '" + std::string(name) + "'");
}

std::string_view weighting_name(Weighting w) { return w == Weighting::Share ? "share" : "count"; }

Weighting parse_weighting(std::string_view name) {
  if (name == "share") return Weighting::Share;
  if (name == "count") return Weighting::Count;
  throw Error(ErrorCode::InvalidParameter, "unknown weighting '" + std::string(name) + "'");
}

ModelKind kind_of(const ModelParams& params) { return static_cast<ModelKind>(params.index()); }

ModelParams default_params(ModelKind kind, std::size_t num_parties) {
  switch (kind) {
    case ModelKind::DM: return DmParams{};
    case ModelKind::DPM: return DpmParams{};
    case ModelKind::ECM: return EcmParams{};
    case ModelKind::PCM: return PcmParams{std::vector<double>(num_parties, 0.5)};
    case ModelKind::SIM: return SimParams{};
  }
  return DmParams{};
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidParameter, what);
}

bool unit(double x) { return x >= 0.0 && x <= 1.0; }

struct Validator {
  const ElectorateSpec& spec;

  void operator()(const DmParams& p) const {
    require(p.concentration > 0.0 && std::isfinite(p.concentration), "concentration must be positive");
  }
  void operator()(const DpmParams& p) const {
    require(p.gamma.size() == 1 || p.gamma.size() == spec.num_districts,
            "gamma needs 1 or " + std::to_string(spec.num_districts) + " entries");
    for (double g : p.gamma) require(unit(g), "gamma must lie in [0, 1]");
  }
  void operator()(const EcmParams& p) const {
    require(p.alpha > 0.0 && std::isfinite(p.alpha), "alpha must be positive");
    require(p.beta > 0.0 && p.beta <= 1.0, "beta must lie in (0, 1]");
  }
  void operator()(const PcmParams& p) const {
    require(p.eta.size() == spec.num_parties, "eta needs one entry per party");
    for (double e : p.eta) require(unit(e), "eta must lie in [0, 1]");
  }
  void operator()(const SimParams& p) const {
    require(p.num_communities >= 1, "need at least one community");
    if (!p.community_proportions.empty()) {
      require(p.community_proportions.size() == p.num_communities, "community_proportions length differs from C");
      double sum = 0.0;
      for (double x : p.community_proportions) {
        require(x >= 0.0, "community proportions must be non-negative");
        sum += x;
      }
      require(std::abs(sum - 1.0) < 1e-6, "community proportions must sum to 1");
    } else {
      require(p.stick_breaking > 0.0, "stick_breaking must be positive");
    }
    if (!p.affinity.empty()) {
      require(p.affinity.size() == p.num_communities, "affinity needs one row per community");
      for (const auto& row : p.affinity) {
        require(row.size() == spec.num_parties, "affinity needs one column per party");
        for (int a : row) require(a >= -1 && a <= 1, "affinity entries must be -1, 0 or 1");
      }
    }
    if (!p.party_sd.empty()) {
      require(p.party_sd.size() == spec.num_parties, "party_sd needs one entry per party");
      for (double s : p.party_sd) require(s > 0.0, "party_sd must be positive");
    } else {
      require(p.gamma_shape > 0.0, "gamma_shape must be positive");
    }
    require(unit(p.district_mixing), "district_mixing must lie in [0, 1]");
    require(p.kappa_a > 0.0 && p.kappa_b > 0.0, "kappa prior parameters must be positive");
    if (p.kappa) require(unit(*p.kappa), "kappa must lie in [0, 1]");
    require(p.party_labels.empty() || p.party_labels.size() == spec.num_parties,
            "party_labels needs one entry per party");
  }
};

}  // namespace

void validate_params(const ModelParams& params, const ElectorateSpec& spec) {
  std::visit(Validator{spec}, params);
}

TallyMatrix simulate(const ElectorateSpec& spec, const ModelParams& params, std::uint64_t seed,
                     AgentTrace* trace) {
  validate_params(params, spec);
  return std::visit(
      [&](const auto& p) -> TallyMatrix {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DmParams>) return simulate_dm(spec, p, seed, trace);
        else if constexpr (std::is_same_v<P, DpmParams>) return simulate_dpm(spec, p, seed, trace);
        else if constexpr (std::is_same_v<P, EcmParams>) return simulate_ecm(spec, p, seed, trace);
        else if constexpr (std::is_same_v<P, PcmParams>) return simulate_pcm(spec, p, seed, trace);
        else return simulate_sim(spec, p, seed, trace);
      },
      params);
}

std::vector<Count> community_histogram(const AgentTrace& trace, std::size_t community,
                                       std::size_t num_districts) {
  if (community >= trace.num_communities)
    throw Error(ErrorCode::UnknownCommunity, "community " + std::to_string(community) + " does not exist");
  std::vector<Count> out(num_districts, 0);
  for (std::size_t i = 0; i < trace.community_of.size(); ++i)
    if (trace.community_of[i] == community) ++out[trace.district_of[i]];
  return out;
}

}  // namespace elect
