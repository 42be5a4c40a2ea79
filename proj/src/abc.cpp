#include "elect/abc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "elect/parallel.hpp"

namespace elect {

void PriorSpec::validate() const {
  if (parameters.empty()) throw Error(ErrorCode::ConfigError, "prior has no parameters");
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    const auto& p = parameters[i];
    if (!(p.lo < p.hi)) throw Error(ErrorCode::ConfigError, "prior range for '" + p.name + "' needs lo < hi");
    for (std::size_t j = 0; j < i; ++j)
      if (parameters[j].name == p.name) throw Error(ErrorCode::ConfigError, "prior lists '" + p.name + "' twice");
  }
}

void ABCConfig::validate() const {
  if (explore_budget < 1 || seed_count < 1 || exploit_budget < 0 || target_accepted < 1 || max_rounds < 0 ||
      replicas_per_candidate < 1)
    throw Error(ErrorCode::ConfigError, "ABC budgets must be positive");
  if (!(acceptance_eps > 0.0)) throw Error(ErrorCode::ConfigError, "acceptance_eps must be positive");
  if (!(perturb_scale > 0.0 && perturb_scale <= 1.0))
    throw Error(ErrorCode::ConfigError, "perturb_scale must lie in (0, 1]");
  for (double w : distance_weights)
    if (w < 0.0) throw Error(ErrorCode::ConfigError, "distance weights must be non-negative");
}

namespace {

struct IndexedName {
  std::string base;
  std::optional<std::size_t> index;
};

IndexedName split_name(const std::string& name) {
  const auto open = name.find('[');
  if (open == std::string::npos) return {name, std::nullopt};
  if (name.back() != ']') throw Error(ErrorCode::InvalidParameter, "malformed parameter name '" + name + "'");
  try {
    return {name.substr(0, open), std::stoul(name.substr(open + 1, name.size() - open - 2))};
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidParameter, "malformed parameter name '" + name + "'");
  }
}

[[noreturn]] void unknown(const std::string& name, ModelKind kind) {
  throw Error(ErrorCode::InvalidParameter,
              "model " + std::string(model_name(kind)) + " has no parameter '" + name + "'");
}

void set_indexed(std::vector<double>& target, const IndexedName& n, double value, std::size_t size,
                 const std::string& full) {
  if (target.size() == 1 && size > 1) target.assign(size, target[0]);
  if (target.size() != size) target.assign(size, value);
  if (!n.index) {
    std::fill(target.begin(), target.end(), value);
  } else {
    if (*n.index >= size) throw Error(ErrorCode::InvalidParameter, "index out of range in '" + full + "'");
    target[*n.index] = value;
  }
}

}  // namespace

ModelParams apply_parameters(const ModelParams& base, const std::vector<std::string>& names,
                             const std::vector<double>& values, const ElectorateSpec& spec) {
  if (names.size() != values.size()) throw Error(ErrorCode::DimensionMismatch, "names and values differ in length");
  ModelParams out = base;
  const ModelKind kind = kind_of(base);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const IndexedName n = split_name(names[i]);
    const double v = values[i];
    std::visit(
        [&](auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, DmParams>) {
            if (n.base != "concentration" || n.index) unknown(names[i], kind);
            p.concentration = v;
          } else if constexpr (std::is_same_v<P, DpmParams>) {
            if (n.base != "gamma") unknown(names[i], kind);
            if (!n.index) p.gamma = {v};
            else set_indexed(p.gamma, n, v, spec.num_districts, names[i]);
          } else if constexpr (std::is_same_v<P, EcmParams>) {
            if (n.index) unknown(names[i], kind);
            if (n.base == "alpha") p.alpha = v;
            else if (n.base == "beta") p.beta = v;
            else unknown(names[i], kind);
          } else if constexpr (std::is_same_v<P, PcmParams>) {
            if (n.base != "eta") unknown(names[i], kind);
            set_indexed(p.eta, n, v, spec.num_parties, names[i]);
          } else {
            if (n.base == "party_sd") {
              set_indexed(p.party_sd, n, v, spec.num_parties, names[i]);
              return;
            }
            if (n.index) unknown(names[i], kind);
            if (n.base == "district_mixing") p.district_mixing = v;
            else if (n.base == "kappa") p.kappa = v;
            else if (n.base == "stick_breaking") p.stick_breaking = v;
            else if (n.base == "gamma_shape") p.gamma_shape = v;
            else unknown(names[i], kind);
          }
        },
        out);
  }
  return out;
}

PriorSpec default_prior(ModelKind kind, std::size_t num_parties) {
  PriorSpec prior;
  switch (kind) {
    case ModelKind::DM: prior.parameters = {{"concentration", 0.1, 10.0}}; break;
    case ModelKind::DPM: prior.parameters = {{"gamma", 0.0, 1.0}}; break;
    case ModelKind::ECM: prior.parameters = {{"alpha", 1.0, 100.0}, {"beta", 1e-3, 1.0}}; break;
    case ModelKind::PCM:
      for (std::size_t k = 0; k < num_parties; ++k)
        prior.parameters.push_back({"eta[" + std::to_string(k) + "]", 0.0, 1.0});
      break;
    case ModelKind::SIM: prior.parameters = {{"district_mixing", 0.0, 1.0}}; break;
  }
  return prior;
}

std::uint64_t candidate_seed(std::uint64_t seed, std::uint64_t candidate, int replica) {
  return derive_seed(derive_seed(seed, 3, candidate), static_cast<std::uint64_t>(replica));
}

SummarySimulator make_simulator(const ElectorateSpec& spec, const ModelParams& base,
                                const std::vector<std::string>& names) {
  // Fail on unknown names now rather than inside a worker.
  apply_parameters(base, names, std::vector<double>(names.size(), 0.5), spec);
  return [spec, base, names](const std::vector<double>& psi, std::uint64_t seed, int replicas) {
    const ModelParams params = apply_parameters(base, names, psi, spec);
    std::vector<SummaryStats> runs;
    runs.reserve(static_cast<std::size_t>(replicas));
    for (int r = 0; r < replicas; ++r)
      runs.push_back(summarize(simulate(spec, params, derive_seed(seed, static_cast<std::uint64_t>(r))), spec));
    return mean_summary(runs);
  };
}

namespace {

/// Shared evaluation loop. Candidates are scored in index order, in parallel
/// chunks; results past the point where the target is met are discarded, so
/// the outcome does not depend on the number of workers.
class Calibrator {
 public:
  Calibrator(const SummarySimulator& sim, const SummaryStats& observed, const PriorSpec& prior,
             const ABCConfig& config, std::uint64_t seed)
      : sim_(sim), observed_(observed), prior_(prior), config_(config), seed_(seed) {
    prior.validate();
    config.validate();
    for (const auto& p : prior.parameters) result_.names.push_back(p.name);
  }

  bool done() const { return static_cast<int>(result_.accepted.size()) >= config_.target_accepted; }

  std::vector<double> prior_draw(std::uint64_t index) const {
    Rng rng(derive_seed(seed_, 1, index));
    std::vector<double> psi;
    for (const auto& p : prior_.parameters) psi.push_back(p.lo + (p.hi - p.lo) * rng.uniform());
    return psi;
  }

  std::vector<double> perturb(const std::vector<double>& centre, std::uint64_t index) const {
    Rng rng(derive_seed(seed_, 2, index));
    std::vector<double> psi(centre.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const auto& p = prior_.parameters[i];
      psi[i] = std::clamp(centre[i] + rng.normal(0.0, config_.perturb_scale * (p.hi - p.lo)), p.lo, p.hi);
    }
    return psi;
  }

  /// Evaluates candidates produced by make(index) for `count` new indices.
  template <class Make>
  void evaluate(std::size_t count, Make&& make) {
    const std::size_t chunk = static_cast<std::size_t>(std::max(config_.jobs, 1));
    for (std::size_t start = 0; start < count && !done(); start += chunk) {
      const std::size_t n = std::min(chunk, count - start);
      std::vector<Candidate> batch(n);
      for (std::size_t j = 0; j < n; ++j) {
        batch[j].index = next_index_ + j;
        batch[j].psi = make(batch[j].index);
      }
      parallel_for(n, config_.jobs, [&](std::size_t j) {
        const SummaryStats s = sim_(batch[j].psi, derive_seed(seed_, 3, batch[j].index), config_.replicas_per_candidate);
        batch[j].distance = distance(s, observed_, config_.distance_weights);
      });
      for (auto& c : batch) {
        if (done()) break;
        ++next_index_;
        ++result_.candidates_evaluated;
        result_.evaluations_used += config_.replicas_per_candidate;
        if (c.distance < result_.psi_opt.distance || result_.psi_opt.psi.empty()) result_.psi_opt = c;
        if (c.distance <= config_.acceptance_eps) result_.accepted.push_back(c);
        evaluated_.push_back(std::move(c));
      }
    }
  }

  std::vector<Candidate> best(std::size_t count) const {
    std::vector<Candidate> sorted = evaluated_;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
    if (sorted.size() > count) sorted.resize(count);
    return sorted;
  }

  void checkpoint() { result_.best_history.push_back(result_.psi_opt.distance); }

  CalibrationResult finish() {
    result_.converged = !result_.accepted.empty();
    return std::move(result_);
  }

  const ABCConfig& config() const { return config_; }

 private:
  const SummarySimulator& sim_;
  const SummaryStats& observed_;
  const PriorSpec& prior_;
  const ABCConfig& config_;
  std::uint64_t seed_;
  std::uint64_t next_index_ = 0;
  std::vector<Candidate> evaluated_;
  CalibrationResult result_;
};

void explore(Calibrator& cal) {
  cal.evaluate(static_cast<std::size_t>(cal.config().explore_budget),
               [&](std::uint64_t index) { return cal.prior_draw(index); });
  cal.checkpoint();
}

}  // namespace

CalibrationResult abc_reject(const SummarySimulator& simulate, const SummaryStats& observed,
                             const PriorSpec& prior, const ABCConfig& config, std::uint64_t seed) {
  Calibrator cal(simulate, observed, prior, config, seed);
  explore(cal);
  return cal.finish();
}

CalibrationResult abc_explore_exploit(const SummarySimulator& simulate, const SummaryStats& observed,
                                      const PriorSpec& prior, const ABCConfig& config, std::uint64_t seed) {
  Calibrator cal(simulate, observed, prior, config, seed);
  explore(cal);
  if (config.exploit_budget == 0) return cal.finish();
  for (int round = 0; round < config.max_rounds && !cal.done(); ++round) {
    const std::vector<Candidate> seeds = cal.best(static_cast<std::size_t>(config.seed_count));
    const std::size_t per_seed = static_cast<std::size_t>(config.exploit_budget);
    std::uint64_t first = 0;
    bool first_set = false;
    cal.evaluate(seeds.size() * per_seed, [&](std::uint64_t index) {
      if (!first_set) {
        first = index;
        first_set = true;
      }
      return cal.perturb(seeds[(index - first) / per_seed].psi, index);
    });
    cal.checkpoint();
  }
  return cal.finish();
}

}  // namespace elect
