// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "../oracles.hpp"
#include "elect/abc.hpp"
#include "elect/io.hpp"
#include "elect/models.hpp"
#include "elect/parallel.hpp"
#include "elect/stats.hpp"

using namespace elect;

namespace {

const int kJobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt_vec(const std::vector<double>& v, int decimals = 1) {
  std::string out = "(";
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.*f", i ? ", " : "", decimals, v[i]);
    out += buf;
  }
  return out + ")";
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

bool within(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  for (std::size_t k = 0; k < want.size(); ++k)
    if (std::abs(got[k] - want[k]) > tol) return false;
  return true;
}

ElectorateSpec equal_spec(std::size_t S, Count N, std::vector<double> theta) {
  ElectorateSpec s;
  s.num_districts = S;
  s.num_electors = N;
  s.popularity = std::move(theta);
  return validate_spec(s);
}

std::vector<std::vector<Count>> seat_runs(const ElectorateSpec& spec, const ModelParams& params, std::uint64_t base,
                                          int replicas) {
  std::vector<std::vector<Count>> out(static_cast<std::size_t>(replicas));
  parallel_for(out.size(), kJobs, [&](std::size_t r) {
    out[r] = decide_outcome(simulate(spec, params, derive_seed(base, r)), spec).seats;
  });
  return out;
}

std::vector<double> mean_seats(const std::vector<std::vector<Count>>& runs) {
  std::vector<double> m(runs.front().size(), 0.0);
  for (const auto& r : runs)
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += static_cast<double>(r[k]) / static_cast<double>(runs.size());
  return m;
}

std::vector<double> as_double(const std::vector<Count>& v) { return {v.begin(), v.end()}; }

// Scoring a table row: mean seats over 100 replicas at S=100, N=1e6.
Verdict table_row(const ModelParams& params, std::vector<double> theta, std::vector<double> want, double tol,
                  std::uint64_t seed) {
  const ElectorateSpec spec = equal_spec(100, 1'000'000, std::move(theta));
  const auto m = mean_seats(seat_runs(spec, params, seed, 100));
  return {within(m, want, tol), fmt_vec(m) + " vs " + fmt_vec(want, 0) + fmt(" +/-%.0f", tol)};
}

Verdict c1_dm() {
  return table_row(DmParams{}, {0.5, 0.4, 0.1}, {54, 41, 5}, 4, 101);
}

Verdict c2_dpm() {
  const auto a = table_row(DpmParams{{0.8}}, {0.5, 0.4, 0.1}, {78, 22, 0}, 4, 201);
  const auto b = table_row(DpmParams{{0.9}}, {0.5, 0.4, 0.1}, {60, 35, 5}, 4, 202);
  return {a.pass && b.pass, "gamma=0.8 " + a.detail + "; gamma=0.9 " + b.detail};
}

Verdict c3_ecm() {
  return table_row(EcmParams{50.0, 0.5}, {0.5, 0.4, 0.1}, {78, 22, 0}, 12, 301);
}

Verdict c4_pcm() {
  const auto a = table_row(PcmParams{{0.5, 0.5, 0.99}}, {0.5, 0.4, 0.1}, {100, 0, 0}, 3, 401);
  const auto b = table_row(PcmParams{{0.99, 0.5, 0.5}}, {0.4, 0.35, 0.25}, {45, 55, 0}, 6, 402);
  return {a.pass && b.pass, "eta=(0.5,0.5,0.99) " + a.detail + "; eta=(0.99,0.5,0.5) " + b.detail};
}

Verdict c5_sim() {
  const ElectorateSpec spec = equal_spec(100, 1'000'000, {0.5, 0.4, 0.1});
  SimParams p;
  p.num_communities = 3;
  p.community_proportions = {0.5, 0.3, 0.2};
  p.affinity = {{1, -1, 0}, {-1, 1, 0}, {-1, 1, 0}};
  p.party_sd = {1.0, 1.0, 2.0};
  const auto runs = seat_runs(spec, p, 501, 100);
  const auto m = mean_seats(runs);
  const auto zero_c = std::count_if(runs.begin(), runs.end(), [](const auto& r) { return r[2] == 0; });
  const bool pass = within(m, {43, 57, 0}, 5) && zero_c >= 90;
  return {pass, fmt_vec(m) + " vs (43, 57, 0) +/-5; C at zero in " + std::to_string(zero_c) + "/100"};
}

// Calibrates PCM to published aggregates at `per_district` electors per district.
struct IndiaFit {
  std::vector<double> seats;
  double mwm = 0.0;
  std::vector<double> psi;
  double seconds = 0.0;
};

IndiaFit fit_india(const std::string& file, Count per_district, int replicas, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const ObservedSummary observed = load_observed_summary(std::string(ELECT_DATA_DIR) + "/" + file);
  const ElectorateSpec spec =
      equal_spec(observed.spec.num_districts, per_district * static_cast<Count>(observed.spec.num_districts),
                 observed.spec.popularity);
  ABCConfig cfg;
  cfg.explore_budget = 200;
  cfg.seed_count = 10;
  cfg.exploit_budget = 20;
  cfg.acceptance_eps = 0.05;
  cfg.target_accepted = 20;
  cfg.max_rounds = 10;
  cfg.replicas_per_candidate = replicas;
  cfg.jobs = kJobs;
  for (std::size_t f = 0; f < 4; ++f)
    if (!observed.known[f]) cfg.distance_weights[f] = 0.0;
  const PriorSpec prior = default_prior(ModelKind::PCM, spec.num_parties);
  std::vector<std::string> names;
  for (const auto& r : prior.parameters) names.push_back(r.name);
  const ModelParams base = default_params(ModelKind::PCM, spec.num_parties);
  const auto result = abc_explore_exploit(make_simulator(spec, base, names), observed.stats, prior, cfg, seed);
  const ModelParams best = apply_parameters(base, names, result.psi_opt.psi, spec);

  std::vector<SummaryStats> stats(100);
  std::vector<std::vector<Count>> seats(100);
  parallel_for(100, kJobs, [&](std::size_t r) {
    const auto t = simulate(spec, best, derive_seed(derive_seed(seed, 4), r));
    stats[r] = summarize(t, spec);
    seats[r] = decide_outcome(t, spec).seats;
  });
  IndiaFit fit;
  fit.seats = mean_seats(seats);
  fit.mwm = mean_summary(stats).margin_mean;
  fit.psi = result.psi_opt.psi;
  fit.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return fit;
}

Verdict c6_delhi() {
  const auto fit = fit_india("delhi2015.json", 2000, 10, 601);
  const bool pass = within(fit.seats, {67, 3, 0}, 3) && std::abs(fit.mwm - 0.55) <= 0.05;
  return {pass, fmt_vec(fit.seats) + " vs (67, 3, 0) +/-3, MWM " + fmt("%.3f vs 0.55 +/-0.05", fit.mwm) +
                    ", eta* " + fmt_vec(fit.psi, 2) + fmt(", %.0f s", fit.seconds)};
}

Verdict c7_us() {
  const ObservedElection us = rescale(load_observed(std::string(ELECT_DATA_DIR) + "/us2016.csv"), 100.0);
  const auto runs = seat_runs(us.spec, PcmParams{{0.99, 0.02}}, 701, 10);
  const auto mode = as_double(modal_seats(runs));
  std::string all;
  for (const auto& r : runs) all += " " + std::to_string(r[0]);
  return {within(mode, {22, 34}, 3), "modal " + fmt_vec(mode, 0) + " vs (22, 34) +/-3; " + us.parties[0] +
                                         " seats per run:" + all};
}

Verdict c8_self_calibration() {
  const ElectorateSpec spec = equal_spec(100, 100'000, {0.5, 0.4, 0.1});
  const double truths[] = {0.7, 0.85, 0.95};
  ABCConfig cfg;
  cfg.explore_budget = 60;
  cfg.seed_count = 5;
  cfg.exploit_budget = 10;
  cfg.acceptance_eps = 0.08;
  cfg.target_accepted = 10;
  cfg.max_rounds = 5;
  cfg.replicas_per_candidate = 3;
  cfg.jobs = kJobs;
  const PriorSpec prior = default_prior(ModelKind::DPM, 3);
  const std::vector<std::string> names{"gamma"};
  const ModelParams base = DpmParams{};
  const auto sim = make_simulator(spec, base, names);

  int good = 0;
  std::string detail;
  for (int t = 0; t < 10; ++t) {
    const double g = truths[t % 3];
    const std::uint64_t seed = derive_seed(801, static_cast<std::uint64_t>(t));
    const TallyMatrix truth = simulate(spec, DpmParams{{g}}, derive_seed(seed, 0));
    const auto observed_seats = as_double(decide_outcome(truth, spec).seats);
    const auto result = abc_explore_exploit(sim, summarize(truth, spec), prior, cfg, seed);
    const ModelParams fit = apply_parameters(base, names, result.psi_opt.psi, spec);
    const auto m = mean_seats(seat_runs(spec, fit, derive_seed(seed, 1), 10));
    const bool ok = within(m, observed_seats, 5);
    good += ok;
    detail += fmt(" %.2f->%.3f", g, result.psi_opt.psi[0]) + (ok ? "" : "(miss)");
  }
  return {good >= 9, std::to_string(good) + "/10 trials within 5 seats per party, need 9;" + detail};
}

// Random electorates and parameters for the invariant sweep.
ModelParams random_params(ModelKind kind, std::size_t S, std::size_t K, Rng& rng) {
  switch (kind) {
    case ModelKind::DM: return DmParams{uniform(rng, 0.1, 10.0)};
    case ModelKind::DPM: {
      DpmParams p;
      p.gamma = rng.uniform() < 0.5 ? std::vector<double>{rng.uniform()} : std::vector<double>(S);
      for (double& g : p.gamma) g = rng.uniform();
      p.weighting = rng.uniform() < 0.8 ? Weighting::Share : Weighting::Count;
      return p;
    }
    case ModelKind::ECM:
      return EcmParams{uniform(rng, 1.0, 100.0), uniform(rng, 1e-3, 1.0),
                       rng.uniform() < 0.8 ? Weighting::Share : Weighting::Count};
    case ModelKind::PCM: {
      PcmParams p;
      for (std::size_t k = 0; k < K; ++k) p.eta.push_back(rng.uniform());
      p.weighting = rng.uniform() < 0.8 ? Weighting::Share : Weighting::Count;
      return p;
    }
    case ModelKind::SIM: {
      SimParams p;
      p.num_communities = 1 + rng.index(4);
      p.district_mixing = rng.uniform();
      p.local_influence = rng.uniform() < 0.3;
      return p;
    }
  }
  return DmParams{};
}

Verdict c9_invariants() {
  Rng rng(901);
  int failures = 0, checked = 0, abc_runs = 0;
  std::string first_failure;
  auto fail = [&](const std::string& what) {
    if (failures++ == 0) first_failure = what;
  };
  for (int draw = 0; draw < 1000; ++draw) {
    const std::size_t S = 1 + rng.index(30);
    const std::size_t K = 2 + rng.index(4);
    ElectorateSpec raw;
    raw.num_districts = S;
    raw.num_electors = static_cast<Count>(S) * static_cast<Count>(1 + rng.index(300));
    std::vector<double> ones(K, 1.0);
    raw.popularity = rng.dirichlet(ones);
    if (rng.uniform() < 0.1) raw.popularity[K - 1] = 0.0;
    if (rng.uniform() < 0.3) {
      raw.district_sizes = apportion(raw.num_electors, rng.dirichlet(std::vector<double>(S, 5.0)));
      // Zero-size districts are not a valid electorate; move one elector in.
      for (auto& n : raw.district_sizes)
        if (n == 0) {
          ++n;
          --*std::max_element(raw.district_sizes.begin(), raw.district_sizes.end());
        }
    }
    const ElectorateSpec spec = validate_spec(raw);
    const auto kind = static_cast<ModelKind>(rng.index(5));
    const ModelParams params = random_params(kind, S, K, rng);
    const std::uint64_t seed = rng.next();
    const std::string where = std::string(model_name(kind)) + " draw " + std::to_string(draw);
    try {
      const TallyMatrix t = simulate(spec, params, seed);
      check_tally(t, spec, kind != ModelKind::SIM);
      const auto o = decide_outcome(t, spec);
      Count seats = 0;
      for (Count m : o.seats) seats += m;
      if (seats != static_cast<Count>(S)) fail(where + ": seats do not sum to S");
      for (double m : o.margins)
        if (m < 1.0 / static_cast<double>(K) - 1e-12) fail(where + ": margin below 1/K");
      if (!(simulate(spec, params, seed) == t)) fail(where + ": not deterministic");
    } catch (const Error& e) {
      fail(where + ": " + e.what());
    }
    ++checked;

    if (draw % 50 == 0) {
      // Accepted candidates must lie inside the prior box.
      const ElectorateSpec small = equal_spec(S, static_cast<Count>(S) * 50, spec.popularity);
      PriorSpec prior = default_prior(ModelKind::PCM, K);
      for (auto& r : prior.parameters) {
        r.lo = uniform(rng, 0.0, 0.5);
        r.hi = r.lo + uniform(rng, 0.05, 0.5);
      }
      std::vector<std::string> names;
      for (const auto& r : prior.parameters) names.push_back(r.name);
      ABCConfig cfg;
      cfg.explore_budget = 20;
      cfg.seed_count = 4;
      cfg.exploit_budget = 5;
      cfg.acceptance_eps = 0.3;
      cfg.target_accepted = 10;
      cfg.max_rounds = 3;
      cfg.replicas_per_candidate = 1;
      cfg.perturb_scale = 0.5;
      const SummaryStats observed = summarize(simulate(small, default_params(ModelKind::PCM, K), seed), small);
      const auto res = abc_explore_exploit(make_simulator(small, default_params(ModelKind::PCM, K), names),
                                           observed, prior, cfg, seed);
      ++abc_runs;
      for (const auto& c : res.accepted)
        for (std::size_t i = 0; i < c.psi.size(); ++i)
          if (c.psi[i] < prior.parameters[i].lo || c.psi[i] > prior.parameters[i].hi)
            fail("ABC draw " + std::to_string(draw) + ": accepted candidate outside prior");
    }
  }
  std::string detail = std::to_string(checked) + " simulations, " + std::to_string(abc_runs) + " calibrations, " +
                       std::to_string(failures) + " violations";
  if (failures) detail += "; first: " + first_failure;
  return {failures == 0, detail};
}

Verdict c10_toy_and_odisha() {
  const auto exact = oracle::enumerate_dm_two_party({2, 2}, {2, 2}, 0.5, 0.5);
  const ElectorateSpec toy = validate_spec({2, 2, 4, {2, 2}, {2, 2}, {}});
  std::map<Count, double> seen;
  const int runs = 50'000;
  for (int r = 0; r < runs; ++r)
    seen[simulate_dm(toy, {}, derive_seed(1001, static_cast<std::uint64_t>(r))).at(0, 0)] += 1.0 / runs;
  double worst = 0.0;
  for (const auto& [votes, p] : exact) worst = std::max(worst, std::abs(seen[votes] - p));
  const bool toy_ok = worst <= 0.02 && seen.size() == exact.size();

  const auto fit = fit_india("odisha2019_1.json", 2000, 10, 1002);
  const bool odisha_ok = within(fit.seats, {114, 23, 10}, 6);
  return {toy_ok && odisha_ok, fmt("toy max |freq - exact| %.4f <= 0.02; ", worst) + "Odisha " +
                                   fmt_vec(fit.seats) + " vs (114, 23, 10) +/-6" + fmt(", %.0f s", fit.seconds)};
}

// Not a gated criterion: simulations until the first acceptance, paired seeds.
void report_efficiency() {
  const ElectorateSpec spec = equal_spec(100, 100'000, {0.5, 0.4, 0.1});
  const PriorSpec prior = default_prior(ModelKind::DPM, 3);
  const std::vector<std::string> names{"gamma"};
  const auto sim = make_simulator(spec, DpmParams{}, names);
  ABCConfig cfg;
  cfg.explore_budget = 30;
  cfg.seed_count = 5;
  cfg.exploit_budget = 10;
  cfg.acceptance_eps = 0.03;
  cfg.target_accepted = 5;
  cfg.max_rounds = 20;
  cfg.replicas_per_candidate = 3;
  cfg.jobs = kJobs;
  ABCConfig reject = cfg;
  reject.explore_budget = 400;
  std::int64_t ee = 0, rj = 0;
  for (int t = 0; t < 5; ++t) {
    const std::uint64_t seed = derive_seed(1101, static_cast<std::uint64_t>(t));
    const SummaryStats observed = summarize(simulate(spec, DpmParams{{0.9}}, seed), spec);
    ee += abc_explore_exploit(sim, observed, prior, cfg, seed).evaluations_used;
    rj += abc_reject(sim, observed, prior, reject, seed).evaluations_used;
  }
  std::printf("[INFO] explore-exploit vs rejection, simulations for 5 acceptances over 5 trials: %lld vs %lld\n",
              static_cast<long long>(ee), static_cast<long long>(rj));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"DM table row", c1_dm},
      {"DPM table rows", c2_dpm},
      {"ECM table row", c3_ecm},
      {"PCM table rows", c4_pcm},
      {"SIM polarized individual variant", c5_sim},
      {"Delhi 2015 PCM calibration", c6_delhi},
      {"US 2016 PCM modal seats", c7_us},
      {"DPM self-calibration", c8_self_calibration},
      {"randomized invariants", c9_invariants},
      {"DM toy oracle and Odisha calibration", c10_toy_and_odisha},
  };
  std::set<int> only;
  bool info = argc == 1;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "info")
      info = true;
    else
      only.insert(std::stoi(argv[i]));
  }

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(n)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", n, criteria[i].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !v.pass;
  }
  if (info) report_efficiency();
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
