// electsim: simulate, sweep and calibrate election models from the shell.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>

#include "CLI11.hpp"
#include "elect/abc.hpp"
#include "elect/io.hpp"
#include "elect/parallel.hpp"

using namespace elect;

namespace {

int default_jobs() {
  if (const char* env = std::getenv("ELECTSIM_JOBS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

bool g_timing = true;

std::vector<RunRecord> run_replicas(const ElectorateSpec& spec, const ModelParams& params, std::uint64_t base_seed,
                                    int replicas, int jobs) {
  std::vector<RunRecord> out(static_cast<std::size_t>(replicas));
  parallel_for(out.size(), jobs, [&](std::size_t r) {
    const std::uint64_t seed = base_seed + r;
    const auto t0 = std::chrono::steady_clock::now();
    const TallyMatrix tally = simulate(spec, params, seed);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out[r] = make_run_record(params, seed, spec, tally, g_timing ? dt : 0.0);
  });
  return out;
}

struct SeatSummary {
  std::vector<double> mean, sd;
  std::vector<Count> min, max;
  double margin_mean = 0.0, margin_std = 0.0;
};

SeatSummary aggregate(const std::vector<RunRecord>& runs) {
  const std::size_t K = runs.front().seats.size();
  SeatSummary a;
  a.mean.assign(K, 0.0);
  a.sd.assign(K, 0.0);
  a.min.assign(K, std::numeric_limits<Count>::max());
  a.max.assign(K, std::numeric_limits<Count>::min());
  const double n = static_cast<double>(runs.size());
  for (const auto& r : runs) {
    for (std::size_t k = 0; k < K; ++k) {
      a.mean[k] += static_cast<double>(r.seats[k]) / n;
      a.min[k] = std::min(a.min[k], r.seats[k]);
      a.max[k] = std::max(a.max[k], r.seats[k]);
    }
    a.margin_mean += r.stats.margin_mean / n;
    a.margin_std += r.stats.margin_std / n;
  }
  for (const auto& r : runs)
    for (std::size_t k = 0; k < K; ++k) a.sd[k] += std::pow(static_cast<double>(r.seats[k]) - a.mean[k], 2) / n;
  for (double& v : a.sd) v = std::sqrt(v);
  return a;
}

void print_table(const SeatSummary& a, const std::vector<std::string>& parties) {
  std::printf("%-10s %12s %6s %6s\n", "party", "seats", "min", "max");
  for (std::size_t k = 0; k < a.mean.size(); ++k) {
    char cell[32];
    std::snprintf(cell, sizeof cell, "%.0f±%.0f", a.mean[k], a.sd[k]);
    std::printf("%-10s %12s %6lld %6lld\n", parties[k].c_str(), cell, static_cast<long long>(a.min[k]),
                static_cast<long long>(a.max[k]));
  }
  std::printf("MWM %.4f  SWM %.4f\n", a.margin_mean, a.margin_std);
}

std::vector<std::string> default_party_names(std::size_t K) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < K; ++k) names.push_back(std::string(1, static_cast<char>('A' + k % 26)));
  return names;
}

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',') c = '|';
  return s;
}

// ---------------------------------------------------------------- commands

struct SimulateArgs {
  std::string model, config, out;
  int replicas = 1;
  std::uint64_t seed = 1;
};

int cmd_simulate(const SimulateArgs& a, int jobs) {
  const Json cfg = read_json(a.config);
  for (const auto& [key, value] : cfg.items())
    if (key != "electorate" && key != "params")
      throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' in " + a.config);
  const ElectorateSpec spec = validate_spec(electorate_from_json(cfg.at("electorate")));
  const ModelParams params =
      params_from_json(parse_model(a.model), cfg.value("params", Json::object()), spec.num_parties);
  validate_params(params, spec);
  if (a.replicas < 1) throw Error(ErrorCode::ConfigError, "--replicas must be at least 1");

  const auto runs = run_replicas(spec, params, a.seed, a.replicas, jobs);
  write_runs(runs, a.out);
  std::printf("%s, %d replicas, seeds %llu..%llu\n", a.model.c_str(), a.replicas,
              static_cast<unsigned long long>(a.seed), static_cast<unsigned long long>(a.seed + a.replicas - 1));
  print_table(aggregate(runs), default_party_names(spec.num_parties));
  return 0;
}

struct SweepArgs {
  std::string sweep, out, runs;
};

int cmd_sweep(const SweepArgs& a, int jobs) {
  const SweepSpec sweep = sweep_from_json(read_json(a.sweep));
  const std::vector<SweepCell> cells = expand_sweep(sweep);
  const std::string runs_path = a.runs.empty() ? a.out + ".runs.jsonl" : a.runs;

  std::ofstream out(a.out);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + a.out);
  const std::size_t K = cells.front().spec.num_parties;
  out << "cell,setting";
  for (std::size_t k = 0; k < K; ++k) out << ",mean_" << k << ",min_" << k << ",max_" << k;
  out << ",margin_mean,margin_std\n";
  write_runs({}, runs_path);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto runs = run_replicas(cells[c].spec, cells[c].params, sweep.seed, sweep.replicas, jobs);
    append_runs(runs, runs_path);
    const SeatSummary s = aggregate(runs);
    out << c << ',' << csv_safe(cells[c].label);
    char buf[64];
    for (std::size_t k = 0; k < K; ++k) {
      std::snprintf(buf, sizeof buf, ",%.2f,%lld,%lld", s.mean[k], static_cast<long long>(s.min[k]),
                    static_cast<long long>(s.max[k]));
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.4f,%.4f\n", s.margin_mean, s.margin_std);
    out << buf;
    out.flush();
    std::printf("[%zu] %s ->", c, cells[c].label.c_str());
    for (std::size_t k = 0; k < K; ++k) std::printf(" %.1f", s.mean[k]);
    std::printf("\n");
    std::fflush(stdout);
  }
  return 0;
}

struct CalibrateArgs {
  std::string model, observed, prior, abc, out;
  std::uint64_t seed = 1;
  std::size_t parties = 0;
};

int cmd_calibrate(const CalibrateArgs& a, int jobs) {
  const ModelKind kind = parse_model(a.model);
  CalibrationSettings settings = calibration_from_json(read_json(a.abc));
  if (settings.abc.jobs <= 1) settings.abc.jobs = jobs;

  ObservedSummary observed;
  std::vector<std::string> parties;
  ElectorateSpec sim_spec;
  const bool csv = std::filesystem::path(a.observed).extension() == ".csv";
  if (csv) {
    const ObservedElection election = load_observed(a.observed, {a.parties});
    observed = summary_of(election);
    parties = election.parties;
    sim_spec = election.spec;
    if (settings.electors_per_district > 0) {
      const double factor = static_cast<double>(election.spec.num_electors) /
                            static_cast<double>(settings.electors_per_district * static_cast<Count>(election.spec.num_districts));
      sim_spec = rescale(election, factor).spec;
    }
  } else {
    observed = load_observed_summary(a.observed);
    parties = default_party_names(observed.spec.num_parties);
    sim_spec = observed.spec;
    if (settings.electors_per_district > 0) {
      ElectorateSpec s;
      s.num_districts = observed.spec.num_districts;
      s.num_electors = settings.electors_per_district * static_cast<Count>(s.num_districts);
      s.popularity = observed.spec.popularity;
      sim_spec = validate_spec(s);
    }
  }
  for (std::size_t f = 0; f < 4; ++f)
    if (!observed.known[f]) settings.abc.distance_weights[f] = 0.0;

  const PriorSpec prior = a.prior.empty() ? default_prior(kind, sim_spec.num_parties) : prior_from_json(read_json(a.prior));
  const ModelParams base = params_from_json(kind, settings.params, sim_spec.num_parties);
  std::vector<std::string> names;
  for (const auto& p : prior.parameters) names.push_back(p.name);
  const SummarySimulator sim = make_simulator(sim_spec, base, names);

  const CalibrationResult result = abc_explore_exploit(sim, observed.stats, prior, settings.abc, a.seed);
  const ModelParams best = apply_parameters(base, names, result.psi_opt.psi, sim_spec);

  const bool heterogeneous = !sim_spec.equal_districts();
  const int report_runs = settings.report_runs > 0 ? settings.report_runs : (heterogeneous ? 10 : 100);
  const std::uint64_t report_seed = derive_seed(a.seed, 4);
  const auto runs = run_replicas(sim_spec, best, report_seed, report_runs, jobs);
  write_runs(runs, a.out + ".runs.jsonl");
  const SeatSummary agg = aggregate(runs);
  std::vector<double> simulated(agg.mean);
  std::string statistic = "mean";
  if (heterogeneous) {
    statistic = "mode";
    std::vector<std::vector<Count>> seats;
    for (const auto& r : runs) seats.push_back(r.seats);
    const auto mode = modal_seats(seats);
    simulated.assign(mode.begin(), mode.end());
  }

  Json accepted = Json::array();
  for (const auto& c : result.accepted) accepted.push_back({{"psi", c.psi}, {"distance", c.distance}});
  std::vector<double> observed_seats;
  for (double s : observed.stats.seat_share) observed_seats.push_back(std::round(s * static_cast<double>(sim_spec.num_districts)));
  Json report{{"model", a.model},
              {"observed_name", observed.name},
              {"names", names},
              {"psi_opt", result.psi_opt.psi},
              {"psi_opt_distance", result.psi_opt.distance},
              {"converged", result.converged},
              {"evaluations_used", result.evaluations_used},
              {"candidates_evaluated", result.candidates_evaluated},
              {"best_history", result.best_history},
              {"accepted", accepted},
              {"params", params_to_json(best)},
              {"report",
               {{"runs", report_runs},
                {"statistic", statistic},
                {"observed", {{"seats", observed_seats},
                              {"margin_mean", observed.known[2] ? Json(observed.stats.margin_mean) : Json()},
                              {"margin_std", observed.known[3] ? Json(observed.stats.margin_std) : Json()}}},
                {"simulated", {{"seats", simulated}, {"margin_mean", agg.margin_mean}, {"margin_std", agg.margin_std}}}}}};
  std::ofstream(a.out) << report.dump(2) << '\n';

  std::printf("%s calibrated to %s: %s after %lld simulations\n", a.model.c_str(), observed.name.c_str(),
              result.converged ? "accepted" : "no candidate within eps, best seen", static_cast<long long>(result.evaluations_used));
  std::printf("psi_opt:");
  for (std::size_t i = 0; i < names.size(); ++i) std::printf(" %s=%.4f", names[i].c_str(), result.psi_opt.psi[i]);
  std::printf("  (distance %.4f)\n", result.psi_opt.distance);
  std::printf("%-10s %10s %10s\n", "", "observed", statistic == "mode" ? "sim(mode)" : "sim(mean)");
  for (std::size_t k = 0; k < parties.size(); ++k)
    std::printf("%-10s %10.0f %10.1f\n", parties[k].c_str(), observed_seats[k], simulated[k]);
  auto fmt = [](bool known, double v) {
    char b[16];
    if (known) std::snprintf(b, sizeof b, "%.4f", v);
    else std::snprintf(b, sizeof b, "NA");
    return std::string(b);
  };
  std::printf("%-10s %10s %10.4f\n", "MWM", fmt(observed.known[2], observed.stats.margin_mean).c_str(), agg.margin_mean);
  std::printf("%-10s %10s %10.4f\n", "SWM", fmt(observed.known[3], observed.stats.margin_std).c_str(), agg.margin_std);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based election simulation and ABC calibration"};
  app.require_subcommand(1);
  int jobs = default_jobs();
  app.add_option("--jobs", jobs, "Worker threads (default: $ELECTSIM_JOBS or 1)")->check(CLI::PositiveNumber);
  bool no_timing = false;
  app.add_flag("--no-timing", no_timing, "Record wall time as 0 so repeated runs are byte-identical");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run replicas of one model");
  s->add_option("--model", sim.model, "dm|dpm|ecm|pcm|sim")->required();
  s->add_option("--config", sim.config, "Electorate and parameters (JSON)")->required();
  s->add_option("--replicas", sim.replicas, "Number of runs; replica r uses seed+r");
  s->add_option("--seed", sim.seed, "Base seed");
  s->add_option("--out", sim.out, "Run records (JSON lines)")->required();
  s->add_option("--jobs", jobs, "Worker threads");

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Run a parameter grid");
  w->add_option("--sweep", sw.sweep, "Sweep definition (JSON)")->required();
  w->add_option("--out", sw.out, "Aggregate table (CSV)")->required();
  w->add_option("--runs", sw.runs, "Run records (default: OUT.runs.jsonl)");
  w->add_option("--jobs", jobs, "Worker threads");

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "Fit a model to an observed election");
  c->add_option("--model", cal.model, "dm|dpm|ecm|pcm|sim")->required();
  c->add_option("--observed", cal.observed, "Results (.csv) or published aggregates (.json)")->required();
  c->add_option("--prior", cal.prior, "Prior ranges (JSON); default ranges when omitted");
  c->add_option("--abc", cal.abc, "ABC settings (JSON)")->required();
  c->add_option("--seed", cal.seed, "Seed");
  c->add_option("--out", cal.out, "Calibration result (JSON)")->required();
  c->add_option("--parties", cal.parties, "Keep only the K largest parties");
  c->add_option("--jobs", jobs, "Worker threads");

  CLI11_PARSE(app, argc, argv);
  g_timing = !no_timing;
  try {
    if (s->parsed()) return cmd_simulate(sim, jobs);
    if (w->parsed()) return cmd_sweep(sw, jobs);
    return cmd_calibrate(cal, jobs);
  } catch (const Error& e) {
    std::fprintf(stderr, "electsim: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "electsim: %s\n", e.what());
    return 1;
  }
}
