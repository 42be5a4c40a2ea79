#include "elect/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace elect {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream out(path, std::ios::out | mode);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path.string());
  return out;
}

double round4(double x) { return std::round(x * 1e4) / 1e4; }

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' in " + std::string(where));
  }
}

template <class T>
T get(const Json& j, const char* key, std::string_view where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string(where) + "." + key + ": " + e.what());
  }
}

template <class T>
void maybe(const Json& j, const char* key, T& out, std::string_view where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

}  // namespace

// ---------------------------------------------------------------- observed

ObservedElection parse_observed(std::string_view text, const std::string& name, const LoadOptions& options) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= text.size();) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = trim(text.substr(pos, end - pos));
    if (!line.empty()) lines.push_back(line);
    pos = end + 1;
  }
  if (lines.empty() || (lines.size() == 1 && lines[0] == "district,party,votes"))
    throw Error(ErrorCode::EmptyFile, name + " has no result rows");
  if (lines[0] != "district,party,votes")
    throw Error(ErrorCode::ParseError, name + ": header must be 'district,party,votes'");

  std::vector<std::string> districts, parties;
  std::map<std::string, std::size_t, std::less<>> district_index, party_index;
  std::map<std::pair<std::size_t, std::size_t>, Count> cells;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
      throw Error(ErrorCode::ParseError, name + " line " + std::to_string(ln + 1) + ": expected three fields");
    const auto district = trim(line.substr(0, c1));
    const auto party = trim(line.substr(c1 + 1, c2 - c1 - 1));
    const auto votes_text = trim(line.substr(c2 + 1));
    Count votes = -1;
    const auto [ptr, ec] = std::from_chars(votes_text.data(), votes_text.data() + votes_text.size(), votes);
    if (district.empty() || party.empty() || ec != std::errc{} || ptr != votes_text.data() + votes_text.size() ||
        votes < 0)
      throw Error(ErrorCode::ParseError, name + " line " + std::to_string(ln + 1) + ": malformed row");

    auto d = district_index.find(district);
    if (d == district_index.end()) {
      d = district_index.emplace(std::string(district), districts.size()).first;
      districts.emplace_back(district);
    }
    auto p = party_index.find(party);
    if (p == party_index.end()) {
      p = party_index.emplace(std::string(party), parties.size()).first;
      parties.emplace_back(party);
    }
    if (!cells.emplace(std::pair{d->second, p->second}, votes).second)
      throw Error(ErrorCode::DuplicatePair,
                  name + ": (" + std::string(district) + ", " + std::string(party) + ") appears twice");
  }
  if (parties.size() < 2) throw Error(ErrorCode::ParseError, name + ": need at least two parties");

  std::vector<Count> totals(parties.size(), 0);
  for (const auto& [key, v] : cells) totals[key.second] += v;
  std::vector<std::size_t> order(parties.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return totals[a] > totals[b]; });
  if (options.max_parties >= 2 && order.size() > options.max_parties) order.resize(options.max_parties);

  std::vector<std::size_t> rank(parties.size(), static_cast<std::size_t>(-1));
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

  ObservedElection out;
  out.name = name;
  out.districts = districts;
  for (std::size_t r : order) out.parties.push_back(parties[r]);
  out.tally = TallyMatrix(districts.size(), order.size());
  for (const auto& [key, v] : cells)
    if (rank[key.second] != static_cast<std::size_t>(-1)) out.tally.at(key.first, rank[key.second]) = v;

  for (std::size_t s = 0; s < districts.size(); ++s) out.spec.district_sizes.push_back(out.tally.row_sum(s));
  for (std::size_t k = 0; k < order.size(); ++k) out.spec.party_vote_totals.push_back(out.tally.column_sum(k));
  out.spec = validate_spec(out.spec);
  out.stats = summarize(out.tally, out.spec);
  return out;
}

ObservedElection load_observed(const std::filesystem::path& path, const LoadOptions& options) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::IOError, path.string() + " does not exist");
  return parse_observed(read_file(path), path.stem().string(), options);
}

void write_observed(const ObservedElection& election, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "district,party,votes\n";
  for (std::size_t s = 0; s < election.districts.size(); ++s)
    for (std::size_t k = 0; k < election.parties.size(); ++k)
      out << election.districts[s] << ',' << election.parties[k] << ',' << election.tally.at(s, k) << '\n';
}

ObservedElection rescale(const ObservedElection& election, double factor) {
  if (!(factor > 0.0)) throw Error(ErrorCode::InvalidParameter, "rescale factor must be positive");
  ObservedElection out = election;
  ElectorateSpec spec;
  for (std::size_t s = 0; s < out.tally.districts(); ++s) {
    for (std::size_t k = 0; k < out.tally.parties(); ++k)
      out.tally.at(s, k) = std::llround(static_cast<double>(election.tally.at(s, k)) / factor);
    spec.district_sizes.push_back(out.tally.row_sum(s));
  }
  for (std::size_t k = 0; k < out.tally.parties(); ++k) spec.party_vote_totals.push_back(out.tally.column_sum(k));
  out.spec = validate_spec(spec);
  out.stats = summarize(out.tally, out.spec);
  return out;
}

ObservedSummary summary_of(const ObservedElection& election) {
  return {election.name, election.spec, election.stats, {true, true, true, true}};
}

ObservedSummary load_observed_summary(const std::filesystem::path& path) {
  const Json j = read_json(path);
  constexpr std::string_view where = "observed summary";
  check_keys(j, {"name", "num_districts", "num_electors", "popularity", "seats", "mean_vote_fraction",
                 "margin_mean", "margin_std"},
             where);
  ObservedSummary out;
  out.name = j.value("name", path.stem().string());
  out.spec.num_districts = get<std::size_t>(j, "num_districts", where);
  out.spec.num_electors = get<Count>(j, "num_electors", where);
  out.spec.popularity = get<std::vector<double>>(j, "popularity", where);
  out.spec = validate_spec(out.spec);

  const auto seats = get<std::vector<Count>>(j, "seats", where);
  if (seats.size() != out.spec.num_parties)
    throw Error(ErrorCode::DimensionMismatch, "seats and popularity differ in length");
  if (std::accumulate(seats.begin(), seats.end(), Count{0}) != static_cast<Count>(out.spec.num_districts))
    throw Error(ErrorCode::SizeMismatch, "seats must sum to num_districts");
  for (Count m : seats) out.stats.seat_share.push_back(static_cast<double>(m) / static_cast<double>(out.spec.num_districts));
  // District-averaged vote fractions equal popularity when districts are equal.
  out.stats.mean_vote_fraction = out.spec.popularity;
  maybe(j, "mean_vote_fraction", out.stats.mean_vote_fraction, where);
  out.known[2] = j.contains("margin_mean") && !j["margin_mean"].is_null();
  out.known[3] = j.contains("margin_std") && !j["margin_std"].is_null();
  if (out.known[2]) out.stats.margin_mean = get<double>(j, "margin_mean", where);
  if (out.known[3]) out.stats.margin_std = get<double>(j, "margin_std", where);
  return out;
}

// ---------------------------------------------------------------- runs

RunRecord make_run_record(const ModelParams& params, std::uint64_t seed, const ElectorateSpec& spec,
                          const TallyMatrix& tally, double wall_time) {
  RunRecord r;
  r.model = std::string(model_name(kind_of(params)));
  r.params = params_to_json(params);
  r.seed = seed;
  r.spec_digest = spec_digest(spec);
  r.seats = decide_outcome(tally, spec).seats;
  r.stats = summarize(tally, spec);
  r.stats.margin_mean = round4(r.stats.margin_mean);
  r.stats.margin_std = round4(r.stats.margin_std);
  r.wall_time = wall_time;
  return r;
}

Json record_to_json(const RunRecord& r) {
  return Json{{"model", r.model},
              {"params", r.params},
              {"seed", r.seed},
              {"spec_digest", r.spec_digest},
              {"seats", r.seats},
              {"stats",
               {{"seat_share", r.stats.seat_share},
                {"mean_vote_fraction", r.stats.mean_vote_fraction},
                {"margin_mean", round4(r.stats.margin_mean)},
                {"margin_std", round4(r.stats.margin_std)}}},
              {"wall_time", r.wall_time}};
}

RunRecord record_from_json(const Json& j) {
  constexpr std::string_view where = "run record";
  check_keys(j, {"model", "params", "seed", "spec_digest", "seats", "stats", "wall_time"}, where);
  RunRecord r;
  r.model = get<std::string>(j, "model", where);
  r.params = j.at("params");
  r.seed = get<std::uint64_t>(j, "seed", where);
  r.spec_digest = get<std::string>(j, "spec_digest", where);
  r.seats = get<std::vector<Count>>(j, "seats", where);
  const Json& st = j.at("stats");
  check_keys(st, {"seat_share", "mean_vote_fraction", "margin_mean", "margin_std"}, "stats");
  r.stats.seat_share = get<std::vector<double>>(st, "seat_share", "stats");
  r.stats.mean_vote_fraction = get<std::vector<double>>(st, "mean_vote_fraction", "stats");
  r.stats.margin_mean = get<double>(st, "margin_mean", "stats");
  r.stats.margin_std = get<double>(st, "margin_std", "stats");
  r.wall_time = get<double>(j, "wall_time", where);
  return r;
}

namespace {

Json run_header() { return Json{{"format", "electsim-runs"}, {"schema_version", kRunSchemaVersion}}; }

}  // namespace

void write_runs(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  {
    auto out = open_out(path);
    out << run_header().dump() << '\n';
  }
  append_runs(records, path);
}

void append_runs(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    write_runs(records, path);
    return;
  }
  auto out = open_out(path, std::ios::app);
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
  if (!out) throw Error(ErrorCode::IOError, "write to " + path.string() + " failed");
}

std::vector<RunRecord> read_runs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::EmptyFile, path.string() + " has no header line");
  Json header;
  try {
    header = Json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::ParseError, path.string() + ": header is not JSON");
  }
  if (!header.is_object() || header.value("format", "") != "electsim-runs" || !header.contains("schema_version"))
    throw Error(ErrorCode::ParseError, path.string() + ": not a run file");
  const int version = header["schema_version"].get<int>();
  if (version != kRunSchemaVersion)
    throw Error(ErrorCode::SchemaVersionMismatch, path.string() + " has schema version " + std::to_string(version) +
                                                      ", expected " + std::to_string(kRunSchemaVersion));
  std::vector<RunRecord> out;
  for (std::size_t ln = 2; std::getline(in, line); ++ln) {
    if (trim(line).empty()) continue;
    try {
      out.push_back(record_from_json(Json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(ln) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------- config

Json read_json(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::IOError, path.string() + " does not exist");
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

ElectorateSpec electorate_from_json(const Json& j) {
  constexpr std::string_view where = "electorate";
  check_keys(j, {"num_districts", "num_parties", "num_electors", "district_sizes", "party_vote_totals", "popularity"},
             where);
  ElectorateSpec spec;
  maybe(j, "num_districts", spec.num_districts, where);
  maybe(j, "num_parties", spec.num_parties, where);
  maybe(j, "num_electors", spec.num_electors, where);
  maybe(j, "district_sizes", spec.district_sizes, where);
  maybe(j, "party_vote_totals", spec.party_vote_totals, where);
  maybe(j, "popularity", spec.popularity, where);
  return spec;
}

Json electorate_to_json(const ElectorateSpec& spec) {
  Json j{{"num_districts", spec.num_districts},
         {"num_parties", spec.num_parties},
         {"num_electors", spec.num_electors},
         {"popularity", spec.popularity}};
  if (!spec.equal_districts()) j["district_sizes"] = spec.district_sizes;
  if (spec.has_vote_totals()) j["party_vote_totals"] = spec.party_vote_totals;
  return j;
}

ModelParams params_from_json(ModelKind kind, const Json& j, std::size_t num_parties) {
  ModelParams params = default_params(kind, num_parties);
  const std::string where = "params for " + std::string(model_name(kind));
  auto weighting = [&](Weighting& w) {
    if (j.contains("weighting")) w = parse_weighting(get<std::string>(j, "weighting", where));
  };
  std::visit(
      [&](auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DmParams>) {
          check_keys(j, {"concentration"}, where);
          maybe(j, "concentration", p.concentration, where);
        } else if constexpr (std::is_same_v<P, DpmParams>) {
          check_keys(j, {"gamma", "weighting"}, where);
          if (j.contains("gamma"))
            p.gamma = j["gamma"].is_array() ? get<std::vector<double>>(j, "gamma", where)
                                            : std::vector<double>{get<double>(j, "gamma", where)};
          weighting(p.weighting);
        } else if constexpr (std::is_same_v<P, EcmParams>) {
          check_keys(j, {"alpha", "beta", "weighting"}, where);
          maybe(j, "alpha", p.alpha, where);
          maybe(j, "beta", p.beta, where);
          weighting(p.weighting);
        } else if constexpr (std::is_same_v<P, PcmParams>) {
          check_keys(j, {"eta", "weighting"}, where);
          maybe(j, "eta", p.eta, where);
          weighting(p.weighting);
        } else {
          check_keys(j, {"num_communities", "community_proportions", "stick_breaking", "affinity", "party_sd",
                         "gamma_shape", "district_mixing", "weighting", "local_influence", "kappa_a", "kappa_b",
                         "kappa", "party_labels"},
                     where);
          maybe(j, "num_communities", p.num_communities, where);
          maybe(j, "community_proportions", p.community_proportions, where);
          if (!j.contains("num_communities") && !p.community_proportions.empty())
            p.num_communities = p.community_proportions.size();
          maybe(j, "stick_breaking", p.stick_breaking, where);
          maybe(j, "affinity", p.affinity, where);
          maybe(j, "party_sd", p.party_sd, where);
          maybe(j, "gamma_shape", p.gamma_shape, where);
          maybe(j, "district_mixing", p.district_mixing, where);
          weighting(p.weighting);
          maybe(j, "local_influence", p.local_influence, where);
          maybe(j, "kappa_a", p.kappa_a, where);
          maybe(j, "kappa_b", p.kappa_b, where);
          if (j.contains("kappa") && !j["kappa"].is_null()) p.kappa = get<double>(j, "kappa", where);
          maybe(j, "party_labels", p.party_labels, where);
        }
      },
      params);
  return params;
}

Json params_to_json(const ModelParams& params) {
  return std::visit(
      [](const auto& p) -> Json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DmParams>) {
          return {{"concentration", p.concentration}};
        } else if constexpr (std::is_same_v<P, DpmParams>) {
          Json g = p.gamma.size() == 1 ? Json(p.gamma[0]) : Json(p.gamma);
          return {{"gamma", g}, {"weighting", weighting_name(p.weighting)}};
        } else if constexpr (std::is_same_v<P, EcmParams>) {
          return {{"alpha", p.alpha}, {"beta", p.beta}, {"weighting", weighting_name(p.weighting)}};
        } else if constexpr (std::is_same_v<P, PcmParams>) {
          return {{"eta", p.eta}, {"weighting", weighting_name(p.weighting)}};
        } else {
          Json j{{"num_communities", p.num_communities},
                 {"stick_breaking", p.stick_breaking},
                 {"gamma_shape", p.gamma_shape},
                 {"district_mixing", p.district_mixing},
                 {"weighting", weighting_name(p.weighting)},
                 {"local_influence", p.local_influence},
                 {"kappa_a", p.kappa_a},
                 {"kappa_b", p.kappa_b}};
          if (!p.community_proportions.empty()) j["community_proportions"] = p.community_proportions;
          if (!p.affinity.empty()) j["affinity"] = p.affinity;
          if (!p.party_sd.empty()) j["party_sd"] = p.party_sd;
          if (p.kappa) j["kappa"] = *p.kappa;
          if (!p.party_labels.empty()) j["party_labels"] = p.party_labels;
          return j;
        }
      },
      params);
}

PriorSpec prior_from_json(const Json& j) {
  check_keys(j, {"parameters"}, "prior");
  PriorSpec prior;
  for (const Json& p : j.at("parameters")) {
    check_keys(p, {"name", "lo", "hi"}, "prior parameter");
    prior.parameters.push_back(
        {get<std::string>(p, "name", "prior"), get<double>(p, "lo", "prior"), get<double>(p, "hi", "prior")});
  }
  prior.validate();
  return prior;
}

CalibrationSettings calibration_from_json(const Json& j) {
  constexpr std::string_view where = "abc";
  check_keys(j, {"explore_budget", "seed_count", "exploit_budget", "perturb_scale", "acceptance_eps",
                 "target_accepted", "max_rounds", "replicas_per_candidate", "distance_weights", "jobs",
                 "electors_per_district", "report_runs", "params"},
             where);
  CalibrationSettings out;
  ABCConfig& c = out.abc;
  maybe(j, "explore_budget", c.explore_budget, where);
  maybe(j, "seed_count", c.seed_count, where);
  maybe(j, "exploit_budget", c.exploit_budget, where);
  maybe(j, "perturb_scale", c.perturb_scale, where);
  maybe(j, "acceptance_eps", c.acceptance_eps, where);
  maybe(j, "target_accepted", c.target_accepted, where);
  maybe(j, "max_rounds", c.max_rounds, where);
  maybe(j, "replicas_per_candidate", c.replicas_per_candidate, where);
  maybe(j, "distance_weights", c.distance_weights, where);
  maybe(j, "jobs", c.jobs, where);
  maybe(j, "electors_per_district", out.electors_per_district, where);
  maybe(j, "report_runs", out.report_runs, where);
  if (j.contains("params")) out.params = j["params"];
  c.validate();
  return out;
}

SweepSpec sweep_from_json(const Json& j) {
  constexpr std::string_view where = "sweep";
  check_keys(j, {"model", "electorate", "params", "grid", "replicas", "seed"}, where);
  SweepSpec s;
  s.model = parse_model(get<std::string>(j, "model", where));
  s.electorate = electorate_from_json(j.at("electorate"));
  if (j.contains("params")) s.params = j["params"];
  maybe(j, "replicas", s.replicas, where);
  maybe(j, "seed", s.seed, where);
  if (s.replicas < 1) throw Error(ErrorCode::ConfigError, "sweep.replicas must be at least 1");
  const Json& grid = j.at("grid");
  if (!grid.is_object() || grid.empty()) throw Error(ErrorCode::ConfigError, "sweep.grid must be a non-empty object");
  for (const auto& [key, values] : grid.items()) {
    if (!values.is_array() || values.empty())
      throw Error(ErrorCode::ConfigError, "sweep.grid." + key + " must be a non-empty list");
    s.grid.emplace_back(key, std::vector<Json>(values.begin(), values.end()));
  }
  return s;
}

std::vector<SweepCell> expand_sweep(const SweepSpec& sweep) {
  std::size_t cells = 1;
  for (const auto& [key, values] : sweep.grid) cells *= values.size();
  std::vector<SweepCell> out;
  out.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    ElectorateSpec spec = sweep.electorate;
    Json params = sweep.params;
    std::string label;
    // Last grid key varies fastest.
    std::size_t rest = c;
    std::vector<std::size_t> pick(sweep.grid.size());
    for (std::size_t g = sweep.grid.size(); g-- > 0;) {
      pick[g] = rest % sweep.grid[g].second.size();
      rest /= sweep.grid[g].second.size();
    }
    for (std::size_t g = 0; g < sweep.grid.size(); ++g) {
      const auto& [key, values] = sweep.grid[g];
      const Json& v = values[pick[g]];
      if (key == "popularity") spec.popularity = v.get<std::vector<double>>();
      else params[key] = v;
      if (!label.empty()) label += ';';
      label += key + '=' + v.dump();
    }
    SweepCell cell{label, validate_spec(spec), DmParams{}};
    cell.params = params_from_json(sweep.model, params, cell.spec.num_parties);
    validate_params(cell.params, cell.spec);
    out.push_back(std::move(cell));
  }
  return out;
}

}  // namespace elect
