#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "elect/io.hpp"

using namespace elect;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("electsim_test_" + name); }

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IOError;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("equal votes tie toward the first party") {
  const auto e = parse_observed("district,party,votes\nd1,X,5\nd1,Y,5\nd2,X,5\nd2,Y,5\n", "tie");
  CHECK(e.spec.popularity == std::vector<double>{0.5, 0.5});
  CHECK(decide_outcome(e.tally, e.spec).seats == std::vector<Count>{2, 0});
}

TEST_CASE("parties are ranked by total votes and missing pairs count as zero") {
  const auto e = parse_observed("district,party,votes\na,Small,1\na,Big,10\nb,Mid,4\nb,Big,3\n", "rank");
  CHECK(e.parties == std::vector<std::string>{"Big", "Mid", "Small"});
  CHECK(e.tally.at(1, 2) == 0);
  CHECK(e.spec.district_sizes == std::vector<Count>{11, 7});
  const double sum = std::accumulate(e.spec.popularity.begin(), e.spec.popularity.end(), 0.0);
  CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("dropping minor parties renormalizes popularity") {
  const auto e = parse_observed("district,party,votes\na,P,50\na,Q,30\na,R,20\n", "trunc", {2});
  CHECK(e.parties.size() == 2);
  CHECK(e.spec.num_electors == 80);
  CHECK(e.spec.popularity[0] == doctest::Approx(0.625));
}

TEST_CASE("malformed inputs") {
  CHECK(code_of([] { parse_observed("district,party,votes\na,P,-3\na,Q,1\n", "neg"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_observed("district,party,votes\na,P,x\n", "nan"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_observed("district,party,votes\na,P\n", "short"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_observed("d,p,v\na,P,1\na,Q,2\n", "hdr"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_observed("district,party,votes\na,P,1\na,P,2\n", "dup"); }) == ErrorCode::DuplicatePair);
  CHECK(code_of([] { parse_observed("", "empty"); }) == ErrorCode::EmptyFile);
  CHECK(code_of([] { parse_observed("district,party,votes\n", "header"); }) == ErrorCode::EmptyFile);
  CHECK(code_of([] { parse_observed("district,party,votes\na,P,1\nb,P,2\n", "one"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { load_observed("/nonexistent/file.csv"); }) == ErrorCode::IOError);
}

TEST_CASE("US fixtures") {
  const auto e2020 = load_observed(fs::path(ELECT_DATA_DIR) / "us2020.csv");
  CHECK(e2020.spec.num_districts == 56);
  CHECK(e2020.spec.num_parties == 2);
  CHECK(e2020.parties[0] == "D");
  CHECK(e2020.spec.popularity[0] == doctest::Approx(0.52).epsilon(0.01));
  CHECK(decide_outcome(e2020.tally, e2020.spec).seats == std::vector<Count>{28, 28});

  const auto e2016 = load_observed(fs::path(ELECT_DATA_DIR) / "us2016.csv");
  CHECK(e2016.spec.popularity[0] == doctest::Approx(0.51).epsilon(0.01));
  CHECK(decide_outcome(e2016.tally, e2016.spec).seats == std::vector<Count>{22, 34});
  CHECK_FALSE(e2016.spec.equal_districts());

  const auto small = rescale(e2016, 100.0);
  CHECK(small.spec.num_electors == doctest::Approx(e2016.spec.num_electors / 100.0).epsilon(0.001));
  CHECK(decide_outcome(small.tally, small.spec).seats == std::vector<Count>{22, 34});
}

TEST_CASE("published aggregates") {
  const auto d = load_observed_summary(fs::path(ELECT_DATA_DIR) / "delhi2015.json");
  CHECK(d.spec.num_districts == 70);
  CHECK(d.stats.seat_share[0] == doctest::Approx(67.0 / 70));
  CHECK(d.stats.seat_share[2] == 0.0);
  CHECK(d.stats.margin_mean == doctest::Approx(0.55));
  CHECK(d.stats.margin_std == doctest::Approx(0.07));
  const auto o = load_observed_summary(fs::path(ELECT_DATA_DIR) / "odisha2019_1.json");
  CHECK_FALSE(o.known[2]);
  CHECK_FALSE(o.known[3]);
}

TEST_CASE("observed round trip") {
  const auto e = load_observed(fs::path(ELECT_DATA_DIR) / "us2016.csv");
  const auto path = temp_path("observed.csv");
  write_observed(e, path);
  const auto back = load_observed(path);
  CHECK(back.spec.num_districts == e.spec.num_districts);
  CHECK(back.spec.num_parties == e.spec.num_parties);
  CHECK(back.spec.district_sizes == e.spec.district_sizes);
  CHECK(back.spec.party_vote_totals == e.spec.party_vote_totals);
  fs::remove(path);
}

TEST_CASE("run records round trip") {
  const ElectorateSpec spec = validate_spec({5, 3, 500, {}, {}, {0.5, 0.3, 0.2}});
  std::vector<RunRecord> records;
  const std::vector<ModelParams> params{DmParams{}, DpmParams{{0.85}}, EcmParams{}, PcmParams{{0.1, 0.2, 0.3}}};
  for (int i = 0; i < 1000; ++i) {
    const auto& p = params[static_cast<std::size_t>(i) % params.size()];
    const auto seed = static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL;
    records.push_back(make_run_record(p, seed, spec, simulate(spec, p, seed), 0.001 * i));
  }
  const auto path = temp_path("runs.jsonl");
  write_runs(records, path);
  CHECK(read_runs(path) == records);

  append_runs({records.front()}, path);
  CHECK(read_runs(path).size() == 1001);

  write_runs({}, path);
  CHECK(read_runs(path).empty());
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1);
  fs::remove(path);
}

TEST_CASE("records replay") {
  const ElectorateSpec spec = validate_spec({8, 3, 4000, {}, {}, {0.5, 0.3, 0.2}});
  const ModelParams p = PcmParams{{0.9, 0.5, 0.7}};
  const auto r = make_run_record(p, 77, spec, simulate(spec, p, 77), 0.0);
  const auto back = params_from_json(parse_model(r.model), r.params, spec.num_parties);
  CHECK(decide_outcome(simulate(spec, back, r.seed), spec).seats == r.seats);
  CHECK(r.spec_digest == spec_digest(spec));
}

TEST_CASE("future schema version is refused") {
  const auto path = temp_path("future.jsonl");
  std::ofstream(path) << R"({"format":"electsim-runs","schema_version":2})" << '\n';
  CHECK(code_of([&] { read_runs(path); }) == ErrorCode::SchemaVersionMismatch);
  fs::remove(path);
}

TEST_CASE("configuration parsing rejects unknown keys") {
  CHECK(code_of([] { electorate_from_json(Json{{"num_district", 3}}); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { params_from_json(ModelKind::PCM, Json{{"etta", {0.5}}}, 2); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { calibration_from_json(Json{{"explore", 3}}); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { prior_from_json(Json{{"parameters", {{{"name", "x"}, {"lo", 1}, {"hi", 0}}}}}); }) ==
        ErrorCode::ConfigError);
}

TEST_CASE("parameter JSON round trip") {
  SimParams sim;
  sim.community_proportions = {0.6, 0.4};
  sim.num_communities = 2;
  sim.affinity = {{1, 0}, {0, 1}};
  sim.kappa = 0.4;
  sim.local_influence = true;
  const std::vector<ModelParams> all{DmParams{2.0}, DpmParams{{0.1, 0.2}, Weighting::Count}, EcmParams{30, 0.21},
                                     PcmParams{{0.74, 0.89}}, sim};
  for (const auto& p : all) {
    const Json j = params_to_json(p);
    CHECK(params_to_json(params_from_json(kind_of(p), j, 2)) == j);
  }
}

TEST_CASE("sweep expansion") {
  const Json j = read_json(fs::path(ELECT_CONFIG_DIR) / "pcm_sweep.json");
  const auto cells = expand_sweep(sweep_from_json(j));
  CHECK(cells.size() == 24);
  CHECK(std::get<PcmParams>(cells[0].params).eta == std::vector<double>{0.99, 0.5, 0.5});
  CHECK(cells[1].spec.popularity[0] == doctest::Approx(0.4));

  Json bad = Json::parse(R"({"model":"dpm","electorate":{"num_districts":10,"num_electors":100,"popularity":[0.5,0.5]},
                            "grid":{"gamma":[0.5,1.5]},"replicas":2})");
  CHECK(code_of([&] { expand_sweep(sweep_from_json(bad)); }) == ErrorCode::InvalidParameter);
}

}
