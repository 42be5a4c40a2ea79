#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "elect/abc.hpp"
#include "elect/models.hpp"
#include "elect/stats.hpp"
#include "json.hpp"

namespace elect {

using Json = nlohmann::json;

/// Results of a real election, one row per (district, party).
struct ObservedElection {
  std::string name;
  std::vector<std::string> districts;  // first-appearance order
  std::vector<std::string> parties;    // descending total votes
  ElectorateSpec spec;
  TallyMatrix tally;
  SummaryStats stats;
};

struct LoadOptions {
  std::size_t max_parties = 0;  // 0 keeps all; otherwise the rest are dropped
};

/// Reads `district,party,votes` text. Throws ParseError, DuplicatePair,
/// EmptyFile or IOError.
ObservedElection load_observed(const std::filesystem::path& path, const LoadOptions& options = {});
ObservedElection parse_observed(std::string_view text, const std::string& name, const LoadOptions& options = {});
void write_observed(const ObservedElection& election, const std::filesystem::path& path);

/// Same election with every cell divided by `factor` (rounded), so that a
/// national electorate can be simulated at a smaller scale.
ObservedElection rescale(const ObservedElection& election, double factor);

/// Published aggregates of an election when per-district votes are not at
/// hand. Unknown families are flagged so that calibration can ignore them.
struct ObservedSummary {
  std::string name;
  ElectorateSpec spec;
  SummaryStats stats;
  std::array<bool, 4> known{true, true, true, true};
};

ObservedSummary load_observed_summary(const std::filesystem::path& path);
ObservedSummary summary_of(const ObservedElection& election);

struct RunRecord {
  std::string model;
  Json params;
  std::uint64_t seed = 0;
  std::string spec_digest;
  std::vector<Count> seats;
  SummaryStats stats;
  double wall_time = 0.0;

  bool operator==(const RunRecord&) const = default;
};

inline constexpr int kRunSchemaVersion = 1;

/// Builds a record; margins are rounded to 4 decimals as stored on disk.
RunRecord make_run_record(const ModelParams& params, std::uint64_t seed, const ElectorateSpec& spec,
                          const TallyMatrix& tally, double wall_time);

void write_runs(const std::vector<RunRecord>& records, const std::filesystem::path& path);
void append_runs(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::vector<RunRecord> read_runs(const std::filesystem::path& path);

Json record_to_json(const RunRecord& record);
RunRecord record_from_json(const Json& j);

// Structured configuration. Unknown keys raise ConfigError.
Json read_json(const std::filesystem::path& path);
ElectorateSpec electorate_from_json(const Json& j);
Json electorate_to_json(const ElectorateSpec& spec);
ModelParams params_from_json(ModelKind kind, const Json& j, std::size_t num_parties);
Json params_to_json(const ModelParams& params);
PriorSpec prior_from_json(const Json& j);

struct CalibrationSettings {
  ABCConfig abc;
  Count electors_per_district = 0;  // 0 simulates at the observed scale
  int report_runs = 0;              // 0: 10 (mode) if districts differ in size, else 100 (mean)
  Json params = Json::object();     // fixed parameters of the model
};
CalibrationSettings calibration_from_json(const Json& j);

struct SweepSpec {
  ModelKind model = ModelKind::DM;
  ElectorateSpec electorate;
  Json params = Json::object();
  std::vector<std::pair<std::string, std::vector<Json>>> grid;
  int replicas = 100;
  std::uint64_t seed = 1;
};
SweepSpec sweep_from_json(const Json& j);

/// One grid cell: the spec and parameters with the cell's values applied.
struct SweepCell {
  std::string label;
  ElectorateSpec spec;
  ModelParams params;
};
/// Expands and validates every cell before anything runs.
std::vector<SweepCell> expand_sweep(const SweepSpec& sweep);

}  // namespace elect
