#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "elect/error.hpp"
#include "elect/random.hpp"

namespace elect {

using Count = std::int64_t;

/// The fixed electoral setting: district sizes, party totals and popularity.
///
/// A raw spec may leave district_sizes empty (equal sizes are derived from
/// num_districts and num_electors), and may omit either party_vote_totals or
/// popularity; validate_spec() fills in whatever is derivable.
struct ElectorateSpec {
  std::size_t num_districts = 0;
  std::size_t num_parties = 0;
  Count num_electors = 0;
  std::vector<Count> district_sizes;
  std::vector<Count> party_vote_totals;  // empty when unconstrained
  std::vector<double> popularity;

  bool has_vote_totals() const { return !party_vote_totals.empty(); }
  bool equal_districts() const;

  bool operator==(const ElectorateSpec&) const = default;
};

/// Splits `total` into parts proportional to `shares` (largest remainder).
/// Ties on the remainder go to the lower index.
std::vector<Count> apportion(Count total, std::span<const double> shares);

/// floor(N/S) electors per district, the first N mod S districts get one extra.
std::vector<Count> equal_district_sizes(Count electors, std::size_t districts);

ElectorateSpec validate_spec(ElectorateSpec spec);

/// Stable 64-bit digest of a validated spec, rendered as 16 hex digits.
std::string spec_digest(const ElectorateSpec& spec);

/// Votes per district per party, row-major S x K.
class TallyMatrix {
 public:
  TallyMatrix() = default;
  TallyMatrix(std::size_t districts, std::size_t parties)
      : districts_(districts), parties_(parties), votes_(districts * parties, 0) {}

  std::size_t districts() const { return districts_; }
  std::size_t parties() const { return parties_; }

  Count& at(std::size_t s, std::size_t k) { return votes_[s * parties_ + k]; }
  Count at(std::size_t s, std::size_t k) const { return votes_[s * parties_ + k]; }

  std::span<const Count> row(std::size_t s) const {
    return {votes_.data() + s * parties_, parties_};
  }
  std::span<Count> row(std::size_t s) { return {votes_.data() + s * parties_, parties_}; }

  Count row_sum(std::size_t s) const;
  Count column_sum(std::size_t k) const;

  const std::vector<Count>& data() const { return votes_; }

  bool operator==(const TallyMatrix&) const = default;

 private:
  std::size_t districts_ = 0;
  std::size_t parties_ = 0;
  std::vector<Count> votes_;
};

/// Throws RowSumViolation unless every row sums to n_s (and, when the spec
/// constrains party totals and `check_columns` is set, every column to v_k).
void check_tally(const TallyMatrix& tally, const ElectorateSpec& spec, bool check_columns);

struct ElectionOutcome {
  std::vector<std::size_t> winners;  // W_s
  std::vector<double> margins;       // P_s
  std::vector<Count> seats;          // M_k
};

/// Plurality winner per district; ties go to the lowest party index.
ElectionOutcome decide_outcome(const TallyMatrix& tally, const ElectorateSpec& spec);

/// Draws an index with probability proportional to weights[k] * [quota[k] > 0]
/// and decrements the chosen quota. Falls back to a uniform draw over indices
/// with remaining quota when all of them carry zero weight.
std::size_t constrained_sample(std::span<const double> weights, std::span<Count> quotas, Rng& rng);

/// Remaining quota bookkeeping for one simulation run.
struct SamplerState {
  std::vector<Count> remaining_party_votes;
  std::vector<Count> remaining_district_capacity;

  static SamplerState from_spec(const ElectorateSpec& spec);

  std::size_t draw_party(std::span<const double> weights, Rng& rng) {
    return constrained_sample(weights, remaining_party_votes, rng);
  }
  std::size_t draw_district(std::span<const double> weights, Rng& rng) {
    return constrained_sample(weights, remaining_district_capacity, rng);
  }
};

}  // namespace elect
