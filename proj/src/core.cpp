#include "elect/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace elect {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ShareMismatch: return "ShareMismatch";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::RowSumViolation: return "RowSumViolation";
    case ErrorCode::Exhausted: return "Exhausted";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::PhiRejectionExceeded: return "PhiRejectionExceeded";
    case ErrorCode::UnknownCommunity: return "UnknownCommunity";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicatePair: return "DuplicatePair";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

bool ElectorateSpec::equal_districts() const {
  if (district_sizes.empty()) return true;
  auto [lo, hi] = std::minmax_element(district_sizes.begin(), district_sizes.end());
  return *hi - *lo <= 1;
}

std::vector<Count> apportion(Count total, std::span<const double> shares) {
  const double sum = std::accumulate(shares.begin(), shares.end(), 0.0);
  std::vector<Count> out(shares.size(), 0);
  if (shares.empty() || sum <= 0.0) return out;

  std::vector<double> remainder(shares.size());
  Count assigned = 0;
  for (std::size_t k = 0; k < shares.size(); ++k) {
    const double exact = static_cast<double>(total) * shares[k] / sum;
    out[k] = static_cast<Count>(std::floor(exact));
    remainder[k] = exact - static_cast<double>(out[k]);
    assigned += out[k];
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total; i = (i + 1) % order.size()) {
    ++out[order[i]];
    ++assigned;
  }
  return out;
}

std::vector<Count> equal_district_sizes(Count electors, std::size_t districts) {
  std::vector<Count> sizes(districts, electors / static_cast<Count>(districts));
  const Count extra = electors % static_cast<Count>(districts);
  for (Count s = 0; s < extra; ++s) ++sizes[static_cast<std::size_t>(s)];
  return sizes;
}

ElectorateSpec validate_spec(ElectorateSpec spec) {
  if (spec.num_districts == 0) spec.num_districts = spec.district_sizes.size();
  if (spec.num_parties == 0)
    spec.num_parties = !spec.popularity.empty() ? spec.popularity.size() : spec.party_vote_totals.size();
  if (spec.num_electors == 0) {
    if (!spec.district_sizes.empty())
      spec.num_electors = std::accumulate(spec.district_sizes.begin(), spec.district_sizes.end(), Count{0});
    else if (!spec.party_vote_totals.empty())
      spec.num_electors = std::accumulate(spec.party_vote_totals.begin(), spec.party_vote_totals.end(), Count{0});
  }

  if (spec.num_districts < 1) throw Error(ErrorCode::NonPositive, "need at least one district");
  if (spec.num_parties < 2) throw Error(ErrorCode::NonPositive, "need at least two parties");
  if (spec.num_electors < 1) throw Error(ErrorCode::NonPositive, "need at least one elector");

  if (spec.district_sizes.empty()) {
    if (spec.num_electors < static_cast<Count>(spec.num_districts))
      throw Error(ErrorCode::NonPositive, "fewer electors than districts");
    spec.district_sizes = equal_district_sizes(spec.num_electors, spec.num_districts);
  }
  if (spec.district_sizes.size() != spec.num_districts)
    throw Error(ErrorCode::SizeMismatch, "district_sizes has " + std::to_string(spec.district_sizes.size()) +
                                             " entries, expected " + std::to_string(spec.num_districts));
  for (Count n : spec.district_sizes)
    if (n <= 0) throw Error(ErrorCode::NonPositive, "district size must be positive");
  const Count total = std::accumulate(spec.district_sizes.begin(), spec.district_sizes.end(), Count{0});
  if (total != spec.num_electors)
    throw Error(ErrorCode::SizeMismatch, "district sizes sum to " + std::to_string(total) + ", expected " +
                                             std::to_string(spec.num_electors));

  if (spec.popularity.empty() && spec.party_vote_totals.empty())
    throw Error(ErrorCode::ShareMismatch, "either popularity or party_vote_totals is required");

  if (!spec.party_vote_totals.empty()) {
    if (spec.party_vote_totals.size() != spec.num_parties)
      throw Error(ErrorCode::SizeMismatch, "party_vote_totals length differs from num_parties");
    for (Count v : spec.party_vote_totals)
      if (v < 0) throw Error(ErrorCode::NonPositive, "party vote totals must be non-negative");
    const Count votes =
        std::accumulate(spec.party_vote_totals.begin(), spec.party_vote_totals.end(), Count{0});
    if (votes != spec.num_electors)
      throw Error(ErrorCode::SizeMismatch, "party vote totals sum to " + std::to_string(votes) +
                                               ", expected " + std::to_string(spec.num_electors));
  }

  const double n = static_cast<double>(spec.num_electors);
  if (spec.popularity.empty()) {
    spec.popularity.resize(spec.num_parties);
    for (std::size_t k = 0; k < spec.num_parties; ++k)
      spec.popularity[k] = static_cast<double>(spec.party_vote_totals[k]) / n;
  } else {
    if (spec.popularity.size() != spec.num_parties)
      throw Error(ErrorCode::SizeMismatch, "popularity length differs from num_parties");
    double sum = 0.0;
    for (double t : spec.popularity) {
      if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorCode::ShareMismatch, "popularity must be >= 0");
      sum += t;
    }
    if (sum <= 0.0) throw Error(ErrorCode::ShareMismatch, "popularity sums to zero");
    for (double& t : spec.popularity) t /= sum;
  }

  if (spec.party_vote_totals.empty()) {
    spec.party_vote_totals = apportion(spec.num_electors, spec.popularity);
  } else {
    for (std::size_t k = 0; k < spec.num_parties; ++k) {
      const double diff = std::abs(static_cast<double>(spec.party_vote_totals[k]) / n - spec.popularity[k]);
      if (diff > 1.0 / n + 1e-9)
        throw Error(ErrorCode::ShareMismatch,
                    "popularity of party " + std::to_string(k) + " disagrees with its vote total");
    }
  }
  return spec;
}

std::string spec_digest(const ElectorateSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  feed(spec.num_districts);
  feed(spec.num_parties);
  feed(static_cast<std::uint64_t>(spec.num_electors));
  for (Count n : spec.district_sizes) feed(static_cast<std::uint64_t>(n));
  for (Count v : spec.party_vote_totals) feed(static_cast<std::uint64_t>(v));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Count TallyMatrix::row_sum(std::size_t s) const {
  auto r = row(s);
  return std::accumulate(r.begin(), r.end(), Count{0});
}

Count TallyMatrix::column_sum(std::size_t k) const {
  Count sum = 0;
  for (std::size_t s = 0; s < districts_; ++s) sum += at(s, k);
  return sum;
}

void check_tally(const TallyMatrix& tally, const ElectorateSpec& spec, bool check_columns) {
  if (tally.districts() != spec.num_districts || tally.parties() != spec.num_parties)
    throw Error(ErrorCode::DimensionMismatch, "tally shape does not match spec");
  for (std::size_t s = 0; s < tally.districts(); ++s) {
    for (Count v : tally.row(s))
      if (v < 0) throw Error(ErrorCode::RowSumViolation, "negative vote count");
    if (tally.row_sum(s) != spec.district_sizes[s])
      throw Error(ErrorCode::RowSumViolation, "district " + std::to_string(s) + " sums to " +
                                                  std::to_string(tally.row_sum(s)) + ", expected " +
                                                  std::to_string(spec.district_sizes[s]));
  }
  if (check_columns && spec.has_vote_totals()) {
    for (std::size_t k = 0; k < tally.parties(); ++k)
      if (tally.column_sum(k) != spec.party_vote_totals[k])
        throw Error(ErrorCode::RowSumViolation, "party " + std::to_string(k) + " total mismatch");
  }
}

ElectionOutcome decide_outcome(const TallyMatrix& tally, const ElectorateSpec& spec) {
  check_tally(tally, spec, false);
  ElectionOutcome out;
  out.winners.resize(tally.districts());
  out.margins.resize(tally.districts());
  out.seats.assign(tally.parties(), 0);
  for (std::size_t s = 0; s < tally.districts(); ++s) {
    auto r = tally.row(s);
    // max_element returns the first maximum, i.e. the lowest index on ties.
    const auto w = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
    out.winners[s] = w;
    out.margins[s] = static_cast<double>(r[w]) / static_cast<double>(spec.district_sizes[s]);
    ++out.seats[w];
  }
  return out;
}

std::size_t constrained_sample(std::span<const double> weights, std::span<Count> quotas, Rng& rng) {
  if (weights.size() != quotas.size())
    throw Error(ErrorCode::DimensionMismatch, "weights and quotas differ in length");
  double total = 0.0;
  std::size_t active = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (quotas[k] > 0) {
      total += weights[k];
      ++active;
    }
  }
  if (active == 0) throw Error(ErrorCode::Exhausted, "no index has remaining quota");

  std::size_t chosen = quotas.size();
  if (total > 0.0) {
    double u = rng.uniform() * total;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (quotas[k] <= 0 || weights[k] <= 0.0) continue;
      chosen = k;
      u -= weights[k];
      if (u < 0.0) break;
    }
  } else {
    std::size_t pick = rng.index(active);
    for (std::size_t k = 0; k < quotas.size(); ++k) {
      if (quotas[k] <= 0) continue;
      if (pick-- == 0) {
        chosen = k;
        break;
      }
    }
  }
  --quotas[chosen];
  return chosen;
}

SamplerState SamplerState::from_spec(const ElectorateSpec& spec) {
  SamplerState st;
  st.remaining_party_votes = spec.party_vote_totals;
  st.remaining_district_capacity = spec.district_sizes;
  return st;
}

}  // namespace elect
