#pragma once

#include <array>
#include <span>
#include <vector>

#include "elect/core.hpp"

namespace elect {

/// Summary of one election: seat shares, district-averaged vote fractions and
/// the mean and population standard deviation of the winning margins.
struct SummaryStats {
  std::vector<double> seat_share;
  std::vector<double> mean_vote_fraction;
  double margin_mean = 0.0;
  double margin_std = 0.0;

  std::size_t parties() const { return seat_share.size(); }
  /// Flattened as (seat_share, mean_vote_fraction, margin_mean, margin_std).
  std::vector<double> flatten() const;
  bool operator==(const SummaryStats&) const = default;
};

/// Family weights for seat shares, vote fractions, margin mean, margin std.
using DistanceWeights = std::array<double, 4>;
inline constexpr DistanceWeights kUnitWeights{1.0, 1.0, 1.0, 1.0};

SummaryStats summarize(const TallyMatrix& tally, const ElectorateSpec& spec);

/// Weighted Euclidean distance: sqrt(sum_f w_f * |a_f - b_f|^2) over the four
/// families. Throws DimensionMismatch when party counts differ.
double distance(const SummaryStats& a, const SummaryStats& b, const DistanceWeights& w = kUnitWeights);

/// Componentwise mean.
SummaryStats mean_summary(std::span<const SummaryStats> runs);

/// Most frequent seat vector over runs; ties go to the vector nearest (L1)
/// the mean seat vector, then to the lexicographically smallest.
std::vector<Count> modal_seats(std::span<const std::vector<Count>> runs);

}  // namespace elect
