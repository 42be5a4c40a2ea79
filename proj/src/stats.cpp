#include "elect/stats.hpp"

#include <cmath>
#include <map>

namespace elect {

std::vector<double> SummaryStats::flatten() const {
  std::vector<double> out(seat_share);
  out.insert(out.end(), mean_vote_fraction.begin(), mean_vote_fraction.end());
  out.push_back(margin_mean);
  out.push_back(margin_std);
  return out;
}

SummaryStats summarize(const TallyMatrix& tally, const ElectorateSpec& spec) {
  const ElectionOutcome outcome = decide_outcome(tally, spec);
  const std::size_t S = tally.districts();
  const std::size_t K = tally.parties();
  const double inv_s = 1.0 / static_cast<double>(S);

  SummaryStats st;
  st.seat_share.resize(K);
  for (std::size_t k = 0; k < K; ++k) st.seat_share[k] = static_cast<double>(outcome.seats[k]) * inv_s;
  st.mean_vote_fraction.assign(K, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    const double n = static_cast<double>(spec.district_sizes[s]);
    for (std::size_t k = 0; k < K; ++k) st.mean_vote_fraction[k] += static_cast<double>(tally.at(s, k)) / n;
  }
  for (double& f : st.mean_vote_fraction) f *= inv_s;

  for (double p : outcome.margins) st.margin_mean += p;
  st.margin_mean *= inv_s;
  double var = 0.0;
  for (double p : outcome.margins) var += (p - st.margin_mean) * (p - st.margin_mean);
  st.margin_std = std::sqrt(var * inv_s);
  return st;
}

double distance(const SummaryStats& a, const SummaryStats& b, const DistanceWeights& w) {
  if (a.seat_share.size() != b.seat_share.size() || a.mean_vote_fraction.size() != b.mean_vote_fraction.size())
    throw Error(ErrorCode::DimensionMismatch, "summaries have different party counts");
  double seat = 0.0, vote = 0.0;
  for (std::size_t k = 0; k < a.seat_share.size(); ++k) {
    const double d = a.seat_share[k] - b.seat_share[k];
    seat += d * d;
  }
  for (std::size_t k = 0; k < a.mean_vote_fraction.size(); ++k) {
    const double d = a.mean_vote_fraction[k] - b.mean_vote_fraction[k];
    vote += d * d;
  }
  const double dm = a.margin_mean - b.margin_mean;
  const double ds = a.margin_std - b.margin_std;
  return std::sqrt(w[0] * seat + w[1] * vote + w[2] * dm * dm + w[3] * ds * ds);
}

SummaryStats mean_summary(std::span<const SummaryStats> runs) {
  if (runs.empty()) throw Error(ErrorCode::DimensionMismatch, "no summaries to average");
  SummaryStats out;
  const std::size_t K = runs.front().parties();
  out.seat_share.assign(K, 0.0);
  out.mean_vote_fraction.assign(K, 0.0);
  for (const auto& r : runs) {
    if (r.parties() != K) throw Error(ErrorCode::DimensionMismatch, "summaries have different party counts");
    for (std::size_t k = 0; k < K; ++k) {
      out.seat_share[k] += r.seat_share[k];
      out.mean_vote_fraction[k] += r.mean_vote_fraction[k];
    }
    out.margin_mean += r.margin_mean;
    out.margin_std += r.margin_std;
  }
  const double inv = 1.0 / static_cast<double>(runs.size());
  for (std::size_t k = 0; k < K; ++k) {
    out.seat_share[k] *= inv;
    out.mean_vote_fraction[k] *= inv;
  }
  out.margin_mean *= inv;
  out.margin_std *= inv;
  return out;
}

std::vector<Count> modal_seats(std::span<const std::vector<Count>> runs) {
  if (runs.empty()) throw Error(ErrorCode::DimensionMismatch, "no runs to take the mode of");
  const std::size_t K = runs.front().size();
  std::vector<double> mean(K, 0.0);
  std::map<std::vector<Count>, int> freq;
  for (const auto& r : runs) {
    if (r.size() != K) throw Error(ErrorCode::DimensionMismatch, "runs have different party counts");
    ++freq[r];
    for (std::size_t k = 0; k < K; ++k) mean[k] += static_cast<double>(r[k]) / static_cast<double>(runs.size());
  }
  const std::vector<Count>* best = nullptr;
  int best_count = 0;
  double best_gap = 0.0;
  for (const auto& [seats, count] : freq) {
    double gap = 0.0;
    for (std::size_t k = 0; k < K; ++k) gap += std::abs(static_cast<double>(seats[k]) - mean[k]);
    if (count > best_count || (count == best_count && gap < best_gap)) {
      best = &seats;
      best_count = count;
      best_gap = gap;
    }
  }
  return *best;
}

}  // namespace elect
