#include "elect/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "elect/error.hpp"

namespace elect {

double Rng::log_gamma(double shape) {
  if (shape >= 1.0) return std::log(gamma(shape));
  // Gamma(a) = Gamma(a + 1) * U^(1/a); the power is taken in log space.
  return std::log(gamma(shape + 1.0)) + std::log(uniform_pos()) / shape;
}

double Rng::beta(double a, double b) {
  const double la = log_gamma(a);
  const double lb = log_gamma(b);
  const double m = std::max(la, lb);
  const double ea = std::exp(la - m);
  const double eb = std::exp(lb - m);
  return ea / (ea + eb);
}

std::vector<double> Rng::dirichlet(std::span<const double> alpha) {
  std::vector<double> out(alpha.size(), 0.0);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (alpha[k] <= 0.0) {
      out[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    out[k] = log_gamma(alpha[k]);
    max_log = std::max(max_log, out[k]);
  }
  if (!std::isfinite(max_log)) throw Error(ErrorCode::InvalidParameter, "dirichlet needs a positive parameter");
  double sum = 0.0;
  for (double& x : out) {
    x = std::exp(x - max_log);
    sum += x;
  }
  for (double& x : out) x /= sum;
  return out;
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform() * total;
  std::size_t last = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    last = k;
    u -= weights[k];
    if (u < 0.0) return k;
  }
  return last;
}

}  // namespace elect
