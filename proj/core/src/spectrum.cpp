#include "pcd/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pcd {

double sensing_equation_root(int k_channels) {
  if (k_channels < 1) throw std::invalid_argument("sensing_equation_root: K must be >= 1");
  const double k = k_channels;
  // Newton on g(x) = (x+1)ln(x+1) + x - K. g is increasing and convex on
  // x >= 0, so iterates started right of the root decrease monotonically.
  double x = k;
  for (int iter = 0; iter < 100; ++iter) {
    const double g = (x + 1.0) * std::log(x + 1.0) + x - k;
    const double dg = std::log(x + 1.0) + 2.0;
    const double next = x - g / dg;
    if (std::abs(next - x) < 1e-13 * std::max(1.0, x)) return next;
    x = next;
  }
  return x;
}

int reference_sensed_count(int k_channels) {
  const double root = sensing_equation_root(k_channels);
  const int rounded = static_cast<int>(std::lround(root));
  return std::clamp(rounded, 1, k_channels);
}

double effective_rate(double capacity, int k_sensed, double tau, double slot_t) {
  const double sensing = k_sensed * tau;
  if (sensing > slot_t * (1.0 + 1e-12)) {
    throw std::invalid_argument("effective_rate: sensing time exceeds the slot");
  }
  return std::max(0.0, (slot_t - sensing) / slot_t) * capacity;
}

ChannelSlotState sample_primary(int k_channels, double lambda, Rng& rng) {
  if (lambda < 0.0) throw std::invalid_argument("sample_primary: lambda must be >= 0");
  ChannelSlotState s;
  s.p0 = std::exp(-lambda);
  s.occupied.resize(static_cast<std::size_t>(k_channels));
  std::bernoulli_distribution busy(1.0 - s.p0);
  for (int k = 0; k < k_channels; ++k) s.occupied[k] = busy(rng);
  return s;
}

SensingReport sense_channels(const ChannelSlotState& truth, int k_sensed, double p_miss,
                             double p_false, Rng& rng, int owner) {
  if (k_sensed < 1 || k_sensed > truth.k()) {
    throw std::invalid_argument("sense_channels: k_sensed out of range");
  }
  SensingReport r;
  r.owner = owner;
  std::vector<int> all(static_cast<std::size_t>(truth.k()));
  std::iota(all.begin(), all.end(), 0);
  std::sample(all.begin(), all.end(), std::back_inserter(r.sensed), k_sensed, rng);

  std::bernoulli_distribution miss(p_miss);
  std::bernoulli_distribution false_alarm(p_false);
  for (int k : r.sensed) {
    const bool reported_free = truth.is_free(k) ? !false_alarm(rng) : miss(rng);
    if (reported_free) r.believed_free.push_back(k);
  }
  return r;
}

double p_no_peer_collision(int n_interferers, int k_channels, double p0) {
  const double avail = k_channels * p0;
  if (!(avail > 1.0)) throw std::domain_error("p_success: K * P0 must exceed 1");
  return std::pow((avail - 1.0) / avail, n_interferers);
}

double p_primary_clear(double p0, double p_miss, double p_false) {
  const double clear = p0 * (1.0 - p_false);
  const double denom = clear + (1.0 - p0) * p_miss;
  return denom > 0.0 ? clear / denom : 1.0;
}

double p_success(int n_interferers, int k_channels, double p0, double p_miss, double p_false) {
  return p_no_peer_collision(n_interferers, k_channels, p0) * p_primary_clear(p0, p_miss, p_false);
}

}  // namespace pcd
