#pragma once

#include <vector>

#include "pcd/rng.hpp"

namespace pcd {

/// True primary-user occupancy of the K channels in one slot.
struct ChannelSlotState {
  std::vector<bool> occupied;
  double p0 = 1.0;  // exp(-lambda)

  int k() const { return static_cast<int>(occupied.size()); }
  bool is_free(int channel) const { return !occupied[static_cast<std::size_t>(channel)]; }
};

/// Result of one OBU's spectrum sensing. Channel indices are 0-based and sorted.
struct SensingReport {
  int owner = -1;
  std::vector<int> sensed;
  std::vector<int> believed_free;  // subset of sensed
};

/// Positive root of (x+1)ln(x+1) + x = K, the rate-optimal number of sensed
/// channels under T = K*tau and a logarithmic capacity gain.
double sensing_equation_root(int k_channels);

/// Root rounded to the nearest integer and clamped to [1, K].
int reference_sensed_count(int k_channels);

/// Rate left after sensing: ((T - K' tau) / T) * capacity.
/// Throws std::invalid_argument if the sensing time exceeds the slot.
double effective_rate(double capacity, int k_sensed, double tau, double slot_t);

/// Each channel independently occupied with probability 1 - exp(-lambda).
ChannelSlotState sample_primary(int k_channels, double lambda, Rng& rng);

/// Uniform random K'-subset of channels. An occupied channel is reported free
/// with probability p_miss; a free channel is reported occupied with
/// probability p_false.
SensingReport sense_channels(const ChannelSlotState& truth, int k_sensed, double p_miss,
                             double p_false, Rng& rng, int owner = -1);

/// Probability that none of `n_interferers` co-channel neighbours picks the
/// transmitter's channel: ((K P0 - 1) / (K P0))^n.
double p_no_peer_collision(int n_interferers, int k_channels, double p0);

/// Probability that a channel sensed free is really free (Bayes on P0, Pm, Pf).
double p_primary_clear(double p0, double p_miss, double p_false);

/// Product of the two factors above. Throws std::domain_error if K P0 <= 1.
double p_success(int n_interferers, int k_channels, double p0, double p_miss, double p_false);

}  // namespace pcd
