#pragma once

#include "pcd/rng.hpp"

namespace pcd {

enum class LinkKind { kV2R, kV2V };

struct LinkGain {
  double magnitude_sq = 0.0;  // |h|^2
  LinkKind kind = LinkKind::kV2V;
  int channel_index = 0;  // 1..K for V2V, 0 for V2R
};

/// Rayleigh small-scale fading with path-loss exponent 4:
/// |h|^2 = |alpha|^2 * (distance / ref_distance)^-4 with |alpha|^2 ~ Exp(1).
/// Returns a zero gain when there is no line of sight (no draw is consumed).
/// Throws std::invalid_argument if distance <= 0.
LinkGain sample_gain(double distance, bool has_los, Rng& rng, LinkKind kind = LinkKind::kV2V,
                     int channel_index = 0, double ref_distance = 1.0);

/// Shannon capacity bandwidth * log2(1 + beta * |h|^2) in bits/s; beta is linear.
double capacity(const LinkGain& gain, double bandwidth, double beta);

}  // namespace pcd
