#include "pcd/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace pcd {

LinkGain sample_gain(double distance, bool has_los, Rng& rng, LinkKind kind, int channel_index,
                     double ref_distance) {
  if (!(distance > 0.0)) throw std::invalid_argument("sample_gain: distance must be positive");
  LinkGain g{0.0, kind, channel_index};
  if (!has_los) return g;
  std::exponential_distribution<double> fading(1.0);
  const double r = distance / ref_distance;
  g.magnitude_sq = fading(rng) / (r * r * r * r);
  return g;
}

double capacity(const LinkGain& gain, double bandwidth, double beta) {
  return bandwidth * std::log2(1.0 + beta * gain.magnitude_sq);
}

}  // namespace pcd
