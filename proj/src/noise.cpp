#include "hvdc/noise.hpp"

#include <random>
#include <stdexcept>

namespace hvdc {

WaveformRecord inject_noise(const WaveformRecord& rec, double sigma,
                            std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (sigma == 0.0) return rec;

  auto base = measure_bases(rec);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);

  WaveformRecord out = rec;
  for (auto& f : out.frames)
    for (int c = 0; c < kNumChannels; ++c)
      f.channel(c) += gauss(rng) * base[c];
  return out;
}

} // namespace hvdc
