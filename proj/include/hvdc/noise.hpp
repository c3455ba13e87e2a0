#pragma once

#include <cstdint>

#include "hvdc/types.hpp"

namespace hvdc {

/// Adds i.i.d. zero-mean Gaussian noise of std `sigma` (per-unit) to every
/// channel of every frame, working in the per-unit domain and converting
/// back. Deterministic per seed; spec metadata and labels are untouched.
WaveformRecord inject_noise(const WaveformRecord& rec, double sigma,
                            std::uint64_t seed);

} // namespace hvdc
