#pragma once

#include <iosfwd>
#include <vector>

#include "hvdc/bundle.hpp"
#include "hvdc/types.hpp"

namespace hvdc::learn {

struct DegenerateCorpusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Offline training path: k selection by silhouette, k-means fit,
/// detector decision extraction and the weighted-majority update, bundled
/// with the corpus normalization defaults. Logs silhouette scores and the
/// final weight rows to `log` when given.
ModelBundle train_bundle(const std::vector<WaveformRecord>& corpus,
                         std::vector<det::DetectorConfig> configs,
                         double f_s = 50e3, std::uint64_t seed = 1,
                         const std::vector<int>& k_candidates = {2, 3, 4},
                         std::ostream* log = nullptr);

} // namespace hvdc::learn
