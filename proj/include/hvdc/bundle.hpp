#pragma once

#include <filesystem>
#include <string>

#include "hvdc/cluster.hpp"
#include "hvdc/detectors.hpp"
#include "hvdc/learner.hpp"

namespace hvdc {

/// The persisted model: clusters, fusion weights, detector parameters and
/// default channel normalization. Round-trips bit-exactly through JSON.
struct ModelBundle {
  int format_version = 1;
  cluster::ClusterModel cluster_model;
  learn::WeightTable weight_table;
  std::vector<det::DetectorConfig> detector_configs;
  std::array<double, 6> normalization{};

  /// Throws std::logic_error on an internally inconsistent bundle.
  void validate() const;

  std::string to_json() const;
  static ModelBundle from_json(const std::string& text);

  void save(const std::filesystem::path& path) const;
  static ModelBundle load(const std::filesystem::path& path);
};

bool operator==(const ModelBundle& a, const ModelBundle& b);

} // namespace hvdc
