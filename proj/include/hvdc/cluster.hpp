#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hvdc/types.hpp"

namespace hvdc::cluster {

using FeatureVec = std::array<double, 6>;

struct ClusterModel {
  int k = 0;
  std::vector<FeatureVec> centroids; // row order = label order, labels 1..k
  double inertia = 0.0;              // final within-cluster sum of squares
};

/// Per-unit channels at the frame nearest `at`. Throws std::out_of_range
/// outside the record span.
FeatureVec extract_features(const WaveformRecord& rec, double at);

/// The training feature instant: arrival + 0.5 ms for fault records, the
/// record midpoint for fault-free ones.
double training_instant(const WaveformRecord& rec);

/// Lloyd iterations to an assignment fixpoint (or 300 iterations),
/// best-of-`restarts` by inertia, deterministic given `seed`. Empty
/// clusters are re-seeded at the farthest point.
ClusterModel kmeans_fit(const std::vector<FeatureVec>& X, int k,
                        int restarts = 32, std::uint64_t seed = 1);

/// Argmin Euclidean distance; ties break to the lowest label. Labels 1..k.
int assign(const ClusterModel& model, const FeatureVec& x);

/// Mean silhouette value in [-1, 1]; singleton clusters contribute 0.
/// Throws std::invalid_argument for k < 2.
double silhouette(const std::vector<FeatureVec>& X, const ClusterModel& model);

struct KSelection {
  int k = 0;
  ClusterModel model;
  std::vector<std::pair<int, double>> scores; // (candidate k, silhouette)
};

/// Argmax mean silhouette over the candidates; ties go to the smaller k.
KSelection select_k(const std::vector<FeatureVec>& X,
                    const std::vector<int>& candidates = {2, 3, 4},
                    int restarts = 32, std::uint64_t seed = 1);

struct PcaResult {
  std::vector<std::array<double, 2>> coords;
  std::array<double, 2> explained_fraction{};
};

/// Top-2 principal components of the mean-centered data; the largest-
/// magnitude loading of each component is made positive.
PcaResult pca_project(const std::vector<FeatureVec>& X);

double squared_distance(const FeatureVec& a, const FeatureVec& b);

} // namespace hvdc::cluster
