#include "hvdc/cluster.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace hvdc::cluster {

double squared_distance(const FeatureVec& a, const FeatureVec& b) {
  double d = 0.0;
  for (int i = 0; i < 6; ++i) {
    double e = a[i] - b[i];
    d += e * e;
  }
  return d;
}

FeatureVec extract_features(const WaveformRecord& rec, double at) {
  if (rec.frames.empty()) throw std::out_of_range("empty record");
  if (at < rec.frames.front().t - 1e-12 || at > rec.frames.back().t + 1e-12)
    throw std::out_of_range("feature instant outside record span");
  // Frames are uniformly spaced; index the nearest directly.
  double t0 = rec.frames.front().t;
  double dt = rec.frames.size() > 1 ? rec.frames[1].t - rec.frames[0].t : 1.0;
  auto i = static_cast<std::size_t>(
      std::clamp(std::llround((at - t0) / dt), 0LL,
                 static_cast<long long>(rec.frames.size()) - 1));
  auto base = measure_bases(rec);
  return to_per_unit(rec.frames[i], base);
}

double training_instant(const WaveformRecord& rec) {
  if (rec.arrival_time) return *rec.arrival_time + 0.5e-3;
  if (rec.frames.empty()) return 0.0;
  return 0.5 * (rec.frames.front().t + rec.frames.back().t);
}

namespace {

int nearest_centroid(const std::vector<FeatureVec>& centroids,
                     const FeatureVec& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    double d = squared_distance(centroids[c], x);
    if (d < best_d) { // strict: ties keep the lowest label
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

struct LloydResult {
  std::vector<FeatureVec> centroids;
  std::vector<int> labels; // 0-based
  double inertia = 0.0;
};

LloydResult lloyd(const std::vector<FeatureVec>& X, int k,
                  std::mt19937_64& rng) {
  const int n = static_cast<int>(X.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  LloydResult r;
  for (int c = 0; c < k; ++c) r.centroids.push_back(X[order[c]]);
  r.labels.assign(n, -1);

  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int c = nearest_centroid(r.centroids, X[i]);
      if (c != r.labels[i]) {
        r.labels[i] = c;
        changed = true;
      }
    }
    // Re-seed empty clusters at the point farthest from its centroid.
    for (int c = 0; c < k; ++c) {
      if (std::count(r.labels.begin(), r.labels.end(), c) > 0) continue;
      int far = 0;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        double d = squared_distance(X[i], r.centroids[r.labels[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      r.centroids[c] = X[far];
      r.labels[far] = c;
      changed = true;
    }
    std::vector<FeatureVec> sums(k, FeatureVec{});
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < 6; ++d) sums[r.labels[i]][d] += X[i][d];
      ++counts[r.labels[i]];
    }
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0)
        for (int d = 0; d < 6; ++d) r.centroids[c][d] = sums[c][d] / counts[c];

    double inertia = 0.0;
    for (int i = 0; i < n; ++i)
      inertia += squared_distance(X[i], r.centroids[r.labels[i]]);
    // Lloyd inertia must never increase between iterations.
    if (inertia > prev_inertia * (1.0 + 1e-9) + 1e-12)
      throw std::logic_error("k-means inertia increased");
    prev_inertia = inertia;
    r.inertia = inertia;
    if (!changed) break;
  }
  return r;
}

} // namespace

ClusterModel kmeans_fit(const std::vector<FeatureVec>& X, int k, int restarts,
                        std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (static_cast<int>(X.size()) < k)
    throw std::invalid_argument("need at least k points");
  LloydResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (r + 1));
    LloydResult res = lloyd(X, k, rng);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  ClusterModel m;
  m.k = k;
  m.centroids = std::move(best.centroids);
  m.inertia = best.inertia;
  return m;
}

int assign(const ClusterModel& model, const FeatureVec& x) {
  if (model.k < 1 || model.centroids.empty())
    throw std::invalid_argument("model not fitted");
  return nearest_centroid(model.centroids, x) + 1;
}

double silhouette(const std::vector<FeatureVec>& X, const ClusterModel& model) {
  if (model.k < 2)
    throw std::invalid_argument("silhouette undefined for k < 2");
  const int n = static_cast<int>(X.size());
  if (n < model.k + 1)
    throw std::invalid_argument("need at least k+1 points for silhouette");
  std::vector<int> labels(n);
  std::vector<int> counts(model.k, 0);
  for (int i = 0; i < n; ++i) {
    labels[i] = assign(model, X[i]) - 1;
    ++counts[labels[i]];
  }
  for (int c = 0; c < model.k; ++c)
    if (counts[c] == 0)
      throw std::invalid_argument("silhouette requires non-empty clusters");

  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (counts[labels[i]] == 1) continue; // singleton contributes 0
    std::vector<double> mean_dist(model.k, 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      mean_dist[labels[j]] += std::sqrt(squared_distance(X[i], X[j]));
    }
    double a = mean_dist[labels[i]] / (counts[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < model.k; ++c) {
      if (c == labels[i] || counts[c] == 0) continue;
      b = std::min(b, mean_dist[c] / counts[c]);
    }
    double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / n;
}

KSelection select_k(const std::vector<FeatureVec>& X,
                    const std::vector<int>& candidates, int restarts,
                    std::uint64_t seed) {
  if (candidates.empty()) throw std::invalid_argument("no k candidates");
  KSelection sel;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<int> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  for (int k : sorted) {
    ClusterModel m = kmeans_fit(X, k, restarts, seed);
    double s = silhouette(X, m);
    sel.scores.emplace_back(k, s);
    if (s > best_score) { // ties keep the smaller k
      best_score = s;
      sel.k = k;
      sel.model = std::move(m);
    }
  }
  return sel;
}

PcaResult pca_project(const std::vector<FeatureVec>& X) {
  const int n = static_cast<int>(X.size());
  if (n < 2) throw std::invalid_argument("need at least 2 points for PCA");
  Eigen::MatrixXd M(n, 6);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < 6; ++d) M(i, d) = X[i][d];
  Eigen::RowVectorXd mean = M.colwise().mean();
  M.rowwise() -= mean;
  Eigen::MatrixXd cov = (M.transpose() * M) / std::max(1, n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  double total_var = es.eigenvalues().sum();
  if (!(total_var > 1e-300))
    throw std::invalid_argument("degenerate data: zero variance");

  PcaResult out;
  Eigen::MatrixXd comps(6, 2);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd v = es.eigenvectors().col(5 - c); // descending order
    int imax = 0;
    for (int d = 1; d < 6; ++d)
      if (std::abs(v[d]) > std::abs(v[imax])) imax = d;
    if (v[imax] < 0.0) v = -v;
    comps.col(c) = v;
    out.explained_fraction[c] = es.eigenvalues()[5 - c] / total_var;
  }
  Eigen::MatrixXd proj = M * comps;
  out.coords.resize(n);
  for (int i = 0; i < n; ++i) out.coords[i] = {proj(i, 0), proj(i, 1)};
  return out;
}

} // namespace hvdc::cluster
