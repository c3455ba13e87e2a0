#include "hvdc/train.hpp"

#include <algorithm>
#include <ostream>

namespace hvdc::learn {

ModelBundle train_bundle(const std::vector<WaveformRecord>& corpus,
                         std::vector<det::DetectorConfig> configs,
                         double f_s, std::uint64_t seed,
                         const std::vector<int>& k_candidates,
                         std::ostream* log) {
  int max_k = *std::max_element(k_candidates.begin(), k_candidates.end());
  if (static_cast<int>(corpus.size()) < max_k + 1)
    throw DegenerateCorpusError("corpus too small for k selection");
  bool pos = false, neg = false;
  for (const auto& r : corpus) (r.label ? pos : neg) = true;
  if (!pos || !neg)
    throw DegenerateCorpusError("corpus must contain both labels");

  std::vector<cluster::FeatureVec> X;
  std::vector<TrainingSample> samples;
  X.reserve(corpus.size());
  samples.reserve(corpus.size());
  for (const auto& rec : corpus) {
    samples.push_back(make_training_sample(rec, configs, f_s));
    X.push_back(samples.back().features);
  }

  cluster::KSelection sel;
  try {
    sel = cluster::select_k(X, k_candidates, 32, seed);
  } catch (const std::invalid_argument& e) {
    throw DegenerateCorpusError(std::string("k selection failed: ") + e.what());
  }
  if (log) {
    for (const auto& [k, s] : sel.scores)
      *log << "silhouette k=" << k << ": " << s << "\n";
    *log << "selected k=" << sel.k << "\n";
  }

  auto trained = train_weights(samples, sel.model,
                               static_cast<int>(configs.size()));
  if (log) {
    for (const auto& warn : trained.warnings) *log << "warning: " << warn << "\n";
    for (int c = 0; c < sel.model.k; ++c) {
      *log << "weights label " << c + 1 << ":";
      for (double w : trained.table.w[c]) *log << ' ' << w;
      *log << "\n";
    }
  }

  ModelBundle bundle;
  bundle.cluster_model = sel.model;
  bundle.weight_table = trained.table;
  bundle.detector_configs = std::move(configs);

  // Default bases: nominal pole voltage plus the median pre-fault current
  // base across the corpus (online use re-measures per record when a
  // quiet pre-window exists).
  std::vector<double> ipos, ineg;
  for (const auto& rec : corpus) {
    auto b = measure_bases(rec);
    ipos.push_back(b[kChanIPos]);
    ineg.push_back(b[kChanINeg]);
  }
  auto median = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  bundle.normalization = {median(ipos), median(ineg), 320.0, 320.0, 320.0,
                          320.0};
  bundle.validate();
  return bundle;
}

} // namespace hvdc::learn
