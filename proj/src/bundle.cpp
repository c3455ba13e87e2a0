#include "hvdc/bundle.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hvdc {

using nlohmann::ordered_json;

void ModelBundle::validate() const {
  if (static_cast<int>(weight_table.w.size()) != cluster_model.k)
    throw std::logic_error("weight table row count != cluster count");
  weight_table.validate();
  for (const auto& row : weight_table.w)
    if (row.size() != detector_configs.size())
      throw std::logic_error("weight row width != detector count");
  for (double b : normalization)
    if (!(b > 0.0)) throw std::logic_error("non-positive normalization base");
}

std::string ModelBundle::to_json() const {
  ordered_json j;
  j["format_version"] = format_version;

  ordered_json centroids = ordered_json::array();
  for (const auto& c : cluster_model.centroids)
    centroids.push_back(std::vector<double>(c.begin(), c.end()));
  j["centroids"] = std::move(centroids);
  j["inertia"] = cluster_model.inertia;

  ordered_json weights = ordered_json::array();
  for (std::size_t c = 0; c < weight_table.w.size(); ++c) {
    ordered_json row;
    row["label"] = c + 1;
    row["weights"] = weight_table.w[c];
    weights.push_back(std::move(row));
  }
  j["weights"] = std::move(weights);

  ordered_json dets = ordered_json::array();
  for (const auto& d : detector_configs) {
    ordered_json jd;
    jd["kind"] = det::detector_kind_name(d.kind);
    jd["threshold"] = d.threshold;
    jd["window"] = d.window;
    jd["drift"] = d.cusum_drift;
    jd["h"] = d.cusum_h;
    jd["hold_ms"] = d.hold_time * 1e3;
    dets.push_back(std::move(jd));
  }
  j["detectors"] = std::move(dets);

  j["normalization"] =
      std::vector<double>(normalization.begin(), normalization.end());
  return j.dump(2) + "\n";
}

ModelBundle ModelBundle::from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  ModelBundle b;
  b.format_version = j.at("format_version").get<int>();

  for (const auto& row : j.at("centroids")) {
    auto v = row.get<std::vector<double>>();
    if (v.size() != 6) throw std::invalid_argument("centroid must have 6 dims");
    cluster::FeatureVec fv;
    std::copy(v.begin(), v.end(), fv.begin());
    b.cluster_model.centroids.push_back(fv);
  }
  b.cluster_model.k = static_cast<int>(b.cluster_model.centroids.size());
  b.cluster_model.inertia = j.value("inertia", 0.0);

  b.weight_table.w.resize(j.at("weights").size());
  for (const auto& row : j.at("weights")) {
    int label = row.at("label").get<int>();
    if (label < 1 || label > static_cast<int>(b.weight_table.w.size()))
      throw std::invalid_argument("weight row label out of range");
    b.weight_table.w[label - 1] = row.at("weights").get<std::vector<double>>();
  }

  for (const auto& jd : j.at("detectors")) {
    det::DetectorConfig d;
    d.kind = det::detector_kind_from_name(jd.at("kind").get<std::string>());
    d.threshold = jd.at("threshold").get<double>();
    d.window = jd.at("window").get<int>();
    d.cusum_drift = jd.at("drift").get<double>();
    d.cusum_h = jd.at("h").get<double>();
    d.hold_time = jd.at("hold_ms").get<double>() * 1e-3;
    b.detector_configs.push_back(d);
  }

  auto norm = j.at("normalization").get<std::vector<double>>();
  if (norm.size() != 6)
    throw std::invalid_argument("normalization must have 6 entries");
  std::copy(norm.begin(), norm.end(), b.normalization.begin());
  b.validate();
  return b;
}

void ModelBundle::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path.string());
  os << to_json();
}

ModelBundle ModelBundle::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json(ss.str());
}

bool operator==(const ModelBundle& a, const ModelBundle& b) {
  if (a.format_version != b.format_version) return false;
  if (a.cluster_model.k != b.cluster_model.k) return false;
  if (a.cluster_model.centroids != b.cluster_model.centroids) return false;
  if (a.cluster_model.inertia != b.cluster_model.inertia) return false;
  if (a.weight_table.w != b.weight_table.w) return false;
  if (a.normalization != b.normalization) return false;
  if (a.detector_configs.size() != b.detector_configs.size()) return false;
  for (std::size_t i = 0; i < a.detector_configs.size(); ++i) {
    const auto& x = a.detector_configs[i];
    const auto& y = b.detector_configs[i];
    if (x.kind != y.kind || x.threshold != y.threshold ||
        x.window != y.window || x.cusum_drift != y.cusum_drift ||
        x.cusum_h != y.cusum_h || x.hold_time != y.hold_time)
      return false;
  }
  return true;
}

} // namespace hvdc
