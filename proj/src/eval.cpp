#include "hvdc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hvdc/csvio.hpp"

namespace hvdc::eval {

Latency detection_latency(const WaveformRecord& rec,
                          const std::optional<learn::TripCommand>& trip) {
  if (!rec.arrival_time)
    throw MetricError("latency undefined: record has no arrival_time");
  Latency l;
  if (!trip) {
    l.miss = true;
    return l;
  }
  l.seconds = trip->t - *rec.arrival_time;
  l.false_start = l.seconds < 0.0;
  return l;
}

std::vector<double> detector_sweep_grid() {
  std::vector<double> g;
  for (int i = 0; i < 41; ++i)
    g.push_back(std::pow(10.0, -1.0 + 2.0 * i / 40.0)); // [0.1, 10]
  return g;
}

std::vector<double> hybrid_sweep_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 41; ++i) g.push_back(static_cast<double>(i) / 42.0);
  return g;
}

namespace {

void check_two_class(const std::vector<WaveformRecord>& corpus) {
  bool pos = false, neg = false;
  for (const auto& r : corpus) (r.label ? pos : neg) = true;
  if (!pos || !neg)
    throw MetricError("ROC requires both trip and no-trip records");
}

double trapezoid_auc(std::vector<RocPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
  });
  double auc = 0.0;
  double px = 0.0, py = 0.0; // anchored at (0,0)
  for (const auto& p : pts) {
    auc += (p.fpr - px) * (p.tpr + py) / 2.0;
    px = p.fpr;
    py = p.tpr;
  }
  auc += (1.0 - px) * (1.0 + py) / 2.0; // anchored at (1,1)
  return auc;
}

bool detector_trips_record(const WaveformRecord& rec,
                           const det::DetectorConfig& cfg, double f_s) {
  auto bases = measure_bases(rec);
  det::Detector d(cfg, f_s);
  for (const auto& f : rec.frames) {
    d.step(to_per_unit(f, bases), f.t);
    if (d.last_raw()) return true;
  }
  return false;
}

} // namespace

RocCurve roc_detector(const std::vector<WaveformRecord>& corpus,
                      const ModelBundle& bundle, int detector,
                      const std::vector<double>& scales, double f_s) {
  check_two_class(corpus);
  const auto& cfg = bundle.detector_configs.at(detector);
  RocCurve curve;
  curve.subject = det::detector_kind_name(cfg.kind);
  for (double s : scales) {
    auto scaled = cfg.scaled(s);
    int tp = 0, fp = 0, pos = 0, neg = 0;
    for (const auto& rec : corpus) {
      bool tripped = detector_trips_record(rec, scaled, f_s);
      if (rec.label) {
        ++pos;
        if (tripped) ++tp;
      } else {
        ++neg;
        if (tripped) ++fp;
      }
    }
    curve.points.push_back(
        {s, static_cast<double>(tp) / pos, static_cast<double>(fp) / neg});
  }
  curve.auc = trapezoid_auc(curve.points);
  std::sort(curve.points.begin(), curve.points.end(),
            [](const RocPoint& a, const RocPoint& b) { return a.fpr < b.fpr; });
  return curve;
}

RocCurve roc_hybrid(const std::vector<WaveformRecord>& corpus,
                    const ModelBundle& bundle,
                    const std::vector<double>& cutoffs, double f_s) {
  check_two_class(corpus);
  RocCurve curve;
  curve.subject = "hybrid";
  for (double c : cutoffs) {
    int tp = 0, fp = 0, pos = 0, neg = 0;
    for (const auto& rec : corpus) {
      auto trip = learn::run_relay(rec, bundle.cluster_model,
                                   bundle.weight_table,
                                   bundle.detector_configs, f_s, c);
      if (rec.label) {
        ++pos;
        if (trip) ++tp;
      } else {
        ++neg;
        if (trip) ++fp;
      }
    }
    curve.points.push_back(
        {c, static_cast<double>(tp) / pos, static_cast<double>(fp) / neg});
  }
  curve.auc = trapezoid_auc(curve.points);
  std::sort(curve.points.begin(), curve.points.end(),
            [](const RocPoint& a, const RocPoint& b) { return a.fpr < b.fpr; });
  return curve;
}

double CorpusReport::detection_rate(const std::string& kind) const {
  auto it = per_kind.find(kind);
  if (it == per_kind.end() || it->second.second == 0) return 0.0;
  return static_cast<double>(it->second.first) / it->second.second;
}

double CorpusReport::false_alarm_rate() const {
  return negative_records > 0
             ? static_cast<double>(false_alarms) / negative_records
             : 0.0;
}

double CorpusReport::miss_rate() const {
  return fault_records > 0 ? static_cast<double>(misses) / fault_records : 0.0;
}

std::vector<std::pair<std::string, double>> CorpusReport::rows() const {
  std::vector<std::pair<std::string, double>> r;
  r.emplace_back("records", records);
  r.emplace_back("fault_records", fault_records);
  r.emplace_back("negative_records", negative_records);
  for (const auto& [kind, dt] : per_kind)
    r.emplace_back("detection_rate_" + kind, dt.second > 0
                                                 ? double(dt.first) / dt.second
                                                 : 0.0);
  r.emplace_back("miss_rate", miss_rate());
  r.emplace_back("false_alarm_rate", false_alarm_rate());
  r.emplace_back("false_alarms", false_alarms);
  r.emplace_back("mean_latency_s", mean_latency_s);
  r.emplace_back("p95_latency_s", p95_latency_s);
  return r;
}

CorpusReport evaluate_corpus(const ModelBundle& bundle,
                             const std::vector<WaveformRecord>& corpus,
                             double f_s) {
  CorpusReport rep;
  std::vector<double> latencies;
  for (const auto& rec : corpus) {
    ++rep.records;
    auto trip = learn::run_relay(rec, bundle.cluster_model, bundle.weight_table,
                                 bundle.detector_configs, f_s);
    if (rec.label) {
      ++rep.fault_records;
      auto& [hit, tot] = rep.per_kind[fault_type_name(rec.spec.fault.type)];
      ++tot;
      auto lat = detection_latency(rec, trip);
      if (lat.miss) {
        ++rep.misses;
      } else {
        ++hit;
        latencies.push_back(lat.seconds);
      }
    } else {
      ++rep.negative_records;
      if (trip) ++rep.false_alarms;
    }
  }
  if (!latencies.empty()) {
    double sum = 0.0;
    for (double l : latencies) sum += l;
    rep.mean_latency_s = sum / latencies.size();
    std::sort(latencies.begin(), latencies.end());
    auto i = static_cast<std::size_t>(
        std::ceil(0.95 * latencies.size())) - 1;
    rep.p95_latency_s = latencies[std::min(i, latencies.size() - 1)];
  }
  return rep;
}

void write_report_csv(const std::filesystem::path& path,
                      const CorpusReport& report) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path.string());
  os << "metric,value\n";
  for (const auto& [k, v] : report.rows()) os << k << ',' << format_double(v) << '\n';
}

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path.string());
  os << "scale,fpr,tpr\n";
  for (const auto& p : curve.points)
    os << format_double(p.scale) << ',' << format_double(p.fpr) << ','
       << format_double(p.tpr) << '\n';
}

} // namespace hvdc::eval
