#include "hvdc/learner.hpp"

#include <cmath>
#include <stdexcept>

namespace hvdc::learn {

void WeightTable::validate() const {
  for (const auto& row : w) {
    double sum = 0.0;
    for (double v : row) {
      if (v < 0.0) throw std::logic_error("negative fusion weight");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::logic_error("weight row does not sum to 1");
  }
}

std::string breaker_id(LineId line) {
  auto [t1, t2] = line_terminals(line);
  return "CB" + std::to_string(t1) + std::to_string(t2);
}

TrainResult train_weights(const std::vector<TrainingSample>& samples,
                          const cluster::ClusterModel& model,
                          int num_detectors) {
  const int n_det = num_detectors;
  const int k = model.k;
  TrainResult out;
  out.table.w.assign(k, std::vector<double>(n_det, 1.0 / n_det));

  std::vector<int> m_c(k, 0);
  std::vector<std::vector<int>> cnt(k, std::vector<int>(n_det, 0));
  for (const auto& s : samples) {
    if (static_cast<int>(s.fired.size()) != n_det)
      throw std::invalid_argument("sample decision count mismatch");
    int c = cluster::assign(model, s.features) - 1;
    ++m_c[c];
    for (int n = 0; n < n_det; ++n)
      if ((s.fired[n] != 0) == s.label) ++cnt[c][n];
  }

  for (int c = 0; c < k; ++c) {
    if (m_c[c] == 0) {
      out.warnings.push_back("cluster " + std::to_string(c + 1) +
                             " has no training samples; keeping uniform row");
      continue;
    }
    double sum_r = 0.0;
    std::vector<double> r(n_det);
    for (int n = 0; n < n_det; ++n) {
      r[n] = static_cast<double>(cnt[c][n]) / m_c[c];
      sum_r += r[n];
    }
    if (sum_r <= 0.0) {
      out.warnings.push_back("cluster " + std::to_string(c + 1) +
                             " has all-zero correct rates; keeping uniform row");
      continue;
    }
    for (int n = 0; n < n_det; ++n) out.table.w[c][n] = r[n] / sum_r;
  }
  out.table.validate();
  return out;
}

std::pair<double, bool> fuse(const std::vector<double>& w_row,
                             const std::vector<int>& d) {
  if (w_row.size() != d.size())
    throw std::invalid_argument("weight/decision length mismatch");
  double h = 0.0;
  for (std::size_t n = 0; n < d.size(); ++n) h += w_row[n] * (d[n] ? 1.0 : 0.0);
  return {h, h > 0.5};
}

TrainingSample make_training_sample(const WaveformRecord& rec,
                                    const std::vector<det::DetectorConfig>& cfg,
                                    double f_s, double window_s) {
  TrainingSample s;
  s.features = cluster::extract_features(rec, cluster::training_instant(rec));
  s.label = rec.label;
  s.fired.assign(cfg.size(), 0);

  auto bases = measure_bases(rec);
  det::DetectorPool pool{cfg, f_s};
  double w0 = rec.arrival_time.value_or(rec.frames.front().t);
  double w1 = rec.arrival_time ? *rec.arrival_time + window_s
                               : rec.frames.back().t;
  for (const auto& f : rec.frames) {
    auto pu = to_per_unit(f, bases);
    pool.step(pu, f.t);
    if (f.t + 1e-12 < w0 || f.t > w1 + 1e-12) continue;
    for (int n = 0; n < pool.size(); ++n)
      if (pool.at(n).last_raw()) s.fired[n] = 1;
  }
  return s;
}

Relay::Relay(const cluster::ClusterModel& model, const WeightTable& table,
             const std::vector<det::DetectorConfig>& configs,
             const std::array<double, 6>& bases, LineId line, double f_s,
             double fusion_cutoff)
    : model_(model),
      table_(table),
      pool_(configs, f_s),
      bases_(bases),
      line_(line),
      cutoff_(fusion_cutoff) {
  if (table_.clusters() != model_.k)
    throw std::invalid_argument("weight table rows do not match cluster count");
}

std::optional<TripCommand> Relay::step(const SensorFrame& frame) {
  auto pu = to_per_unit(frame, bases_);
  int c = cluster::assign(model_, pu);
  Decision d = pool_.step(pu, frame.t);

  const auto& row = table_.row(c);
  if (row.size() != d.d.size())
    throw std::invalid_argument("weight/decision length mismatch");
  double h = 0.0;
  for (std::size_t n = 0; n < d.d.size(); ++n) h += row[n] * d.d[n];

  last_ = RelayLogRow{frame.t, h, c, d.d};
  if (!trip_ && h > cutoff_) {
    TripCommand cmd;
    cmd.breaker = breaker_id(line_);
    cmd.t = frame.t;
    cmd.cluster = c;
    cmd.h = h;
    cmd.contributing = d.d;
    trip_ = cmd;
    return trip_;
  }
  return std::nullopt;
}

std::optional<TripCommand> run_relay(
    const WaveformRecord& rec, const cluster::ClusterModel& model,
    const WeightTable& table, const std::vector<det::DetectorConfig>& configs,
    double f_s, double fusion_cutoff) {
  Relay relay(model, table, configs, measure_bases(rec), rec.spec.line, f_s,
              fusion_cutoff);
  for (const auto& f : rec.frames) relay.step(f);
  return relay.trip();
}

} // namespace hvdc::learn
