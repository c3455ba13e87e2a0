// Acceptance gate for the protection pipeline: eleven end-to-end checks,
// one printed pass/fail line each. The binary builds every artifact it
// needs (training corpus, model bundle, evaluation corpora) from the
// checked-in recipe configs, so a green run certifies the whole chain:
// simulate -> corpus -> train -> detect -> evaluate.
//
// Usage: acceptance [configs_dir]   (defaults to ../configs)

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hvdc/bundle.hpp"
#include "hvdc/cluster.hpp"
#include "hvdc/detectors.hpp"
#include "hvdc/eval.hpp"
#include "hvdc/learner.hpp"
#include "hvdc/network.hpp"
#include "hvdc/noise.hpp"
#include "hvdc/simulate.hpp"
#include "hvdc/train.hpp"

namespace fs = std::filesystem;
using namespace hvdc;

namespace {

struct Gate {
  int passed = 0, failed = 0;

  void check(int n, const std::string& name, bool ok,
             const std::string& detail) {
    std::printf("[%s] %2d. %s: %s\n", ok ? "PASS" : "FAIL", n, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    (ok ? passed : failed)++;
  }
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void note(const std::string& s) { std::fprintf(stderr, "-- %s\n", s.c_str()); }

constexpr double kFs = 50e3;

// ---------------------------------------------------------------------------
// 1. Decision-fusion arithmetic on a fixed weight row, exact to 1e-12.
void criterion_1(Gate& g) {
  const std::vector<double> row{0.193, 0.281, 0.281, 0.246};
  auto [h1, t1] = learn::fuse(row, {0, 1, 1, 0});
  auto [h2, t2] = learn::fuse(row, {1, 0, 0, 0});
  bool ok = std::abs(h1 - 0.562) < 1e-12 && t1 && std::abs(h2 - 0.193) < 1e-12 &&
            !t2;
  g.check(1, "decision-fusion arithmetic",
          ok, fmt("h(0110)=%.12f trip=%d, h(1000)=%.12f trip=%d", h1, t1, h2, t2));
}

// ---------------------------------------------------------------------------
// 2. Weight training equals a hand-rolled correct-rate recount on ten
//    randomized small training sets (<= 20 samples, 4 detectors).
void criterion_2(Gate& g) {
  std::mt19937_64 rng(424242);
  std::uniform_int_distribution<int> coin(0, 1), cpick(0, 2), npick(8, 20);
  const int n_det = 4;
  cluster::ClusterModel model;
  model.k = 3;
  for (int c = 0; c < 3; ++c) {
    cluster::FeatureVec v{};
    v[0] = 100.0 * c;
    model.centroids.push_back(v);
  }
  double worst = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 10 && ok; ++trial) {
    std::vector<learn::TrainingSample> samples;
    int m = npick(rng);
    for (int i = 0; i < m; ++i) {
      learn::TrainingSample s;
      s.features[0] = 100.0 * cpick(rng);
      s.label = coin(rng) == 1;
      s.fired.resize(n_det);
      for (auto& f : s.fired) f = coin(rng);
      samples.push_back(std::move(s));
    }
    auto res = learn::train_weights(samples, model, n_det);
    for (int c = 0; c < 3 && ok; ++c) {
      std::vector<double> r(n_det, 0.0);
      int mc = 0;
      double rowsum = 0.0;
      for (const auto& s : samples) {
        if (cluster::assign(model, s.features) - 1 != c) continue;
        ++mc;
        for (int n = 0; n < n_det; ++n)
          if ((s.fired[n] != 0) == s.label) r[n] += 1.0;
      }
      double sum = r[0] + r[1] + r[2] + r[3];
      for (int n = 0; n < n_det; ++n) {
        double want = (mc == 0 || sum == 0.0) ? 1.0 / n_det : r[n] / sum;
        worst = std::max(worst, std::abs(res.table.w[c][n] - want));
        rowsum += res.table.w[c][n];
      }
      if (std::abs(rowsum - 1.0) > 1e-12) ok = false;
    }
    if (worst > 1e-12) ok = false;
  }
  g.check(2, "weight training matches a brute-force recount", ok,
          fmt("10 randomized sets, max |w - recount| = %.2e, rows sum to 1",
              worst));
}

// ---------------------------------------------------------------------------
// 10. Numerical oracles: trapezoidal RC / RLC vs closed forms, k-means
//     best-of-restarts vs exhaustive partitions, CUSUM alarm index vs
//     ceil(h / (delta - nu)).
void criterion_10(Gate& g) {
  std::string detail;
  bool ok = true;

  { // RC discharge: v(t) = e^{-t/RC}, R = 1 ohm, C = 1 F.
    sim::Network net;
    int a = net.add_node(), b = net.add_node();
    int vs = net.add_voltage_source(a, -1, 1.0);
    net.add_resistor(a, b, 1.0);
    net.add_capacitor(b, -1, 1.0);
    net.init_dc();
    net.set_voltage(vs, 0.0);
    const double dt = 1e-5;
    for (int s = 0; s < 10000; ++s) net.step(dt);
    double got = net.node_voltage(b), want = std::exp(-0.1);
    double err = std::abs(got - want) / want;
    ok &= err < 1e-3;
    detail += fmt("RC err %.2e", err);
  }

  { // Series RLC 1 V step, underdamped closed form, 1% RMS. The source
    // starts at 0 V so the dc operating point is the zero state, then
    // steps to 1 V.
    sim::Network step_net;
    int a2 = step_net.add_node(), b2 = step_net.add_node(),
        c2 = step_net.add_node();
    int vs = step_net.add_voltage_source(a2, -1, 0.0);
    step_net.add_resistor(a2, b2, 1.0);
    step_net.add_inductor(b2, c2, 1e-3);
    step_net.add_capacitor(c2, -1, 1e-6);
    step_net.init_dc();
    step_net.set_voltage(vs, 1.0);
    const double alpha = 0.5e3; // R / 2L
    const double w0 = 1.0 / std::sqrt(1e-3 * 1e-6);
    const double wd = std::sqrt(w0 * w0 - alpha * alpha);
    const double dt = 1e-7, t_end = 5.0 / alpha;
    double se = 0.0, sw = 0.0;
    int n = 0;
    for (double t = dt; t <= t_end; t += dt) {
      step_net.step(dt);
      double want = 1.0 - std::exp(-alpha * t) *
                              (std::cos(wd * t) + alpha / wd * std::sin(wd * t));
      double got = step_net.node_voltage(c2);
      se += (got - want) * (got - want);
      sw += want * want;
      ++n;
    }
    double rms = std::sqrt(se / n) / std::sqrt(sw / n);
    ok &= rms < 0.01;
    detail += fmt(", RLC rms %.2e", rms);
  }

  { // k-means equals the exhaustive-partition optimum on small instances.
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    double worst = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      int n = 5 + trial % 4, k = 2 + trial % 2;
      std::vector<cluster::FeatureVec> X(n);
      for (auto& x : X)
        for (auto& v : x) v = u(rng);
      auto m = cluster::kmeans_fit(X, k, 64, 1234 + trial);
      // exhaustive search over all k^n label assignments
      double best = std::numeric_limits<double>::max();
      std::vector<int> lab(n, 0);
      for (long code = 0; code < std::lround(std::pow(k, n)); ++code) {
        long c = code;
        for (int i = 0; i < n; ++i) {
          lab[i] = static_cast<int>(c % k);
          c /= k;
        }
        std::vector<cluster::FeatureVec> cen(k, cluster::FeatureVec{});
        std::vector<int> cnt(k, 0);
        for (int i = 0; i < n; ++i) {
          cnt[lab[i]]++;
          for (int d = 0; d < 6; ++d) cen[lab[i]][d] += X[i][d];
        }
        bool empty = false;
        for (int c2 = 0; c2 < k; ++c2) {
          if (cnt[c2] == 0) { empty = true; break; }
          for (int d = 0; d < 6; ++d) cen[c2][d] /= cnt[c2];
        }
        if (empty) continue;
        double inertia = 0.0;
        for (int i = 0; i < n; ++i)
          inertia += cluster::squared_distance(X[i], cen[lab[i]]);
        best = std::min(best, inertia);
      }
      worst = std::max(worst, std::abs(m.inertia - best));
    }
    ok &= worst < 1e-9;
    detail += fmt(", kmeans gap %.1e", worst);
  }

  { // CUSUM alarm sample index = ceil(h / (delta - nu)) on noiseless steps.
    bool cusum_ok = true;
    struct Case { double delta, nu, h; };
    for (const Case& cs : {Case{0.105, 0.005, 0.25}, Case{0.4, 0.02, 1.0}}) {
      auto cfg = det::DetectorConfig::defaults(det::DetectorKind::qcd);
      cfg.cusum_drift = cs.nu;
      cfg.cusum_h = cs.h;
      cfg.hold_time = 0.0;
      det::Detector d(cfg);
      int k = 0;
      for (; k < 500; ++k)
        d.step({1, 1, 1.0, 1.0, 0, 0}, k * (1.0 / kFs));
      int alarm_at = -1;
      for (int j = 0; j < 50; ++j, ++k)
        if (d.step({1, 1, 1.0 - cs.delta, 1.0, 0, 0}, k * (1.0 / kFs)) == 1) {
          alarm_at = j;
          break;
        }
      int want = static_cast<int>(std::ceil(cs.h / (cs.delta - cs.nu))) - 1;
      cusum_ok &= alarm_at == want;
    }
    ok &= cusum_ok;
    detail += fmt(", cusum index %s", cusum_ok ? "exact" : "WRONG");
  }

  g.check(10, "numerical oracles (RC, RLC, k-means, CUSUM)", ok, detail);
}

// ---------------------------------------------------------------------------
// Empirical wavefront arrival: first frame after t_fault whose per-unit
// pole-current magnitude deviates by more than 5%.
double measured_arrival(const WaveformRecord& rec) {
  auto bases = measure_bases(rec);
  for (const auto& f : rec.frames) {
    if (f.t < rec.spec.t_fault) continue;
    auto pu = to_per_unit(f, bases);
    if (std::abs(std::abs(pu[0]) - 1.0) > 0.05 ||
        std::abs(std::abs(pu[1]) - 1.0) > 0.05)
      return f.t;
  }
  return -1.0;
}

std::optional<learn::TripCommand> run_relay(const ModelBundle& bundle,
                                            const WaveformRecord& rec) {
  auto bases = measure_bases(rec);
  learn::Relay relay(bundle.cluster_model, bundle.weight_table,
                     bundle.detector_configs, bases, rec.spec.line);
  for (const auto& f : rec.frames)
    if (auto cmd = relay.step(f)) return cmd;
  return std::nullopt;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

int main(int argc, char** argv) {
  const fs::path configs = argc > 1 ? argv[1] : "../configs";
  const fs::path work = fs::temp_directory_path() / "hvdcprot_acceptance";
  std::error_code ec;
  fs::remove_all(work, ec);
  fs::create_directories(work);

  Gate g;
  criterion_1(g);
  criterion_2(g);

  // --- 3 & 4: propagation calibration and hybrid detection speed ---------
  note("simulating the 105 km pole-to-pole reference scenario");
  ScenarioSpec ref;
  ref.line = LineId::L13;
  ref.fault.type = FaultType::p2p;
  ref.location_km = 105.0;
  ref.t_fault = 0.02;
  ref.duration = 0.04;
  sim::CableModel cable5;
  cable5.section_km = 5.0;
  auto ref_rec = sim::run_scenario(ref, {}, cable5);

  double t_arr = measured_arrival(ref_rec) - ref.t_fault;
  bool c3 = t_arr >= 0.4e-3 && t_arr <= 0.6e-3;
  g.check(3, "wavefront propagation (pole-to-pole fault at 105 km)", c3,
          fmt("measured arrival %.1f us after the fault (want 500 us +/- 20%%)",
              t_arr * 1e6));

  note("generating the 271-record training corpus (several minutes)");
  auto train_recipe = sim::load_recipe(configs / "training_recipe.json");
  auto train_corpus = sim::gen_corpus(train_recipe);
  std::ostringstream train_log;
  auto bundle = learn::train_bundle(train_corpus, det::default_pool_configs(),
                                    kFs, 1, {2, 3, 4}, &train_log);
  note(train_log.str());

  auto trip = run_relay(bundle, ref_rec);
  double lat = trip ? trip->t - *ref_rec.arrival_time : 1e9;
  bool c4 = trip.has_value() && lat <= 1.5e-3 && trip->t >= ref.t_fault;
  g.check(4, "hybrid detection speed on the 105 km scenario", c4,
          trip ? fmt("trip %.0f us after wavefront arrival (limit 1500 us)",
                     lat * 1e6)
               : std::string("no trip command issued"));

  // --- 5: coverage matrix ------------------------------------------------
  note("generating the coverage and external-fault corpora");
  auto cov_corpus =
      sim::gen_corpus(sim::load_recipe(configs / "coverage_recipe.json"));
  auto ext_corpus =
      sim::gen_corpus(sim::load_recipe(configs / "external_recipe.json"));
  {
    auto all = cov_corpus;
    all.insert(all.end(), ext_corpus.begin(), ext_corpus.end());
    auto rep = eval::evaluate_corpus(bundle, all);
    bool c5 = rep.detection_rate("P2P") == 1.0 &&
              rep.detection_rate("P2G_low") == 1.0 &&
              rep.detection_rate("P2G_high") == 1.0 && rep.false_alarms == 0 &&
              rep.fault_records == 15 && rep.negative_records == 12;
    g.check(5, "coverage matrix (clean faults, externals, normals)", c5,
            fmt("detection P2P/1ohm/300ohm = %.0f%%/%.0f%%/%.0f%% over 5 "
                "locations each, false trips %d of %d negatives",
                100 * rep.detection_rate("P2P"),
                100 * rep.detection_rate("P2G_low"),
                100 * rep.detection_rate("P2G_high"), rep.false_alarms,
                rep.negative_records));
  }

  // --- 6: cluster-count selection ---------------------------------------
  {
    std::vector<cluster::FeatureVec> X;
    for (const auto& rec : train_corpus)
      X.push_back(cluster::extract_features(rec, cluster::training_instant(rec)));
    auto sel = cluster::select_k(X, {2, 3, 4});
    std::string scores;
    for (auto& [k, s] : sel.scores) scores += fmt("k=%d:%.3f ", k, s);
    bool c6 = sel.k == 3 && bundle.cluster_model.k == 3;
    g.check(6, "cluster-count selection on the training corpus", c6,
            fmt("silhouettes %s-> selected k=%d", scores.c_str(), sel.k));
  }

  // --- 7: weight structure in the high-impedance/normal cluster ---------
  {
    cluster::FeatureVec nominal{1, 1, 1, 1, 0, 0};
    int label = cluster::assign(bundle.cluster_model, nominal);
    const auto& row = bundle.weight_table.w[label - 1];
    bool c7 = row[3] > row[0] && row[3] > row[1] && row[3] > row[2];
    g.check(7, "slow-integrator dominance in the high-impedance/normal cluster",
            c7,
            fmt("weights (%.3f, %.3f, %.3f, %.3f), cusum-based detector %s "
                "strictly largest",
                row[0], row[1], row[2], row[3], c7 ? "is" : "is NOT"));
  }

  // --- 8: ROC superiority of the hybrid ----------------------------------
  note("generating the mixed clean+noisy evaluation corpus");
  auto eval_corpus =
      sim::gen_corpus(sim::load_recipe(configs / "eval_recipe.json"));
  eval_corpus.insert(eval_corpus.end(), ext_corpus.begin(), ext_corpus.end());
  {
    double ah = eval::roc_hybrid(eval_corpus, bundle).auc;
    std::string detail = fmt("hybrid auc %.4f vs", ah);
    bool c8 = true;
    for (int d = 0; d < 4; ++d) {
      auto curve = eval::roc_detector(eval_corpus, bundle, d);
      c8 &= ah >= curve.auc - 0.01;
      detail += fmt(" %s %.4f", curve.subject.c_str(), curve.auc);
    }
    g.check(8, "roc superiority of the hybrid (margin 0.01)", c8, detail);
  }

  // --- 9: noise robustness over >= 60 s of normal operation --------------
  note("running 60 s of noisy normal operation");
  {
    sim::CableModel cable10;
    cable10.section_km = 10.0;
    double total_s = 0.0;
    long fp[4] = {0, 0, 0, 0};
    int trips = 0;
    for (int b = 0; b < 4; ++b) {
      ScenarioSpec s;
      s.line = LineId::L13;
      s.duration = 1.0;
      s.load_scale = 0.85 + 0.1 * b;
      auto clean = sim::run_scenario(s, {}, cable10);
      for (int v = 0; v < 15; ++v) {
        auto rec = inject_noise(clean, 0.005, 1000 + 97 * b + v);
        auto bases = measure_bases(rec);
        det::DetectorPool pool(bundle.detector_configs);
        learn::Relay relay(bundle.cluster_model, bundle.weight_table,
                           bundle.detector_configs, bases, s.line);
        for (const auto& f : rec.frames) {
          pool.step(to_per_unit(f, bases), f.t);
          for (int n = 0; n < 4; ++n) fp[n] += pool.at(n).last_raw();
          if (relay.step(f)) {
            ++trips;
            break;
          }
        }
        total_s += rec.frames.size() / kFs;
      }
    }
    long max_fp = std::max({fp[0], fp[1], fp[2], fp[3]});
    bool c9 = total_s >= 60.0 && trips == 0 && max_fp >= 1;
    g.check(9, "noise robustness at sigma 0.005", c9,
            fmt("%.0f s aggregate: per-detector false frames %ld/%ld/%ld/%ld, "
                "hybrid false trips %d",
                total_s, fp[0], fp[1], fp[2], fp[3], trips));
  }

  criterion_10(g);

  // --- 11: pipeline determinism ------------------------------------------
  note("running the smoke pipeline twice for byte-identity");
  {
    auto recipe = sim::load_recipe(configs / "smoke_recipe.json");
    std::array<fs::path, 2> runs{work / "runA", work / "runB"};
    for (const auto& dir : runs) {
      fs::create_directories(dir);
      auto corpus = sim::gen_corpus(recipe);
      sim::write_corpus(dir / "corpus", corpus);
      auto b = learn::train_bundle(corpus, det::default_pool_configs(), kFs, 7);
      b.save(dir / "bundle.json");
      eval::write_report_csv(dir / "report.csv",
                             eval::evaluate_corpus(b, corpus));
    }
    bool bundles_equal =
        slurp(runs[0] / "bundle.json") == slurp(runs[1] / "bundle.json");
    bool reports_equal =
        slurp(runs[0] / "report.csv") == slurp(runs[1] / "report.csv");
    bool c11 = bundles_equal && reports_equal &&
               !slurp(runs[0] / "bundle.json").empty();
    g.check(11, "pipeline determinism (corpus -> train -> evaluate)", c11,
            fmt("bundle byte-identical: %s, report byte-identical: %s",
                bundles_equal ? "yes" : "no", reports_equal ? "yes" : "no"));
  }

  std::printf("%d/%d acceptance checks passed\n", g.passed,
              g.passed + g.failed);
  fs::remove_all(work, ec);
  return g.failed == 0 ? 0 : 1;
}
