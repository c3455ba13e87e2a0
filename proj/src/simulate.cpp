#include "hvdc/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hvdc/csvio.hpp"
#include "hvdc/noise.hpp"

namespace hvdc::sim {

namespace {

void validate_spec(const ScenarioSpec& spec, const CableModel& cable) {
  cable.validate();
  if (spec.t_fault >= spec.duration)
    throw ScenarioError("t_fault must precede duration");
  if (spec.impedance_ohm < 0.0)
    throw ScenarioError("fault impedance must be >= 0");
  if (spec.has_fault()) {
    double len = line_length_km(spec.faulted_line());
    if (spec.location_km < 0.0 || spec.location_km > len)
      throw ScenarioError("fault location outside " +
                          line_name(spec.faulted_line()));
  }
  if (spec.noise_sigma < 0.0) throw ScenarioError("noise_sigma must be >= 0");
}

void check_settled(const std::vector<SensorFrame>& frames, double t_fault,
                   double f_s) {
  // All currents must change by < 0.1 %/ms over the last 2 ms before the
  // fault (or record end for fault-free runs).
  double t_end = t_fault;
  double t_start = t_end - 2e-3;
  const SensorFrame* prev = nullptr;
  for (const auto& f : frames) {
    if (f.t < t_start || f.t >= t_end) continue;
    if (prev) {
      for (int p = 0; p < 2; ++p) {
        double i0 = prev->line_current[p], i1 = f.line_current[p];
        double scale = std::max(std::abs(i0), 0.05);
        double rate_per_ms = std::abs(i1 - i0) / scale * (f_s / 1e3);
        if (rate_per_ms > 1e-3)
          throw ScenarioError(
              "steady state not reached before t_fault; increase the "
              "pre-fault lead time");
      }
    }
    prev = &f;
  }
}

} // namespace

WaveformRecord run_scenario(const ScenarioSpec& spec, const GridTopology& topo,
                            const CableModel& cable, const SimConfig& cfg) {
  validate_spec(spec, cable);
  cfg.validate();

  auto grid = build_grid(topo, cable, spec.load_scale);
  std::vector<int> fault_sw;
  if (spec.has_fault())
    fault_sw = add_fault(*grid, topo, cable, spec.line, spec.fault,
                         spec.location_km, spec.impedance_ohm);

  grid->net.init_dc();

  const double dt = cfg.dt_sim;
  const int decim = static_cast<int>(std::round(1.0 / (cfg.f_s * dt)));
  const long total_steps = std::lround(spec.duration / dt);
  const int monitored_terminal = line_terminals(spec.line).first;

  WaveformRecord rec;
  rec.spec = spec;
  rec.label = spec.trip_label();
  rec.frames.reserve(static_cast<std::size_t>(total_steps / decim) + 1);
  rec.frames.push_back(grid->sample(monitored_terminal, spec.line, 0.0));

  bool faulted = false;
  for (long s = 1; s <= total_steps; ++s) {
    double t = static_cast<double>(s) * dt;
    if (!faulted && spec.has_fault() && t >= spec.t_fault) {
      for (int id : fault_sw) grid->net.set_switch(id, true);
      faulted = true;
    }
    grid->net.step(dt);
    if (s % decim == 0) {
      double t_frame = static_cast<double>(s / decim) / cfg.f_s;
      rec.frames.push_back(
          grid->sample(monitored_terminal, spec.line, t_frame));
    }
  }

  check_settled(rec.frames,
                spec.has_fault() ? spec.t_fault : spec.duration, cfg.f_s);

  if (spec.has_fault()) {
    double dist;
    if (spec.fault.type == FaultType::external)
      dist = path_distance_km(spec.fault.remote_line, spec.location_km,
                              monitored_terminal);
    else
      dist = spec.location_km;
    rec.arrival_time = spec.t_fault + dist * cable.travel_time_s_per_km();
  }

  if (spec.noise_sigma > 0.0)
    rec = inject_noise(rec, spec.noise_sigma, spec.seed);
  return rec;
}

std::vector<ScenarioSpec> CorpusRecipe::expand() const {
  if (sweeps.empty() && normal_count == 0)
    throw ScenarioError("recipe has no sweeps and no normal records");
  std::vector<ScenarioSpec> specs;
  for (const auto& sw : sweeps) {
    if (sw.locations_km.empty() || sw.impedances_ohm.empty() ||
        sw.poles.empty() || sw.noise_sigmas.empty())
      throw ScenarioError("empty recipe dimension in fault sweep");
    // P2P and external faults have no pole dimension.
    std::vector<Pole> poles = sw.poles;
    if (sw.type == FaultType::p2p || sw.type == FaultType::external)
      poles.resize(1);
    for (double loc : sw.locations_km)
      for (double imp : sw.impedances_ohm)
        for (Pole pole : poles)
          for (double sigma : sw.noise_sigmas) {
            ScenarioSpec s;
            s.line = line;
            s.fault.type = sw.type;
            s.fault.pole = pole;
            s.fault.remote_line = sw.remote_line;
            s.location_km = loc;
            s.impedance_ohm = imp;
            s.noise_sigma = sigma;
            s.t_fault = t_fault;
            s.duration = duration;
            specs.push_back(s);
          }
  }
  if (normal_count > 0 &&
      (normal_noise.empty() || normal_load_scales.empty()))
    throw ScenarioError("empty recipe dimension in normal block");
  for (int i = 0; i < normal_count; ++i) {
    ScenarioSpec s;
    s.line = line;
    s.fault.type = FaultType::none;
    s.t_fault = t_fault;
    s.duration = normal_duration > 0.0 ? normal_duration : duration;
    s.noise_sigma = normal_noise[i % normal_noise.size()];
    s.load_scale = normal_load_scales[(i / normal_noise.size()) %
                                      normal_load_scales.size()];
    s.seed = static_cast<std::uint64_t>(i); // disambiguates repeats
    specs.push_back(s);
  }

  for (std::size_t i = 0; i < specs.size(); ++i)
    specs[i].seed = seed * 1000003ULL + specs[i].seed * 9176ULL + i;
  std::sort(specs.begin(), specs.end());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::ostringstream id;
    id << 'r';
    id.width(3);
    id.fill('0');
    id << i << '_' << fault_type_name(specs[i].fault.type);
    if (specs[i].has_fault())
      id << '_' << specs[i].location_km << "km_" << specs[i].impedance_ohm
         << "ohm";
    specs[i].id = id.str();
  }
  return specs;
}

std::vector<WaveformRecord> gen_corpus(const CorpusRecipe& recipe,
                                       const GridTopology& topo, int threads) {
  auto specs = recipe.expand();
  CableModel cable;
  cable.section_km = recipe.section_km;
  SimConfig cfg;

  if (threads <= 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<int>(threads, static_cast<int>(specs.size()));

  std::vector<WaveformRecord> out(specs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      try {
        out[i] = run_scenario(specs[i], topo, cable, cfg);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

void write_corpus(const std::filesystem::path& dir,
                  const std::vector<WaveformRecord>& corpus) {
  std::filesystem::create_directories(dir);
  std::vector<ManifestRow> rows;
  for (const auto& rec : corpus) {
    write_waveform_csv(dir / (rec.spec.id + ".csv"), rec);
    ManifestRow r;
    r.id = rec.spec.id;
    r.line = line_name(rec.spec.line);
    r.kind = fault_type_name(rec.spec.fault.type);
    r.location_km = rec.spec.location_km;
    r.impedance_ohm = rec.spec.impedance_ohm;
    r.label = rec.label ? 1 : 0;
    r.arrival_time = rec.arrival_time.value_or(-1.0);
    rows.push_back(r);
  }
  write_manifest_csv(dir / "manifest.csv", rows);
}

std::vector<WaveformRecord> load_corpus(const std::filesystem::path& dir) {
  auto rows = read_manifest_csv(dir / "manifest.csv");
  std::vector<WaveformRecord> corpus;
  corpus.reserve(rows.size());
  for (const auto& r : rows) {
    WaveformRecord rec;
    rec.spec.id = r.id;
    rec.spec.line = line_from_name(r.line);
    rec.spec.fault.type = fault_type_from_name(r.kind);
    rec.spec.location_km = r.location_km;
    rec.spec.impedance_ohm = r.impedance_ohm;
    rec.label = r.label != 0;
    if (r.arrival_time >= 0.0) rec.arrival_time = r.arrival_time;
    rec.frames = read_waveform_csv(dir / (r.id + ".csv"));
    if (!rec.frames.empty()) {
      rec.spec.duration = rec.frames.back().t + 2e-5;
      rec.spec.t_fault = rec.arrival_time.value_or(rec.spec.duration / 2.0);
    }
    corpus.push_back(std::move(rec));
  }
  return corpus;
}

namespace {

Pole pole_from_name(const std::string& s) {
  if (s == "positive") return Pole::positive;
  if (s == "negative") return Pole::negative;
  throw ScenarioError("unknown pole: " + s);
}

} // namespace

ScenarioFile parse_scenario_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what());
  }
  ScenarioFile f;
  try {
    ScenarioSpec& s = f.spec;
    s.line = line_from_name(j.value("line", "Line13"));
    s.fault.type = fault_type_from_name(j.value("fault", "none"));
    if (j.contains("pole")) s.fault.pole = pole_from_name(j["pole"]);
    if (s.fault.type == FaultType::external)
      s.fault.remote_line = line_from_name(j.at("remote_line").get<std::string>());
    s.location_km = j.value("location_km", 0.0);
    s.impedance_ohm = j.value("impedance_ohm", 0.0);
    s.t_fault = j.value("t_fault", 0.02);
    s.duration = j.value("duration", 0.04);
    s.noise_sigma = j.value("noise_sigma", 0.0);
    s.seed = j.value("seed", 0ULL);
    s.load_scale = j.value("load_scale", 1.0);
    s.id = j.value("id", std::string{});
    f.section_km = j.value("section_km", 10.0);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario field error: ") + e.what());
  }
  return f;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ScenarioError("cannot open scenario: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_scenario_json(ss.str());
}

CorpusRecipe parse_recipe_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("recipe parse error: ") + e.what());
  }
  CorpusRecipe r;
  try {
    r.line = line_from_name(j.value("line", "Line13"));
    r.seed = j.value("seed", 1ULL);
    r.t_fault = j.value("t_fault", 0.02);
    r.duration = j.value("duration", 0.04);
    r.section_km = j.value("section_km", 5.0);
    for (const auto& js : j.value("sweeps", nlohmann::json::array())) {
      FaultSweep sw;
      sw.type = fault_type_from_name(js.at("kind").get<std::string>());
      if (sw.type == FaultType::external)
        sw.remote_line = line_from_name(js.at("remote_line").get<std::string>());
      sw.locations_km = js.at("locations").get<std::vector<double>>();
      if (js.contains("impedances"))
        sw.impedances_ohm = js["impedances"].get<std::vector<double>>();
      if (js.contains("poles")) {
        sw.poles.clear();
        for (const auto& p : js["poles"])
          sw.poles.push_back(pole_from_name(p.get<std::string>()));
      }
      if (js.contains("noise"))
        sw.noise_sigmas = js["noise"].get<std::vector<double>>();
      r.sweeps.push_back(std::move(sw));
    }
    if (j.contains("normal")) {
      const auto& jn = j["normal"];
      r.normal_count = jn.value("count", 0);
      if (jn.contains("noise"))
        r.normal_noise = jn["noise"].get<std::vector<double>>();
      if (jn.contains("load_scales"))
        r.normal_load_scales = jn["load_scales"].get<std::vector<double>>();
      r.normal_duration = jn.value("duration", 0.0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("recipe field error: ") + e.what());
  }
  return r;
}

CorpusRecipe load_recipe(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ScenarioError("cannot open recipe: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_recipe_json(ss.str());
}

} // namespace hvdc::sim
