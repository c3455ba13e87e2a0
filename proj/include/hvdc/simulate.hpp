#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hvdc/grid.hpp"
#include "hvdc/types.hpp"

namespace hvdc::sim {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs one scenario end to end: dc operating point, settle check, fault
/// insertion at the nearest section boundary, 50 kHz decimation, labeling
/// and (optional) per-unit Gaussian noise per the scenario seed.
WaveformRecord run_scenario(const ScenarioSpec& spec,
                            const GridTopology& topo = {},
                            const CableModel& cable = {},
                            const SimConfig& cfg = {});

/// A single-scenario config file (JSON) as consumed by the CLI.
struct ScenarioFile {
  ScenarioSpec spec;
  double section_km = 10.0;
};

ScenarioFile parse_scenario_json(const std::string& json_text);
ScenarioFile load_scenario(const std::filesystem::path& path);

/// One fault sweep dimension of a corpus recipe.
struct FaultSweep {
  FaultType type = FaultType::p2p;
  LineId remote_line = LineId::L14; // external sweeps only
  std::vector<double> locations_km;
  std::vector<double> impedances_ohm{0.0};
  std::vector<Pole> poles{Pole::positive};
  std::vector<double> noise_sigmas{0.0};
};

struct CorpusRecipe {
  LineId line = LineId::L13;
  std::uint64_t seed = 1;
  double t_fault = 0.02;
  double duration = 0.04;
  double section_km = 5.0;
  std::vector<FaultSweep> sweeps;
  int normal_count = 0;
  std::vector<double> normal_noise{0.0};
  std::vector<double> normal_load_scales{1.0};
  double normal_duration = 0.0; // 0 -> use `duration`

  /// Expands the sweeps into fully-specified scenarios, sorted.
  std::vector<ScenarioSpec> expand() const;
};

CorpusRecipe parse_recipe_json(const std::string& json_text);
CorpusRecipe load_recipe(const std::filesystem::path& path);

/// Deterministic given the recipe seed; scenarios may run in parallel and
/// are merged in sorted order.
std::vector<WaveformRecord> gen_corpus(const CorpusRecipe& recipe,
                                       const GridTopology& topo = {},
                                       int threads = 0);

/// Writes one waveform CSV per record plus the corpus manifest CSV.
void write_corpus(const std::filesystem::path& dir,
                  const std::vector<WaveformRecord>& corpus);
std::vector<WaveformRecord> load_corpus(const std::filesystem::path& dir);

} // namespace hvdc::sim
