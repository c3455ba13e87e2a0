#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "hvdc/bundle.hpp"
#include "hvdc/csvio.hpp"
#include "hvdc/eval.hpp"
#include "hvdc/network.hpp"
#include "hvdc/simulate.hpp"
#include "hvdc/train.hpp"

namespace fs = std::filesystem;
using namespace hvdc;

namespace {

constexpr const char* kToolVersion = "1.0.0";

// Exit codes are a stable contract: 0 success, 2 invalid input,
// 3 numerical failure, 4 degenerate data.
enum ExitCode { kOk = 0, kInvalidInput = 2, kNumericalFailure = 3,
                kDegenerateData = 4 };

std::uint64_t fnv1a_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::uint64_t h = 1469598103934665603ULL;
  char buf[4096];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i)
      h = (h ^ static_cast<unsigned char>(buf[i])) * 1099511628211ULL;
    if (is.eof()) break;
  }
  return h;
}

void write_run_manifest(const fs::path& out_dir, const std::string& command,
                        const fs::path& config, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config"] = config.string();
  j["seed"] = seed;
  j["out_dir"] = out_dir.string();
  j["tool_version"] = kToolVersion;
  j["input_hash"] = fnv1a_file(config);
  std::ofstream os(out_dir / "run_manifest.json", std::ios::binary);
  os << j.dump(2) << "\n";
}

int cmd_simulate(const fs::path& config, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed) {
  sim::ScenarioFile sf;
  try {
    sf = sim::load_scenario(config);
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kInvalidInput;
  }
  if (seed) sf.spec.seed = *seed;
  WaveformRecord rec;
  try {
    sim::CableModel cable;
    cable.section_km = sf.section_km;
    rec = sim::run_scenario(sf.spec, {}, cable);
  } catch (const sim::DivergenceError& e) {
    std::cerr << "simulation diverged: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kInvalidInput;
  }
  fs::create_directories(out_dir);
  std::string stem = sf.spec.id.empty() ? "waveform" : sf.spec.id;
  write_waveform_csv(out_dir / (stem + ".csv"), rec);
  write_run_manifest(out_dir, "simulate", config, sf.spec.seed);
  std::cout << "wrote " << (out_dir / (stem + ".csv")).string() << "\n";
  return kOk;
}

int cmd_corpus(const fs::path& recipe_path, const fs::path& out_dir,
               std::optional<std::uint64_t> seed, int threads) {
  sim::CorpusRecipe recipe;
  try {
    recipe = sim::load_recipe(recipe_path);
  } catch (const std::exception& e) {
    std::cerr << "invalid recipe: " << e.what() << "\n";
    return kInvalidInput;
  }
  if (seed) recipe.seed = *seed;
  std::vector<WaveformRecord> corpus;
  try {
    corpus = sim::gen_corpus(recipe, {}, threads);
  } catch (const sim::DivergenceError& e) {
    std::cerr << "simulation diverged: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return kInvalidInput;
  }
  sim::write_corpus(out_dir, corpus);
  write_run_manifest(out_dir, "corpus", recipe_path, recipe.seed);
  std::cout << "wrote " << corpus.size() << " records to " << out_dir.string()
            << "\n";
  return kOk;
}

int cmd_train(const fs::path& corpus_dir, const fs::path& out_path,
              std::uint64_t seed) {
  std::vector<WaveformRecord> corpus;
  try {
    corpus = sim::load_corpus(corpus_dir);
  } catch (const std::exception& e) {
    std::cerr << "cannot load corpus: " << e.what() << "\n";
    return kInvalidInput;
  }
  ModelBundle bundle;
  try {
    bundle = learn::train_bundle(corpus, det::default_pool_configs(), 50e3,
                                 seed, {2, 3, 4}, &std::cout);
  } catch (const learn::DegenerateCorpusError& e) {
    std::cerr << "degenerate corpus: " << e.what() << "\n";
    return kDegenerateData;
  }
  bundle.save(out_path);
  std::cout << "wrote " << out_path.string() << "\n";
  return kOk;
}

int cmd_detect(const fs::path& bundle_path, const fs::path& waveform,
               const fs::path& out_path) {
  ModelBundle bundle;
  WaveformRecord rec;
  try {
    bundle = ModelBundle::load(bundle_path);
    rec.frames = read_waveform_csv(waveform);
  } catch (const std::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  }
  if (rec.frames.empty()) {
    std::cerr << "invalid input: waveform has no frames\n";
    return kInvalidInput;
  }
  auto trip = learn::run_relay(rec, bundle.cluster_model, bundle.weight_table,
                               bundle.detector_configs);
  std::ofstream os(out_path, std::ios::binary);
  os << "t,breaker,h,cluster,d1,d2,d3,d4\n";
  if (trip) {
    os << format_double(trip->t) << ',' << trip->breaker << ','
       << format_double(trip->h) << ',' << trip->cluster;
    for (int d : trip->contributing) os << ',' << d;
    os << '\n';
    std::cout << "trip at t=" << trip->t << " h=" << trip->h << "\n";
  } else {
    std::cout << "no trip\n";
  }
  return kOk;
}

int cmd_evaluate(const fs::path& bundle_path, const fs::path& corpus_dir,
                 const fs::path& out_dir, double noise_sigma,
                 std::uint64_t noise_seed) {
  ModelBundle bundle;
  std::vector<WaveformRecord> corpus;
  try {
    bundle = ModelBundle::load(bundle_path);
    corpus = sim::load_corpus(corpus_dir);
  } catch (const std::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  }
  if (noise_sigma > 0.0)
    for (std::size_t i = 0; i < corpus.size(); ++i)
      corpus[i] = inject_noise(corpus[i], noise_sigma, noise_seed + i);

  fs::create_directories(out_dir);
  try {
    auto report = eval::evaluate_corpus(bundle, corpus);
    eval::write_report_csv(out_dir / "report.csv", report);
    std::vector<eval::RocCurve> curves;
    for (int n = 0; n < static_cast<int>(bundle.detector_configs.size()); ++n)
      curves.push_back(eval::roc_detector(corpus, bundle, n));
    curves.push_back(eval::roc_hybrid(corpus, bundle));
    for (const auto& c : curves) {
      eval::write_roc_csv(out_dir / ("roc_" + c.subject + ".csv"), c);
      std::cout << "AUC " << c.subject << ": " << c.auc << "\n";
    }
    for (const auto& [k, v] : report.rows())
      std::cout << k << ": " << v << "\n";
  } catch (const eval::MetricError& e) {
    std::cerr << "degenerate corpus: " << e.what() << "\n";
    return kDegenerateData;
  }
  write_run_manifest(out_dir, "evaluate", corpus_dir / "manifest.csv", 0);
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid dc fault primary protection toolkit for a "
               "four-terminal HVdc grid"};
  app.require_subcommand(1);

  std::string config, out = "out", bundle, corpus_dir, waveform;
  std::optional<std::uint64_t> seed_opt;
  std::uint64_t seed = 1;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 7;
  int threads = 0;

  auto* sim_cmd = app.add_subcommand("simulate", "Run one fault scenario");
  sim_cmd->add_option("config", config, "scenario JSON")->required();
  sim_cmd->add_option("--out", out, "output directory");
  sim_cmd->add_option("--seed", seed_opt, "override scenario seed");

  auto* corpus_cmd = app.add_subcommand("corpus", "Generate a labeled corpus");
  corpus_cmd->add_option("recipe", config, "corpus recipe JSON")->required();
  corpus_cmd->add_option("--out", out, "output directory");
  corpus_cmd->add_option("--seed", seed_opt, "override recipe seed");
  corpus_cmd->add_option("--threads", threads, "worker threads (0 = auto)");

  auto* train_cmd = app.add_subcommand("train", "Train a model bundle");
  train_cmd->add_option("corpus", corpus_dir, "corpus directory")->required();
  train_cmd->add_option("--out", out, "bundle output path");
  train_cmd->add_option("--seed", seed, "training seed");

  auto* detect_cmd = app.add_subcommand("detect", "Run the relay on a waveform");
  detect_cmd->add_option("bundle", bundle, "model bundle JSON")->required();
  detect_cmd->add_option("waveform", waveform, "waveform CSV")->required();
  detect_cmd->add_option("--out", out, "trip log CSV path");

  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a bundle on a corpus");
  eval_cmd->add_option("bundle", bundle, "model bundle JSON")->required();
  eval_cmd->add_option("corpus", corpus_dir, "corpus directory")->required();
  eval_cmd->add_option("--out", out, "output directory");
  eval_cmd->add_option("--noise", noise_sigma, "per-unit Gaussian noise std");
  eval_cmd->add_option("--noise-seed", noise_seed, "noise seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim_cmd->parsed())
      return cmd_simulate(config, out, seed_opt);
    if (corpus_cmd->parsed()) return cmd_corpus(config, out, seed_opt, threads);
    if (train_cmd->parsed())
      return cmd_train(corpus_dir,
                       out == "out" ? fs::path("bundle.json") : fs::path(out),
                       seed);
    if (detect_cmd->parsed())
      return cmd_detect(bundle, waveform,
                        out == "out" ? fs::path("triplog.csv") : fs::path(out));
    if (eval_cmd->parsed())
      return cmd_evaluate(bundle, corpus_dir, out, noise_sigma, noise_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kOk;
}
