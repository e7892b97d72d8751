#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "doa/array_geometry.hpp"
#include "doa/autoencoder.hpp"
#include "doa/dataset.hpp"
#include "doa/evaluation.hpp"
#include "doa/scanner.hpp"
#include "doa/signal_sim.hpp"

namespace doa {

/// Test scene for the scan / music / ssmusic commands.
struct SceneConfig {
  std::vector<double> angles_deg = {-15.0, -5.0};
  bool coherent = true;
  /// Explicit path weights; when absent, coherent scenes draw random ones.
  std::optional<std::vector<CoherencePath>> paths;
  double snr_db = 10.0;
  int num_snapshots = 800;
};

struct BaselineConfig {
  int subarray_len = 14;
  double grid_step_deg = 0.1;
  double grid_min_deg = -60.0;
  double grid_max_deg = 60.0;
  bool log10_spectrum = false;
};

/// Everything a CLI run needs. Parsed from JSON; every section and key is
/// optional, unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 1;
  bool deterministic = true;
  int threads = 0;

  ArrayConfig array;
  cplx gamma = ImperfectionModel::default_gamma();
  ImperfectionWeights imperfections = ImperfectionWeights::full();
  double partition_min_deg = -60.0;
  double partition_max_deg = 60.0;
  int num_regions = 6;
  Activation activation = Activation::Tanh;

  TrainingConfig training;
  ScanConfig scan;
  ExperimentConfig experiment;
  SceneConfig scene;
  BaselineConfig baseline;
  std::vector<std::string> estimators = {"ae", "music", "ssmusic"};

  std::filesystem::path model_path;    // empty: <out_dir>/model.doaae
  std::filesystem::path dataset_path;  // empty: no dataset cache
  std::filesystem::path out_dir = ".";

  /// Sets the master seed and the training / experiment seeds derived from it.
  void set_seed(std::uint64_t master);

  void validate() const;

  ArraySetup array_setup() const;
  SubregionPartition partition() const;
  NetworkSpec network_spec() const;
  std::vector<double> baseline_grid() const;
};

/// Throws ConfigError with the offending key path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of the full configuration, defaults included.
std::string dump_config(const RunConfig& cfg);

}  // namespace doa
