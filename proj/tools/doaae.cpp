// doaae: train the subregion autoencoder, scan scenes, run the baselines and
// the Monte Carlo experiments. Every output is a plain CSV.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "doa/config.hpp"
#include "doa/covariance_features.hpp"
#include "doa/kernels.hpp"
#include "doa/subspace.hpp"

namespace fs = std::filesystem;
using namespace doa;

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kConfig = 3,
  kDivergence = 4,
  kIo = 5,
  kFormat = 6,
  kDomain = 7,
  kInternal = 10,
};

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  int threads = 0;
  std::string out;
  std::string model;
  std::string dataset;
  std::vector<double> angles;
  std::optional<double> snr;
  bool uncorrelated = false;
};

RunConfig resolve(const CommonOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.config.empty()) cfg.set_seed(cfg.seed);
  if (o.seed) cfg.set_seed(*o.seed);
  if (o.deterministic) cfg.deterministic = true;
  if (o.threads > 0) cfg.threads = o.threads;
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (!o.model.empty()) cfg.model_path = o.model;
  if (!o.dataset.empty()) cfg.dataset_path = o.dataset;
  if (!o.angles.empty()) {
    cfg.scene.angles_deg = o.angles;
    if (cfg.scene.paths && cfg.scene.paths->size() != o.angles.size()) cfg.scene.paths.reset();
  }
  if (o.snr) cfg.scene.snr_db = *o.snr;
  if (o.uncorrelated) cfg.scene.coherent = false;
  cfg.validate();

  kernels::set_deterministic(cfg.deterministic);
  kernels::set_num_threads(cfg.threads);
  return cfg;
}

void require_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  if (!fs::is_directory(cfg.out_dir, ec)) {
    throw IoError("output directory '" + cfg.out_dir.string() + "' does not exist");
  }
  const fs::path probe = cfg.out_dir / ".doaae_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory '" + cfg.out_dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

fs::path model_file(const RunConfig& cfg) {
  return cfg.model_path.empty() ? cfg.out_dir / "model.doaae" : cfg.model_path;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<TrainingSample> obtain_dataset(const RunConfig& cfg, const ArraySetup& array,
                                           const SubregionPartition& partition) {
  if (!cfg.dataset_path.empty() && fs::exists(cfg.dataset_path)) {
    std::cerr << "loading dataset " << cfg.dataset_path << "\n";
    auto samples = load_dataset(cfg.dataset_path);
    const int n = feature_length(cfg.array.num_elements);
    if (samples.empty() || samples.front().input.size() != n ||
        samples.front().label.size() != static_cast<Eigen::Index>(n) * cfg.num_regions) {
      throw ConfigError("dataset shape does not match the configured array / partition");
    }
    return samples;
  }
  return gen_training_set(cfg.training, array, partition);
}

SourceScene make_scene(const RunConfig& cfg, Rng& rng) {
  SourceScene scene;
  scene.angles_deg = cfg.scene.angles_deg;
  scene.snr_db = cfg.scene.snr_db;
  scene.num_snapshots = cfg.scene.num_snapshots;
  if (cfg.scene.coherent) {
    scene.coherence = cfg.scene.paths
                          ? *cfg.scene.paths
                          : random_coherence(static_cast<int>(scene.angles_deg.size()), rng);
  }
  return scene;
}

CMatrix scene_covariance(const RunConfig& cfg, const ArraySetup& array) {
  Rng path_rng(derive_seed(cfg.seed, 3));
  const SourceScene scene = make_scene(cfg, path_rng);
  Rng rng(derive_seed(cfg.seed, 4));
  return simulate_covariance(scene, array.true_steering(), rng);
}

std::shared_ptr<const AeEstimatorCore> load_core(const RunConfig& cfg, const ArraySetup& array) {
  const fs::path path = model_file(cfg);
  LoadedModel m = load_model(path);
  if (m.spec.input_size() != feature_length(cfg.array.num_elements) ||
      m.spec.num_decoders != cfg.num_regions) {
    throw ConfigError("model '" + path.string() + "' does not match the configured array (M=" +
                      std::to_string(cfg.array.num_elements) + ", J=" +
                      std::to_string(cfg.num_regions) + ")");
  }
  return std::make_shared<const AeEstimatorCore>(std::move(m.params), m.spec, array,
                                                 cfg.partition(), cfg.scan);
}

void print_angles(const char* label, const std::vector<double>& angles) {
  std::printf("%s", label);
  for (double a : angles) std::printf(" %.1f", a);
  std::printf("\n");
}

int cmd_train(const CommonOptions& o) {
  const RunConfig cfg = resolve(o);
  require_out_dir(cfg);
  const ArraySetup array = cfg.array_setup();
  const SubregionPartition partition = cfg.partition();
  const NetworkSpec spec = cfg.network_spec();

  const auto t0 = std::chrono::steady_clock::now();
  const auto samples = obtain_dataset(cfg, array, partition);
  std::cerr << "training " << samples.size() << " samples, network";
  for (int s : spec.layer_sizes) std::cerr << ' ' << s;
  std::cerr << ", " << cfg.training.epochs << " epochs\n";

  const int every = std::max(1, cfg.training.epochs / 20);
  const TrainResult result = train(samples, spec, cfg.training, [&](int epoch, double loss) {
    if (epoch == 1 || epoch % every == 0 || epoch == cfg.training.epochs) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::fprintf(stderr, "epoch %5d  loss %.6g  (%.0f s)\n", epoch, loss, secs);
    }
  });

  const fs::path model = model_file(cfg);
  save_model(result.params, spec, model);
  std::string csv = "epoch,mean_loss\n";
  char buf[64];
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e + 1, result.loss_history[e]);
    csv += buf;
  }
  write_text(cfg.out_dir / "loss_history.csv", csv);
  write_text(cfg.out_dir / "config_used.json", dump_config(cfg));
  std::printf("model written to %s (first loss %.6g, final loss %.6g)\n", model.c_str(),
              result.loss_history.front(), result.loss_history.back());
  return kOk;
}

int cmd_gen_data(const CommonOptions& o) {
  RunConfig cfg = resolve(o);
  require_out_dir(cfg);
  const auto samples = gen_training_set(cfg.training, cfg.array_setup(), cfg.partition());
  const fs::path path = cfg.dataset_path.empty() ? cfg.out_dir / "dataset.doads" : cfg.dataset_path;
  save_dataset(samples, cfg.num_regions, path);
  std::printf("%zu samples written to %s\n", samples.size(), path.c_str());
  return kOk;
}

int cmd_scan(const CommonOptions& o) {
  const RunConfig cfg = resolve(o);
  require_out_dir(cfg);
  const ArraySetup array = cfg.array_setup();
  const auto core = load_core(cfg, array);
  const ScanResult res = core->scan(scene_covariance(cfg, array));
  write_gains_csv(res.curves, cfg.out_dir / "gains.csv");
  if (res.estimate.empty()) {
    std::printf("no sources above threshold %.3g\n", cfg.scan.threshold);
  } else {
    std::printf("angle_deg  gain   decoder\n");
    for (const auto& d : res.estimate.detections) {
      std::printf("%9.1f  %.3f  %d\n", d.angle_deg, d.gain, d.decoder);
    }
  }
  return kOk;
}

int cmd_music(const CommonOptions& o, bool smoothed) {
  const RunConfig cfg = resolve(o);
  require_out_dir(cfg);
  const ArraySetup array = cfg.array_setup();
  const CMatrix r = scene_covariance(cfg, array);
  const int k = static_cast<int>(cfg.scene.angles_deg.size());
  const auto grid = cfg.baseline_grid();
  const double d = cfg.array.spacing_over_wavelength;
  const MusicResult res = smoothed ? ss_music(r, k, cfg.baseline.subarray_len, grid, d)
                                   : music(r, k, grid, d);
  const fs::path csv = cfg.out_dir / (smoothed ? "ssmusic_spectrum.csv" : "music_spectrum.csv");
  write_spectrum_csv(res.spectrum, cfg.baseline.log10_spectrum, csv);
  print_angles("estimates:", res.peaks.angles);
  if (res.degenerate()) {
    std::printf("degenerate: yes (%s)\n", res.peaks.degenerate
                                              ? "fewer local maxima than sources"
                                              : "signal subspace rank below source count");
  } else {
    std::printf("degenerate: no\n");
  }
  return kOk;
}

int cmd_bench(const CommonOptions& o) {
  const RunConfig cfg = resolve(o);
  require_out_dir(cfg);
  const ArraySetup array = cfg.array_setup();
  const auto grid = cfg.baseline_grid();
  const double d = cfg.array.spacing_over_wavelength;

  std::vector<std::unique_ptr<DoaEstimator>> owned;
  for (const auto& name : cfg.estimators) {
    if (name == "ae") {
      owned.push_back(std::make_unique<AeEstimator>(load_core(cfg, array)));
    } else if (name == "music") {
      owned.push_back(std::make_unique<MusicEstimator>(grid, d));
    } else {
      owned.push_back(std::make_unique<SsMusicEstimator>(cfg.baseline.subarray_len, grid, d));
    }
  }
  std::vector<const DoaEstimator*> estimators;
  for (const auto& e : owned) estimators.push_back(e.get());

  const auto rmse_rows = run_rmse_vs_snr(cfg.experiment, array, estimators);
  write_rmse_csv(rmse_rows, cfg.out_dir / "rmse_vs_snr.csv");
  for (const auto& r : rmse_rows) {
    std::printf("snr %5.1f dB  %-8s rmse %.4f deg\n", r.snr_db, r.estimator.c_str(), r.rmse_deg);
  }
  const auto det_rows = run_detection_experiment(cfg.experiment, array, estimators);
  write_detection_csv(det_rows, cfg.out_dir / "detection.csv");
  for (const auto& r : det_rows) {
    std::printf("%-8s p_detect %.4f (tolerance %.1f deg)\n", r.estimator.c_str(), r.p_detect,
                r.tolerance_deg);
  }
  return kOk;
}

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "master seed (overrides the config)");
  app->add_flag("--deterministic", o.deterministic, "bit-reproducible mode");
  app->add_option("--threads", o.threads, "worker thread cap (0: runtime default)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--out", o.out, "output directory (must exist)");
}

void add_scene(CLI::App* app, CommonOptions& o) {
  app->add_option("--angles", o.angles, "source angles in degrees, e.g. --angles=-15,-5")
      ->delimiter(',');
  app->add_option("--snr", o.snr, "scene SNR in dB");
  app->add_flag("--uncorrelated", o.uncorrelated, "independent source waveforms");
}

int run(int argc, char** argv) {
  CLI::App app{"Subregion autoencoder DOA estimation"};
  app.require_subcommand(1);
  CommonOptions o;

  auto* train = app.add_subcommand("train", "train the autoencoder; writes model + loss_history.csv");
  add_common(train, o);
  train->add_option("--model", o.model, "model output path");
  train->add_option("--dataset", o.dataset, "read the training set from this cache if present");

  auto* gen = app.add_subcommand("gen-data", "generate and cache the training set");
  add_common(gen, o);
  gen->add_option("--dataset", o.dataset, "dataset output path");

  auto* scan = app.add_subcommand("scan", "scan one scene with a trained model; writes gains.csv");
  add_common(scan, o);
  add_scene(scan, o);
  scan->add_option("--model", o.model, "model file");

  auto* bench = app.add_subcommand("bench", "RMSE-vs-SNR and detection experiments");
  add_common(bench, o);
  bench->add_option("--model", o.model, "model file (needed for the ae estimator)");

  auto* mus = app.add_subcommand("music", "MUSIC on one scene; writes music_spectrum.csv");
  add_common(mus, o);
  add_scene(mus, o);

  auto* ss = app.add_subcommand("ssmusic", "spatially smoothed MUSIC; writes ssmusic_spectrum.csv");
  add_common(ss, o);
  add_scene(ss, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (train->parsed()) return cmd_train(o);
  if (gen->parsed()) return cmd_gen_data(o);
  if (scan->parsed()) return cmd_scan(o);
  if (bench->parsed()) return cmd_bench(o);
  if (mus->parsed()) return cmd_music(o, false);
  return cmd_music(o, true);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "numeric divergence: %s\n", e.what());
    return kDivergence;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "numeric divergence: %s\n", e.what());
    return kDivergence;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIo;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "model/dataset format error: %s\n", e.what());
    return kFormat;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kDomain;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternal;
  }
}
