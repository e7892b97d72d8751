#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "doa/array_geometry.hpp"
#include "doa/scanner.hpp"
#include "doa/types.hpp"

namespace doa {

/// Common interface for everything the experiments compare. Implementations
/// must be safe to call concurrently.
class DoaEstimator {
 public:
  virtual ~DoaEstimator() = default;
  virtual std::string name() const = 0;
  /// `num_sources` is the true model order; estimators may ignore it.
  virtual std::vector<double> estimate(const CMatrix& covariance, int num_sources) const = 0;
};

/// Autoencoder + spatial scan. With `keep_strongest` it reports at most K
/// detections (the K largest gains).
class AeEstimator final : public DoaEstimator {
 public:
  AeEstimator(std::shared_ptr<const AeEstimatorCore> core, bool keep_strongest = true)
      : core_(std::move(core)), keep_strongest_(keep_strongest) {}
  std::string name() const override { return "ae"; }
  std::vector<double> estimate(const CMatrix& covariance, int num_sources) const override;

 private:
  std::shared_ptr<const AeEstimatorCore> core_;
  bool keep_strongest_;
};

class MusicEstimator final : public DoaEstimator {
 public:
  MusicEstimator(std::vector<double> grid, double spacing = 0.5)
      : grid_(std::move(grid)), spacing_(spacing) {}
  std::string name() const override { return "music"; }
  std::vector<double> estimate(const CMatrix& covariance, int num_sources) const override;

 private:
  std::vector<double> grid_;
  double spacing_;
};

class SsMusicEstimator final : public DoaEstimator {
 public:
  SsMusicEstimator(int subarray_len, std::vector<double> grid, double spacing = 0.5)
      : subarray_len_(subarray_len), grid_(std::move(grid)), spacing_(spacing) {}
  std::string name() const override { return "ssmusic"; }
  std::vector<double> estimate(const CMatrix& covariance, int num_sources) const override;

 private:
  int subarray_len_;
  std::vector<double> grid_;
  double spacing_;
};

struct AngleMatching {
  std::vector<std::pair<double, double>> pairs;  // (truth, estimate)
  std::vector<double> missed;                    // truths without an estimate
  std::vector<double> surplus;                   // estimates without a truth
};

/// Sort both lists and pair them by index.
AngleMatching match_angles(std::vector<double> estimated, std::vector<double> truth);

struct TrialResult {
  std::vector<double> truth;
  std::vector<double> estimated;
  std::vector<double> squared_errors;  // deg^2, one per matched pair
  int misses = 0;
  int surplus = 0;

  static TrialResult from(std::vector<double> truth, std::vector<double> estimated);
};

/// sqrt of the mean squared error over every matched pair of every trial.
/// Throws DomainError when nothing was matched.
double rmse(const std::vector<TrialResult>& trials);

/// Delta-method standard error of rmse(); 0 for a single pair.
double rmse_standard_error(const std::vector<TrialResult>& trials);

/// Number of truths in `truth` with a distinct estimate within `tolerance`,
/// assigned greedily nearest-first.
int count_hits(const std::vector<double>& truth, const std::vector<double>& estimated,
               double tolerance_deg);

/// Total hits over total truths.
double detection_probability(const std::vector<TrialResult>& trials, double tolerance_deg);

/// One synthetic source layout shared by every trial of an experiment.
struct SceneLayout {
  std::vector<double> angles_deg;
  bool coherent = true;
};

struct ExperimentConfig {
  std::vector<double> snr_db = {0.0, 5.0, 10.0, 15.0, 20.0};
  int trials = 100;
  int num_snapshots = 800;
  SceneLayout rmse_scene{{-15.0, -5.0}, true};
  /// One target every 15 degrees from -52.5 (a synthetic layout).
  SceneLayout detection_scene{{-52.5, -37.5, -22.5, -7.5, 7.5, 22.5, 37.5, 52.5}, true};
  double detection_snr_db = 10.0;
  double tolerance_deg = 2.0;
  std::uint64_t seed = 7;

  void validate() const;
};

/// Runs `trials` independent scenes through every estimator. Returns one
/// vector of TrialResult per estimator, in trial order.
std::vector<std::vector<TrialResult>> run_trials(const SceneLayout& layout, double snr_db,
                                                 int trials, int num_snapshots,
                                                 const ArraySetup& array,
                                                 const std::vector<const DoaEstimator*>& estimators,
                                                 std::uint64_t seed);

struct RmseRow {
  double snr_db = 0.0;
  std::string estimator;
  double rmse_deg = 0.0;  // NaN when no pair was matched
  int trials = 0;
  double se = 0.0;
};

struct DetectionRow {
  std::string estimator;
  double tolerance_deg = 0.0;
  double p_detect = 0.0;
  int trials = 0;
};

std::vector<RmseRow> run_rmse_vs_snr(const ExperimentConfig& cfg, const ArraySetup& array,
                                     const std::vector<const DoaEstimator*>& estimators);

std::vector<DetectionRow> run_detection_experiment(
    const ExperimentConfig& cfg, const ArraySetup& array,
    const std::vector<const DoaEstimator*>& estimators);

/// snr_db,estimator,rmse_deg,trials,se
void write_rmse_csv(const std::vector<RmseRow>& rows, const std::filesystem::path& path);
/// estimator,tolerance_deg,p_detect,trials
void write_detection_csv(const std::vector<DetectionRow>& rows, const std::filesystem::path& path);

}  // namespace doa
