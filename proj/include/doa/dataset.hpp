#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "doa/array_geometry.hpp"
#include "doa/autoencoder.hpp"
#include "doa/types.hpp"

namespace doa {

/// J equal-width angular regions between boundaries[0] and boundaries[J].
/// Region j (1-based) is [boundaries[j-1], boundaries[j]); the last region is
/// closed on the right.
struct SubregionPartition {
  std::vector<double> boundaries;

  static SubregionPartition build(double theta_min, double theta_max, int num_regions);
  static SubregionPartition standard() { return build(-60.0, 60.0, 6); }

  int num_regions() const { return static_cast<int>(boundaries.size()) - 1; }
  double lower() const { return boundaries.front(); }
  double upper() const { return boundaries.back(); }
  double width() const { return (upper() - lower()) / num_regions(); }

  /// 1-based region index; DomainError outside [lower, upper].
  int region_of(double theta_deg) const;
};

/// What the decoder block of a training label contains.
enum class LabelModel {
  Ideal,      // noise-free signature of the imperfection-free array
  Imperfect,  // noise-free signature of the imperfect array
  Input,      // the (noisy) input features themselves
};

struct TrainingConfig {
  int num_samples = 1200;
  int num_snapshots = 800;
  /// Samples cycle through this list; one entry means a fixed training SNR.
  std::vector<double> snr_db = {10.0};
  int batch_size = 100;
  int epochs = 1000;
  double learning_rate = 1e-3;
  double rho = 0.9;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
  bool normalize_features = true;
  LabelModel label_model = LabelModel::Ideal;

  void validate() const;
};

struct TrainingSample {
  FeatureVector input;
  RVector label;
  double angle_deg = 0.0;
  int region = 0;
};

/// theta_i = lower + i * (upper - lower) / I, i = 1..I. At the defaults this is
/// the 0.1 degree grid -59.9, -59.8, ..., 60.0.
std::vector<double> training_angles(int num_samples, const SubregionPartition& partition);

/// Block-sparse label: `block` in decoder slot `region`, zeros elsewhere.
RVector make_label(const RVector& block, int region, int num_regions);

std::vector<TrainingSample> gen_training_set(const TrainingConfig& cfg, const ArraySetup& array,
                                             const SubregionPartition& partition);

struct TrainResult {
  NetworkParams params;
  std::vector<double> loss_history;  // mean per-sample loss of each epoch
};

/// Called after every epoch with the 1-based epoch number.
using EpochCallback = std::function<void(int epoch, double mean_loss)>;

/// Mini-batch RMSProp over the samples, reshuffled every epoch.
/// Throws DivergenceError as soon as an epoch loss is not finite.
TrainResult train(const std::vector<TrainingSample>& samples, const NetworkSpec& spec,
                  const TrainingConfig& cfg, const EpochCallback& on_epoch = {});

/// Same, starting from the given parameters instead of a fresh initialization.
TrainResult train_from(NetworkParams initial, const std::vector<TrainingSample>& samples,
                       const NetworkSpec& spec, const TrainingConfig& cfg,
                       const EpochCallback& on_epoch = {});

// Dataset cache: "DOADS001", u32 count, u32 n, u32 J, then per sample the
// f64 record [angle, region, input(n), label(J n)], then CRC-32 of the records.
void save_dataset(const std::vector<TrainingSample>& samples, int num_regions,
                  const std::filesystem::path& path);
std::vector<TrainingSample> load_dataset(const std::filesystem::path& path);

}  // namespace doa
