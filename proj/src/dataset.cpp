#include "doa/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "binary_io.hpp"
#include "doa/covariance_features.hpp"
#include "doa/signal_sim.hpp"

namespace doa {

namespace {

constexpr char kDatasetMagic[9] = "DOADS001";

// Stream tags under the training seed.
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kShuffleStream = 3;

}  // namespace

SubregionPartition SubregionPartition::build(double theta_min, double theta_max,
                                             int num_regions) {
  if (!(theta_min < theta_max)) throw DomainError("partition range is empty or inverted");
  if (num_regions < 1) throw DomainError("partition needs at least one region");
  SubregionPartition p;
  p.boundaries.resize(num_regions + 1);
  const double span = theta_max - theta_min;
  for (int i = 0; i <= num_regions; ++i) {
    p.boundaries[i] = (theta_min * num_regions + i * span) / num_regions;
  }
  p.boundaries.back() = theta_max;
  return p;
}

int SubregionPartition::region_of(double theta_deg) const {
  if (!(theta_deg >= lower() && theta_deg <= upper())) {
    throw DomainError("angle " + std::to_string(theta_deg) + " outside partition [" +
                      std::to_string(lower()) + ", " + std::to_string(upper()) + "]");
  }
  const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), theta_deg);
  const int idx = static_cast<int>(it - boundaries.begin());
  return std::min(idx, num_regions());
}

void TrainingConfig::validate() const {
  if (num_samples < 1) throw ConfigError("training.num_samples must be positive");
  if (num_snapshots < 1) throw ConfigError("training.num_snapshots must be positive");
  if (snr_db.empty()) throw ConfigError("training.snr_db must not be empty");
  if (batch_size < 1 || batch_size > num_samples) {
    throw ConfigError("training.batch_size must lie in [1, num_samples]");
  }
  if (epochs < 1) throw ConfigError("training.epochs must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("training.learning_rate must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("training.rho must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("training.epsilon must be positive");
}

std::vector<double> training_angles(int num_samples, const SubregionPartition& partition) {
  if (num_samples < 1) throw DomainError("need at least one training angle");
  std::vector<double> angles(num_samples);
  const double lo = partition.lower();
  const double span = partition.upper() - lo;
  // Numerator first: exact on integer-valued bounds, so grid points land on the
  // region boundaries bit-exactly.
  for (int i = 1; i <= num_samples; ++i) {
    angles[i - 1] = (lo * num_samples + i * span) / num_samples;
  }
  return angles;
}

RVector make_label(const RVector& block, int region, int num_regions) {
  if (region < 1 || region > num_regions) throw DomainError("label region out of range");
  const Eigen::Index n = block.size();
  RVector y = RVector::Zero(n * num_regions);
  y.segment(n * (region - 1), n) = block;
  return y;
}

std::vector<TrainingSample> gen_training_set(const TrainingConfig& cfg, const ArraySetup& array,
                                             const SubregionPartition& partition) {
  cfg.validate();
  const std::vector<double> angles = training_angles(cfg.num_samples, partition);
  const SteeringFn true_steer = array.true_steering();
  const SteeringFn ideal_steer = array.nominal_steering();
  const int regions = partition.num_regions();
  const std::uint64_t base = derive_seed(cfg.seed, kSampleStream);

  std::vector<TrainingSample> samples(angles.size());
  const auto count = static_cast<std::ptrdiff_t>(angles.size());
  // Every sample owns its RNG stream, so the result is independent of scheduling.
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(base, static_cast<std::uint64_t>(i)));
    TrainingSample& s = samples[i];
    s.angle_deg = angles[i];
    s.region = partition.region_of(s.angle_deg);

    SourceScene scene;
    scene.angles_deg = {s.angle_deg};
    scene.snr_db = cfg.snr_db[static_cast<std::size_t>(i) % cfg.snr_db.size()];
    scene.num_snapshots = cfg.num_snapshots;
    s.input = covariance_features(simulate_covariance(scene, true_steer, rng),
                                  cfg.normalize_features);

    RVector block;
    switch (cfg.label_model) {
      case LabelModel::Ideal:
        block = make_template(s.angle_deg, ideal_steer);
        break;
      case LabelModel::Imperfect:
        block = make_template(s.angle_deg, true_steer);
        break;
      case LabelModel::Input:
        block = s.input;
        break;
    }
    s.label = make_label(block, s.region, regions);
  }
  return samples;
}

TrainResult train(const std::vector<TrainingSample>& samples, const NetworkSpec& spec,
                  const TrainingConfig& cfg, const EpochCallback& on_epoch) {
  Rng init_rng(derive_seed(cfg.seed, kInitStream));
  return train_from(init_network(spec, init_rng), samples, spec, cfg, on_epoch);
}

TrainResult train_from(NetworkParams initial, const std::vector<TrainingSample>& samples,
                       const NetworkSpec& spec, const TrainingConfig& cfg,
                       const EpochCallback& on_epoch) {
  if (samples.empty()) throw DomainError("training set is empty");
  spec.validate();
  TrainingConfig effective = cfg;
  effective.batch_size = std::min<int>(cfg.batch_size, static_cast<int>(samples.size()));
  effective.num_samples = static_cast<int>(samples.size());
  effective.validate();

  const int n = spec.input_size();
  const int out = spec.output_size();
  const auto count = static_cast<Eigen::Index>(samples.size());
  RMatrix inputs(n, count);
  RMatrix labels(out, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (samples[i].input.size() != n || samples[i].label.size() != out) {
      throw DomainError("training sample " + std::to_string(i) + " does not fit the network");
    }
    inputs.col(i) = samples[i].input;
    labels.col(i) = samples[i].label;
  }

  TrainResult result;
  result.params = std::move(initial);
  RmspropState opt = RmspropState::for_params(result.params, cfg.learning_rate, cfg.rho,
                                              cfg.epsilon);
  Rng shuffle_rng(derive_seed(cfg.seed, kShuffleStream));
  std::vector<Eigen::Index> order(count);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  const Eigen::Index batch = effective.batch_size;
  RMatrix xb, yb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (Eigen::Index start = 0; start < count; start += batch) {
      const Eigen::Index b = std::min(batch, count - start);
      xb.resize(n, b);
      yb.resize(out, b);
      for (Eigen::Index j = 0; j < b; ++j) {
        xb.col(j) = inputs.col(order[start + j]);
        yb.col(j) = labels.col(order[start + j]);
      }
      const ForwardCache cache = forward_batch(result.params, spec, xb);
      loss_sum += batch_loss(yb, cache.output()) * static_cast<double>(b);
      const NetworkParams grads = backward(result.params, spec, cache, yb);
      rmsprop_step(result.params, grads, opt);
    }
    const double mean_loss = loss_sum / static_cast<double>(count);
    if (!std::isfinite(mean_loss) || !result.params.all_finite()) {
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                            " (mean loss " + std::to_string(mean_loss) + ")");
    }
    result.loss_history.push_back(mean_loss);
    if (on_epoch) on_epoch(epoch + 1, mean_loss);
  }
  return result;
}

void save_dataset(const std::vector<TrainingSample>& samples, int num_regions,
                  const std::filesystem::path& path) {
  if (samples.empty()) throw DomainError("refusing to write an empty dataset");
  const auto n = samples.front().input.size();
  detail::ByteWriter w;
  w.raw(kDatasetMagic, 8);
  w.u32(static_cast<std::uint32_t>(samples.size()));
  w.u32(static_cast<std::uint32_t>(n));
  w.u32(static_cast<std::uint32_t>(num_regions));
  const std::size_t body_start = w.size();
  for (const auto& s : samples) {
    if (s.input.size() != n || s.label.size() != n * num_regions) {
      throw DomainError("dataset samples have inconsistent lengths");
    }
    w.f64(s.angle_deg);
    w.f64(static_cast<double>(s.region));
    for (Eigen::Index i = 0; i < n; ++i) w.f64(s.input(i));
    for (Eigen::Index i = 0; i < s.label.size(); ++i) w.f64(s.label(i));
  }
  auto& bytes = w.bytes();
  w.u32(detail::crc32_of(bytes.data() + body_start, bytes.size() - body_start));
  detail::write_file(path, w.bytes());
}

std::vector<TrainingSample> load_dataset(const std::filesystem::path& path) {
  constexpr const char* what = "dataset file";
  const std::vector<std::uint8_t> bytes = detail::read_file(path);
  detail::check_magic(bytes, kDatasetMagic, what);
  detail::ByteReader r(bytes, bytes.size(), what);
  char magic[8];
  r.raw(magic, 8);
  const std::uint32_t count = r.u32();
  const std::uint32_t n = r.u32();
  const std::uint32_t regions = r.u32();
  if (count == 0 || n == 0 || regions == 0 || n > (1u << 24) || regions > 4096) {
    throw FormatError("dataset file: corrupt header");
  }
  const std::size_t body_start = r.position();
  const std::size_t record = 8ull * (2 + n + static_cast<std::size_t>(n) * regions);
  const std::size_t body_len = record * count;
  if (bytes.size() < body_start + body_len + 4) throw TruncatedError("dataset file: truncated");
  if (bytes.size() > body_start + body_len + 4) {
    throw FormatError("dataset file: trailing bytes after checksum");
  }
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body_start + body_len, 4);
  if (detail::crc32_of(bytes.data() + body_start, body_len) != stored) {
    throw ChecksumError("dataset file: CRC-32 mismatch");
  }
  std::vector<TrainingSample> samples(count);
  for (auto& s : samples) {
    s.angle_deg = r.f64();
    s.region = static_cast<int>(r.f64());
    s.input.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) s.input(i) = r.f64();
    s.label.resize(static_cast<Eigen::Index>(n) * regions);
    for (Eigen::Index i = 0; i < s.label.size(); ++i) s.label(i) = r.f64();
  }
  return samples;
}

}  // namespace doa
