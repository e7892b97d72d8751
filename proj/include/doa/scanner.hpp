#pragma once

#include <filesystem>
#include <vector>

#include "doa/array_geometry.hpp"
#include "doa/autoencoder.hpp"
#include "doa/dataset.hpp"
#include "doa/types.hpp"

namespace doa {

enum class TemplateModel { Ideal, Imperfect };

struct ScanConfig {
  double step_deg = 0.1;
  double threshold = 0.3;
  TemplateModel templates = TemplateModel::Ideal;
  /// Keep only peaks of decoder j that fall inside region j (plus one grid step).
  bool restrict_to_region = true;
  bool normalize_features = true;

  void validate() const;
};

/// Unit-norm complex signatures r(theta) for every angle of a scan grid.
/// Row i of `templates` belongs to `angles[i]`.
class TemplateBank {
 public:
  TemplateBank(const SteeringFn& steering, double lower_deg, double upper_deg, double step_deg);

  const std::vector<double>& angles() const { return angles_; }
  const CMatrix& templates() const { return templates_; }
  double step() const { return step_; }
  std::size_t size() const { return angles_.size(); }

 private:
  std::vector<double> angles_;
  CMatrix templates_;
  double step_;
};

/// Inclusive grid lower, lower + step, ..., upper.
std::vector<double> scan_grid(double lower_deg, double upper_deg, double step_deg);

struct GainCurve {
  int decoder = 0;  // 1-based
  std::vector<double> angles;
  RVector gains;
};

struct Detection {
  double angle_deg = 0.0;
  double gain = 0.0;
  int decoder = 0;
};

/// Detected peaks sorted by angle.
struct DoaEstimate {
  std::vector<Detection> detections;

  std::vector<double> angles() const;
  bool empty() const { return detections.empty(); }
};

/// Forward pass, split into J blocks, each converted back to complex form.
std::vector<CVector> decoder_outputs(const NetworkParams& params, const NetworkSpec& spec,
                                     const FeatureVector& input);

/// g(theta) = |r(theta)^H y| over the bank's grid.
GainCurve gain_response(const CVector& decoder_out, const TemplateBank& bank, int decoder = 0);

/// Local maxima (strictly above both neighbours, leftmost point of a flat top)
/// with gain >= threshold, gathered across decoders.
DoaEstimate detect_peaks(const std::vector<GainCurve>& curves, const SubregionPartition& partition,
                         const ScanConfig& cfg);

struct ScanResult {
  std::vector<GainCurve> curves;
  DoaEstimate estimate;
};

/// Trained autoencoder plus everything needed to scan its output.
class AeEstimatorCore {
 public:
  AeEstimatorCore(NetworkParams params, NetworkSpec spec, const ArraySetup& array,
                  SubregionPartition partition, ScanConfig cfg);

  /// features -> decoders -> gain curves -> thresholded peaks.
  ScanResult scan(const CMatrix& covariance) const;
  DoaEstimate estimate_doa(const CMatrix& covariance) const { return scan(covariance).estimate; }

  const NetworkSpec& spec() const { return spec_; }
  const NetworkParams& params() const { return params_; }
  const ScanConfig& config() const { return cfg_; }
  const SubregionPartition& partition() const { return partition_; }
  const TemplateBank& bank() const { return bank_; }

 private:
  NetworkParams params_;
  NetworkSpec spec_;
  SubregionPartition partition_;
  ScanConfig cfg_;
  TemplateBank bank_;
};

/// angle_deg,g1,...,gJ with one row per grid point.
void write_gains_csv(const std::vector<GainCurve>& curves, const std::filesystem::path& path);

}  // namespace doa
