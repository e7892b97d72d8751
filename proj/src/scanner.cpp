#include "doa/scanner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "doa/covariance_features.hpp"
#include "doa/kernels.hpp"

namespace doa {

void ScanConfig::validate() const {
  if (!(step_deg > 0.0)) throw ConfigError("scan.step_deg must be positive");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("scan.threshold must lie in (0, 1]");
}

std::vector<double> scan_grid(double lower_deg, double upper_deg, double step_deg) {
  if (!(step_deg > 0.0) || !(lower_deg < upper_deg)) throw DomainError("invalid scan grid");
  const double span = upper_deg - lower_deg;
  const auto intervals = static_cast<long>(std::llround(span / step_deg));
  if (intervals < 1 || std::abs(intervals * step_deg - span) > 1e-9 * std::max(1.0, span)) {
    throw DomainError("scan step must divide the scan range");
  }
  std::vector<double> grid(intervals + 1);
  for (long i = 0; i <= intervals; ++i) {
    grid[i] = (lower_deg * static_cast<double>(intervals) + static_cast<double>(i) * span) /
              static_cast<double>(intervals);
  }
  return grid;
}

TemplateBank::TemplateBank(const SteeringFn& steering, double lower_deg, double upper_deg,
                           double step_deg)
    : angles_(scan_grid(lower_deg, upper_deg, step_deg)), step_(step_deg) {
  const CVector first = to_complex(make_template(angles_.front(), steering));
  templates_.resize(static_cast<Eigen::Index>(angles_.size()), first.size());
  templates_.row(0) = first.transpose();
  for (std::size_t i = 1; i < angles_.size(); ++i) {
    templates_.row(static_cast<Eigen::Index>(i)) =
        to_complex(make_template(angles_[i], steering)).transpose();
  }
}

std::vector<double> DoaEstimate::angles() const {
  std::vector<double> out;
  out.reserve(detections.size());
  for (const auto& d : detections) out.push_back(d.angle_deg);
  return out;
}

std::vector<CVector> decoder_outputs(const NetworkParams& params, const NetworkSpec& spec,
                                     const FeatureVector& input) {
  const RVector y = forward(params, spec, input);
  const Eigen::Index n = spec.block_size();
  std::vector<CVector> blocks;
  blocks.reserve(spec.num_decoders);
  for (int j = 0; j < spec.num_decoders; ++j) {
    blocks.push_back(to_complex(y.segment(n * j, n)));
  }
  return blocks;
}

GainCurve gain_response(const CVector& decoder_out, const TemplateBank& bank, int decoder) {
  GainCurve curve;
  curve.decoder = decoder;
  curve.angles = bank.angles();
  kernels::scan_gains_parallel(bank.templates(), decoder_out, curve.gains);
  return curve;
}

DoaEstimate detect_peaks(const std::vector<GainCurve>& curves, const SubregionPartition& partition,
                         const ScanConfig& cfg) {
  DoaEstimate est;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const GainCurve& curve = curves[c];
    const auto size = static_cast<Eigen::Index>(curve.angles.size());
    if (curve.gains.size() != size) throw DomainError("gain curve grid/value length mismatch");
    if (c > 0 && curve.angles != curves.front().angles) {
      throw DomainError("gain curves are not on the same grid");
    }
    const int decoder = curve.decoder > 0 ? curve.decoder : static_cast<int>(c) + 1;

    double lo = -INFINITY, hi = INFINITY;
    if (cfg.restrict_to_region && decoder <= partition.num_regions()) {
      const double slack = cfg.step_deg + 1e-9;
      lo = partition.boundaries[decoder - 1] - slack;
      hi = partition.boundaries[decoder] + slack;
    }

    Eigen::Index i = 1;
    while (i < size - 1) {
      // Extend over a flat top starting at i.
      Eigen::Index end = i;
      while (end + 1 < size && curve.gains(end + 1) == curve.gains(i)) ++end;
      const double g = curve.gains(i);
      const bool peak = end + 1 < size && g > curve.gains(i - 1) && g > curve.gains(end + 1);
      if (peak && g >= cfg.threshold) {
        const double angle = curve.angles[i];
        if (angle >= lo && angle <= hi) est.detections.push_back({angle, g, decoder});
      }
      i = end + 1;
    }
  }
  std::stable_sort(est.detections.begin(), est.detections.end(),
                   [](const Detection& a, const Detection& b) { return a.angle_deg < b.angle_deg; });
  return est;
}

AeEstimatorCore::AeEstimatorCore(NetworkParams params, NetworkSpec spec, const ArraySetup& array,
                                 SubregionPartition partition, ScanConfig cfg)
    : params_(std::move(params)),
      spec_(std::move(spec)),
      partition_(std::move(partition)),
      cfg_(cfg),
      bank_(cfg.templates == TemplateModel::Ideal ? array.nominal_steering()
                                                  : array.true_steering(),
            partition_.lower(), partition_.upper(), cfg.step_deg) {
  cfg_.validate();
  spec_.validate();
  const int m = array.num_elements();
  if (spec_.input_size() != m * (m - 1)) {
    throw DomainError("network input size does not match the array (expected " +
                      std::to_string(m * (m - 1)) + ")");
  }
  if (spec_.num_decoders != partition_.num_regions()) {
    throw DomainError("decoder count does not match the subregion count");
  }
}

ScanResult AeEstimatorCore::scan(const CMatrix& covariance) const {
  const FeatureVector x = covariance_features(covariance, cfg_.normalize_features);
  const std::vector<CVector> blocks = decoder_outputs(params_, spec_, x);
  ScanResult result;
  result.curves.reserve(blocks.size());
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    result.curves.push_back(gain_response(blocks[j], bank_, static_cast<int>(j) + 1));
  }
  result.estimate = detect_peaks(result.curves, partition_, cfg_);
  return result;
}

void write_gains_csv(const std::vector<GainCurve>& curves, const std::filesystem::path& path) {
  if (curves.empty()) throw DomainError("no gain curves to write");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "angle_deg";
  for (std::size_t j = 0; j < curves.size(); ++j) out << ",g" << (j + 1);
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < curves.front().angles.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.4f", curves.front().angles[i]);
    out << buf;
    for (const auto& c : curves) {
      std::snprintf(buf, sizeof buf, ",%.9g", c.gains(static_cast<Eigen::Index>(i)));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace doa
