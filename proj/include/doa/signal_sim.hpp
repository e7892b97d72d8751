#pragma once

#include <optional>
#include <vector>

#include "doa/types.hpp"

namespace doa {

/// Multipath replica weight: x_k(t) = amplitude * exp(j phase) * x_1(t).
struct CoherencePath {
  double amplitude = 1.0;
  double phase = 0.0;  // radians

  cplx coefficient() const { return std::polar(amplitude, phase); }
};

/// K far-field sources observed over N snapshots.
///
/// Without `coherence` the K waveforms are independent. With it, every source
/// is a scaled, phase-shifted copy of the first one. `snr_db` is the per-source
/// (unit) power over the per-element noise power; +inf disables noise.
struct SourceScene {
  std::vector<double> angles_deg;
  std::optional<std::vector<CoherencePath>> coherence;
  double snr_db = 10.0;
  int num_snapshots = 800;

  int num_sources() const { return static_cast<int>(angles_deg.size()); }
  void validate() const;
};

/// sigma^2 = 10^(-snr_db/10); 0 for snr_db = +inf.
double noise_variance(double snr_db);

/// Reference path (1, 0) followed by K-1 paths with amplitude ~ U[0.5, 1] and
/// phase ~ U[0, 2 pi).
std::vector<CoherencePath> random_coherence(int num_sources, Rng& rng);

/// K x N source waveforms, unit-power circular complex Gaussian.
CMatrix gen_waveforms(const SourceScene& scene, Rng& rng);

/// M x N snapshot matrix Z = A X + W.
CMatrix synthesize_snapshots(const SourceScene& scene, const SteeringFn& steering,
                             Rng& rng);

/// (1/N) Z Z^H, Hermitian-symmetrized.
CMatrix sample_covariance(const CMatrix& snapshots);

/// sum_k p_k a_k a_k^H + sigma^2 I for independent sources. An empty angle
/// list gives sigma^2 I of size `num_elements`.
CMatrix ideal_covariance(const std::vector<double>& angles_deg,
                         const std::vector<double>& powers, double sigma2,
                         const SteeringFn& steering, int num_elements);

/// b b^H + sigma^2 I with b = sum_k c_k a_k, for one coherent group.
CMatrix ideal_coherent_covariance(const std::vector<double>& angles_deg,
                                  const std::vector<CoherencePath>& coherence,
                                  double sigma2, const SteeringFn& steering);

/// Convenience: synthesize then estimate the sample covariance.
CMatrix simulate_covariance(const SourceScene& scene, const SteeringFn& steering,
                            Rng& rng);

}  // namespace doa
