#include "doa/signal_sim.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace doa {

namespace {

cplx complex_gaussian(Rng& rng, double variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

}  // namespace

void SourceScene::validate() const {
  if (angles_deg.empty()) throw DomainError("scene needs at least one source");
  for (double a : angles_deg) {
    if (!(a > -90.0 && a < 90.0)) {
      throw DomainError("source angle outside (-90, 90): " + std::to_string(a));
    }
  }
  if (num_snapshots < 1) throw DomainError("scene needs at least one snapshot");
  if (std::isnan(snr_db)) throw DomainError("SNR is NaN");
  if (coherence) {
    if (coherence->size() != angles_deg.size()) {
      throw DomainError("coherence list length must equal the source count");
    }
    for (const auto& path : *coherence) {
      if (!(path.amplitude > 0.0)) throw DomainError("path amplitude must be positive");
    }
  }
}

double noise_variance(double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return std::pow(10.0, -snr_db / 10.0);
}

std::vector<CoherencePath> random_coherence(int num_sources, Rng& rng) {
  std::uniform_real_distribution<double> amp(0.5, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::vector<CoherencePath> paths;
  paths.reserve(num_sources);
  paths.push_back({1.0, 0.0});
  for (int k = 1; k < num_sources; ++k) {
    const double g = amp(rng);
    const double phi = phase(rng);
    paths.push_back({g, phi});
  }
  return paths;
}

CMatrix gen_waveforms(const SourceScene& scene, Rng& rng) {
  scene.validate();
  const int k = scene.num_sources();
  const int n = scene.num_snapshots;
  CMatrix x(k, n);
  if (scene.coherence) {
    CVector base(n);
    for (int t = 0; t < n; ++t) base(t) = complex_gaussian(rng, 1.0);
    for (int s = 0; s < k; ++s) {
      x.row(s) = (*scene.coherence)[s].coefficient() * base.transpose();
    }
  } else {
    for (int s = 0; s < k; ++s) {
      for (int t = 0; t < n; ++t) x(s, t) = complex_gaussian(rng, 1.0);
    }
  }
  return x;
}

CMatrix synthesize_snapshots(const SourceScene& scene, const SteeringFn& steering,
                             Rng& rng) {
  const CMatrix x = gen_waveforms(scene, rng);
  const int k = scene.num_sources();
  const CVector first = steering(scene.angles_deg[0]);
  const Eigen::Index m = first.size();
  CMatrix a(m, k);
  a.col(0) = first;
  for (int s = 1; s < k; ++s) {
    CVector col = steering(scene.angles_deg[s]);
    if (col.size() != m) throw DomainError("steering vectors disagree in length");
    a.col(s) = col;
  }

  CMatrix z = a * x;
  const double sigma2 = noise_variance(scene.snr_db);
  if (sigma2 > 0.0) {
    for (Eigen::Index t = 0; t < z.cols(); ++t) {
      for (Eigen::Index i = 0; i < m; ++i) z(i, t) += complex_gaussian(rng, sigma2);
    }
  }
  return z;
}

CMatrix sample_covariance(const CMatrix& snapshots) {
  if (snapshots.cols() < 1) throw DomainError("covariance needs at least one snapshot");
  CMatrix r = snapshots * snapshots.adjoint();
  r /= static_cast<double>(snapshots.cols());
  CMatrix sym = 0.5 * (r + r.adjoint());
  return sym;
}

CMatrix ideal_covariance(const std::vector<double>& angles_deg,
                         const std::vector<double>& powers, double sigma2,
                         const SteeringFn& steering, int num_elements) {
  if (angles_deg.size() != powers.size()) {
    throw DomainError("angle and power lists differ in length");
  }
  if (sigma2 < 0.0) throw DomainError("noise power must be non-negative");
  CMatrix r = CMatrix::Identity(num_elements, num_elements) * sigma2;
  for (std::size_t k = 0; k < angles_deg.size(); ++k) {
    if (powers[k] < 0.0) throw DomainError("source power must be non-negative");
    const CVector a = steering(angles_deg[k]);
    if (a.size() != num_elements) throw DomainError("steering length mismatch");
    r.noalias() += powers[k] * (a * a.adjoint());
  }
  return r;
}

CMatrix ideal_coherent_covariance(const std::vector<double>& angles_deg,
                                  const std::vector<CoherencePath>& coherence,
                                  double sigma2, const SteeringFn& steering) {
  if (angles_deg.empty() || angles_deg.size() != coherence.size()) {
    throw DomainError("coherent group needs matching non-empty angle/path lists");
  }
  if (sigma2 < 0.0) throw DomainError("noise power must be non-negative");
  CVector b = coherence[0].coefficient() * steering(angles_deg[0]);
  for (std::size_t k = 1; k < angles_deg.size(); ++k) {
    b += coherence[k].coefficient() * steering(angles_deg[k]);
  }
  CMatrix r = b * b.adjoint();
  r.diagonal().array() += sigma2;
  return r;
}

CMatrix simulate_covariance(const SourceScene& scene, const SteeringFn& steering,
                            Rng& rng) {
  return sample_covariance(synthesize_snapshots(scene, steering, rng));
}

}  // namespace doa
