#include "doa/array_geometry.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace doa {

namespace {

void check_angle(double theta_deg) {
  if (!(theta_deg > -90.0 && theta_deg < 90.0)) {
    throw DomainError("angle must lie strictly inside (-90, 90) degrees, got " +
                      std::to_string(theta_deg));
  }
}

void check_weight(double w, const char* name) {
  if (!(w >= 0.0 && w <= 1.0)) {
    throw DomainError(std::string("imperfection weight '") + name +
                      "' must lie in [0, 1]");
  }
}

}  // namespace

void ArrayConfig::validate() const {
  if (num_elements < 2) throw DomainError("array needs at least 2 elements");
  if (!(spacing_over_wavelength > 0.0) || !std::isfinite(spacing_over_wavelength)) {
    throw DomainError("element spacing must be positive");
  }
}

void ImperfectionWeights::validate() const {
  check_weight(gain, "gain");
  check_weight(phase, "phase");
  check_weight(position, "position");
  check_weight(coupling, "coupling");
}

CMatrix symmetric_toeplitz(const CVector& first_column) {
  const Eigen::Index m = first_column.size();
  CMatrix t(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = 0; k < m; ++k) {
      t(i, k) = first_column(std::abs(i - k));
    }
  }
  return t;
}

ImperfectionModel ImperfectionModel::standard(const ArrayConfig& cfg, cplx gamma) {
  cfg.validate();
  const int m = cfg.num_elements;
  if (m % 2 != 0) {
    throw ConfigError(
        "standard imperfection pattern needs an even element count; supply "
        "explicit error vectors for odd M");
  }
  const int half = m / 2;

  RVector gain(m), phase(m), pos(m);
  gain(0) = phase(0) = pos(0) = 0.0;
  for (int i = 1; i < m; ++i) {
    const bool first_block = i <= half;
    gain(i) = first_block ? 0.2 : -0.2;
    phase(i) = first_block ? -kPi / 6.0 : kPi / 6.0;
    pos(i) = (first_block ? -0.2 : 0.2) * cfg.spacing_over_wavelength;
  }

  CVector mc(m);
  mc(0) = 0.0;
  cplx p = 1.0;
  for (int i = 1; i < m; ++i) {
    p *= gamma;
    mc(i) = p;
  }

  ImperfectionModel model =
      from_vectors(std::move(gain), std::move(phase), std::move(pos), std::move(mc));
  model.gamma = gamma;
  return model;
}

ImperfectionModel ImperfectionModel::from_vectors(RVector gain_error,
                                                  RVector phase_error,
                                                  RVector position_error,
                                                  CVector coupling_vector) {
  const Eigen::Index m = gain_error.size();
  if (m < 2 || phase_error.size() != m || position_error.size() != m ||
      coupling_vector.size() != m) {
    throw DomainError("imperfection vectors must all have the array length (>= 2)");
  }
  ImperfectionModel model;
  model.gain_error = std::move(gain_error);
  model.phase_error = std::move(phase_error);
  model.position_error = std::move(position_error);
  model.coupling_vector = std::move(coupling_vector);
  model.gamma = model.coupling_vector.size() > 1 ? model.coupling_vector(1) : cplx{};
  model.coupling_matrix = symmetric_toeplitz(model.coupling_vector);
  return model;
}

CVector ideal_steering(double theta_deg, const ArrayConfig& cfg) {
  check_angle(theta_deg);
  cfg.validate();
  const int m = cfg.num_elements;
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  const double s = std::sin(deg2rad(theta_deg));
  CVector a(m);
  for (int i = 0; i < m; ++i) {
    a(i) = std::polar(scale, -2.0 * kPi * (i * cfg.spacing_over_wavelength) * s);
  }
  return a;
}

CVector imperfect_steering(double theta_deg, const ArrayConfig& cfg,
                           const ImperfectionWeights& weights,
                           const ImperfectionModel& model) {
  check_angle(theta_deg);
  const int m = cfg.num_elements;
  if (model.size() != m) {
    throw DomainError("imperfection model built for " + std::to_string(model.size()) +
                      " elements, array has " + std::to_string(m));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  const double s = std::sin(deg2rad(theta_deg));

  CVector a(m);
  for (int i = 0; i < m; ++i) {
    const double pos = i * cfg.spacing_over_wavelength +
                       weights.position * model.position_error(i);
    const double phase = -2.0 * kPi * pos * s + weights.phase * model.phase_error(i);
    a(i) = std::polar(scale * (1.0 + weights.gain * model.gain_error(i)), phase);
  }
  if (weights.coupling != 0.0) {
    CVector coupled = a + weights.coupling * (model.coupling_matrix * a);
    return coupled;
  }
  return a;
}

SteeringFn make_ideal_steering(const ArrayConfig& cfg) {
  cfg.validate();
  return [cfg](double theta) { return ideal_steering(theta, cfg); };
}

SteeringFn make_imperfect_steering(const ArrayConfig& cfg,
                                   const ImperfectionWeights& weights,
                                   const ImperfectionModel& model) {
  cfg.validate();
  weights.validate();
  return [cfg, weights, model](double theta) {
    return imperfect_steering(theta, cfg, weights, model);
  };
}

ArraySetup ArraySetup::standard(const ArrayConfig& cfg, const ImperfectionWeights& weights) {
  cfg.validate();
  weights.validate();
  return {cfg, weights, ImperfectionModel::standard(cfg)};
}

}  // namespace doa
