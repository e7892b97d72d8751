#pragma once

#include "doa/types.hpp"

namespace doa {

/// Uniform linear array. Angles on every public interface are in degrees,
/// measured from broadside.
struct ArrayConfig {
  int num_elements = 20;
  double spacing_over_wavelength = 0.5;

  void validate() const;
};

/// Per-error weights applied to the imperfection vectors, each in [0, 1].
struct ImperfectionWeights {
  double gain = 0.0;
  double phase = 0.0;
  double position = 0.0;
  double coupling = 0.0;

  static ImperfectionWeights none() { return {}; }
  static ImperfectionWeights full() { return {1.0, 1.0, 1.0, 1.0}; }

  bool all_zero() const {
    return gain == 0.0 && phase == 0.0 && position == 0.0 && coupling == 0.0;
  }
  void validate() const;
};

/// Gain, phase, position and mutual-coupling errors of an M-element array.
///
/// `position_error` is expressed in wavelengths (the element offset already
/// scaled by d). `coupling_matrix` is the symmetric Toeplitz matrix whose
/// (i, k) entry is coupling_vector[|i - k|].
struct ImperfectionModel {
  RVector gain_error;
  RVector phase_error;
  RVector position_error;
  CVector coupling_vector;
  cplx gamma{0.0, 0.0};
  CMatrix coupling_matrix;

  int size() const { return static_cast<int>(gain_error.size()); }

  /// Mutual coupling between adjacent elements used by the standard model.
  static cplx default_gamma() { return std::polar(0.3, kPi / 3.0); }

  /// Standard error pattern: element 0 is the reference, the next M/2
  /// elements carry one sign and the remaining M/2-1 the opposite sign.
  /// Requires even M.
  static ImperfectionModel standard(const ArrayConfig& cfg,
                                    cplx gamma = default_gamma());

  /// Arbitrary user-supplied vectors (any M). `position_error` in wavelengths.
  static ImperfectionModel from_vectors(RVector gain_error, RVector phase_error,
                                        RVector position_error,
                                        CVector coupling_vector);
};

/// Symmetric Toeplitz matrix with entry (i, k) = first_column[|i - k|].
CMatrix symmetric_toeplitz(const CVector& first_column);

/// (1/sqrt(M)) exp(-j 2 pi (d/lambda) m sin(theta)), m = 0..M-1.
CVector ideal_steering(double theta_deg, const ArrayConfig& cfg);

/// Array response under the weighted imperfection model:
/// (I + a_mc E_mc) (I + diag(a_g e_g)) diag(exp(j a_p e_p)) a(theta; perturbed positions).
CVector imperfect_steering(double theta_deg, const ArrayConfig& cfg,
                           const ImperfectionWeights& weights,
                           const ImperfectionModel& model);

SteeringFn make_ideal_steering(const ArrayConfig& cfg);

/// Captures copies of its arguments.
SteeringFn make_imperfect_steering(const ArrayConfig& cfg,
                                   const ImperfectionWeights& weights,
                                   const ImperfectionModel& model);

/// A physical array: geometry plus the imperfections it actually has.
struct ArraySetup {
  ArrayConfig config;
  ImperfectionWeights weights;
  ImperfectionModel model;

  /// Standard imperfection pattern at the given weights.
  static ArraySetup standard(const ArrayConfig& cfg, const ImperfectionWeights& weights);

  int num_elements() const { return config.num_elements; }
  /// Response of the real (imperfect) array.
  SteeringFn true_steering() const { return make_imperfect_steering(config, weights, model); }
  /// Imperfection-free response the estimators assume.
  SteeringFn nominal_steering() const { return make_ideal_steering(config); }
};

}  // namespace doa
