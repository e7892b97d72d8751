#pragma once

#include "doa/types.hpp"

namespace doa {

/// Feature length for an M-element array: M(M-1).
inline int feature_length(int num_elements) { return num_elements * (num_elements - 1); }

/// Strict upper triangle scanned row by row: r12, r13, ..., r1M, r23, ..., r(M-1)M.
CVector extract_upper(const CMatrix& r);

/// Inverse of extract_upper up to the diagonal: conjugates go below the
/// diagonal, the diagonal is zero.
CMatrix restore_off_diagonal(const CVector& upper, int num_elements);

/// [Re(x); Im(x)].
RVector to_real(const CVector& x);

/// Inverse of to_real; throws DomainError on odd length.
CVector to_complex(const RVector& v);

/// Unit Euclidean norm; throws DomainError on a zero vector.
RVector normalize(const RVector& v);

/// Network input for a covariance matrix.
FeatureVector covariance_features(const CMatrix& r, bool normalized = true);

/// Normalized noise-free single-source signature at theta:
/// normalize(to_real(extract_upper(a a^H))).
FeatureVector make_template(double theta_deg, const SteeringFn& steering);

}  // namespace doa
