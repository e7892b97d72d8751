#pragma once

// Data-parallel inner loops. Every kernel comes in a serial reference form and
// an OpenMP form; the two must agree bit-for-bit because each output element is
// produced by exactly one thread with the same summation order.

#include "doa/types.hpp"

namespace doa::kernels {

/// Caps the OpenMP worker count (<= 0 leaves the runtime default).
void set_num_threads(int n);
int max_threads();

/// Deterministic mode pins Eigen's GEMM to one thread so its blocking (and
/// therefore its floating-point summation order) is independent of the host.
void set_deterministic(bool on);
bool deterministic();

// C = A * B, plain triple loop. Oracle for the Eigen-backed dense layers.
void gemm_reference(const RMatrix& a, const RMatrix& b, RMatrix& c);

// g[i] = | sum_k conj(T(i, k)) y[k] |, one row of T per scan angle.
void scan_gains_serial(const CMatrix& templates, const CVector& y, RVector& gains);
void scan_gains_parallel(const CMatrix& templates, const CVector& y, RVector& gains);

// p[i] = 1 / || E^H a_i ||^2 with a_i the i-th column of `steering`.
void music_pseudospectrum_serial(const CMatrix& noise_basis, const CMatrix& steering,
                                 RVector& p);
void music_pseudospectrum_parallel(const CMatrix& noise_basis, const CMatrix& steering,
                                   RVector& p);

// acc <- rho acc + (1 - rho) g^2 ; w <- w - lr g / (sqrt(acc) + eps)
void rmsprop_update_serial(double* w, double* acc, const double* g, std::size_t n,
                           double lr, double rho, double eps);
void rmsprop_update_parallel(double* w, double* acc, const double* g, std::size_t n,
                             double lr, double rho, double eps);

}  // namespace doa::kernels
