#include "doa/kernels.hpp"

#include <atomic>
#include <cmath>

#include <omp.h>

namespace doa::kernels {

namespace {
std::atomic<bool> g_deterministic{false};

// Below this many elements the fork/join overhead dominates.
constexpr std::ptrdiff_t kParallelGrain = 1 << 14;
}  // namespace

void set_num_threads(int n) {
  if (n > 0) {
    omp_set_num_threads(n);
    if (!g_deterministic.load()) Eigen::setNbThreads(n);
  }
}

int max_threads() { return omp_get_max_threads(); }

void set_deterministic(bool on) {
  g_deterministic.store(on);
  if (on) Eigen::setNbThreads(1);
}

bool deterministic() { return g_deterministic.load(); }

void gemm_reference(const RMatrix& a, const RMatrix& b, RMatrix& c) {
  if (a.cols() != b.rows()) throw DomainError("gemm: inner dimensions differ");
  c.resize(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  }
}

namespace {

inline double scan_one(const CMatrix& t, const CVector& y, Eigen::Index i) {
  double re = 0.0, im = 0.0;
  for (Eigen::Index k = 0; k < t.cols(); ++k) {
    const cplx a = t(i, k);
    const cplx b = y(k);
    // conj(a) * b
    re += a.real() * b.real() + a.imag() * b.imag();
    im += a.real() * b.imag() - a.imag() * b.real();
  }
  return std::hypot(re, im);
}

inline double music_one(const CMatrix& e, const CMatrix& s, Eigen::Index i) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < e.cols(); ++c) {
    double re = 0.0, im = 0.0;
    for (Eigen::Index r = 0; r < e.rows(); ++r) {
      const cplx a = e(r, c);
      const cplx b = s(r, i);
      re += a.real() * b.real() + a.imag() * b.imag();
      im += a.real() * b.imag() - a.imag() * b.real();
    }
    acc += re * re + im * im;
  }
  return 1.0 / acc;
}

void check_scan(const CMatrix& t, const CVector& y) {
  if (t.cols() != y.size()) throw DomainError("scan: template length differs from output");
}

void check_music(const CMatrix& e, const CMatrix& s) {
  if (e.rows() != s.rows()) throw DomainError("music: basis and steering rows differ");
}

}  // namespace

void scan_gains_serial(const CMatrix& templates, const CVector& y, RVector& gains) {
  check_scan(templates, y);
  gains.resize(templates.rows());
  for (Eigen::Index i = 0; i < templates.rows(); ++i) gains(i) = scan_one(templates, y, i);
}

void scan_gains_parallel(const CMatrix& templates, const CVector& y, RVector& gains) {
  check_scan(templates, y);
  const Eigen::Index rows = templates.rows();
  gains.resize(rows);
  const bool big = rows * templates.cols() >= kParallelGrain;
#pragma omp parallel for schedule(static) if (big)
  for (Eigen::Index i = 0; i < rows; ++i) gains(i) = scan_one(templates, y, i);
}

void music_pseudospectrum_serial(const CMatrix& noise_basis, const CMatrix& steering,
                                 RVector& p) {
  check_music(noise_basis, steering);
  p.resize(steering.cols());
  for (Eigen::Index i = 0; i < steering.cols(); ++i) p(i) = music_one(noise_basis, steering, i);
}

void music_pseudospectrum_parallel(const CMatrix& noise_basis, const CMatrix& steering,
                                   RVector& p) {
  check_music(noise_basis, steering);
  const Eigen::Index cols = steering.cols();
  p.resize(cols);
  const bool big = cols * noise_basis.size() >= kParallelGrain;
#pragma omp parallel for schedule(static) if (big)
  for (Eigen::Index i = 0; i < cols; ++i) p(i) = music_one(noise_basis, steering, i);
}

void rmsprop_update_serial(double* w, double* acc, const double* g, std::size_t n,
                           double lr, double rho, double eps) {
  for (std::size_t i = 0; i < n; ++i) {
    acc[i] = rho * acc[i] + (1.0 - rho) * g[i] * g[i];
    w[i] -= lr * g[i] / (std::sqrt(acc[i]) + eps);
  }
}

void rmsprop_update_parallel(double* w, double* acc, const double* g, std::size_t n,
                             double lr, double rho, double eps) {
  const auto len = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for simd schedule(static) if (len >= kParallelGrain)
  for (std::ptrdiff_t i = 0; i < len; ++i) {
    acc[i] = rho * acc[i] + (1.0 - rho) * g[i] * g[i];
    w[i] -= lr * g[i] / (std::sqrt(acc[i]) + eps);
  }
}

}  // namespace doa::kernels
