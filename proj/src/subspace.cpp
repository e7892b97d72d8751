#include "doa/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "doa/array_geometry.hpp"
#include "doa/kernels.hpp"

namespace doa {

namespace {

double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += std::norm(a(i, j));
    }
  }
  return std::sqrt(s);
}

// Zeroes A(p, q) with the unitary U = diag(1, e^{-i phi}) * [[c, s], [-s, c]]
// acting on the (p, q) plane: A <- U^H A U, V <- V U.
void jacobi_rotate(CMatrix& a, CMatrix& v, Eigen::Index p, Eigen::Index q) {
  const cplx apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;
  const cplx e = apq / r;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * r);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const cplx ec = std::conj(e);

  const Eigen::Index m = a.rows();
  for (Eigen::Index k = 0; k < m; ++k) {
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = c * akp - s * ec * akq;
    a(k, q) = s * akp + c * ec * akq;
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = c * apk - s * e * aqk;
    a(q, k) = s * apk + c * e * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (Eigen::Index k = 0; k < m; ++k) {
    const cplx vkp = v(k, p);
    const cplx vkq = v(k, q);
    v(k, p) = c * vkp - s * ec * vkq;
    v(k, q) = s * vkp + c * ec * vkq;
  }
}

CMatrix ula_steering_matrix(int m, const std::vector<double>& grid, double spacing) {
  ArrayConfig cfg{m, spacing};
  CMatrix a(m, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    a.col(static_cast<Eigen::Index>(i)) = ideal_steering(grid[i], cfg);
  }
  return a;
}

}  // namespace

EigenDecomposition hermitian_eig(const CMatrix& r, int max_sweeps) {
  const Eigen::Index m = r.rows();
  if (m == 0 || r.cols() != m) throw DomainError("eigendecomposition needs a square matrix");
  if (!r.allFinite()) throw DomainError("matrix has non-finite entries");
  const double norm = r.norm();
  if ((r - r.adjoint()).norm() > 1e-10 * norm) throw DomainError("matrix is not Hermitian");

  CMatrix a = 0.5 * (r + r.adjoint());
  CMatrix v = CMatrix::Identity(m, m);
  const double tol = 1e-12 * norm;

  EigenDecomposition out;
  bool converged = norm == 0.0 || off_diagonal_norm(a) <= tol;
  while (!converged) {
    if (out.sweeps >= max_sweeps) {
      throw ConvergenceError("Jacobi eigensolver did not converge in " +
                             std::to_string(max_sweeps) + " sweeps");
    }
    for (Eigen::Index p = 0; p < m - 1; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) jacobi_rotate(a, v, p, q);
    }
    ++out.sweeps;
    converged = off_diagonal_norm(a) <= tol;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return a(x, x).real() > a(y, y).real();
  });
  out.values.resize(m);
  out.vectors.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.values(i) = a(order[i], order[i]).real();
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

bool signal_subspace_deficient(const RVector& eigenvalues, int num_sources) {
  const auto m = static_cast<int>(eigenvalues.size());
  if (num_sources < 1 || num_sources >= m) throw DomainError("need 1 <= K < M");
  const double noise = eigenvalues.tail(m - num_sources).mean();
  return eigenvalues(num_sources - 1) <= 2.0 * noise;
}

namespace {

void check_model_order(int num_sources, int m) {
  if (num_sources < 1 || num_sources >= m) {
    throw DomainError("MUSIC needs 1 <= K < M (K=" + std::to_string(num_sources) +
                      ", M=" + std::to_string(m) + ")");
  }
}

MusicSpectrum spectrum_from(const EigenDecomposition& eig, int num_sources,
                            const std::vector<double>& grid, double spacing) {
  const auto m = static_cast<int>(eig.values.size());
  const CMatrix noise = eig.vectors.rightCols(m - num_sources);
  const CMatrix steer = ula_steering_matrix(m, grid, spacing);
  MusicSpectrum s;
  s.angles = grid;
  kernels::music_pseudospectrum_parallel(noise, steer, s.values);
  return s;
}

}  // namespace

MusicSpectrum music_spectrum(const CMatrix& r, int num_sources, const std::vector<double>& grid,
                             double spacing_over_wavelength) {
  const auto m = static_cast<int>(r.rows());
  check_model_order(num_sources, m);
  return spectrum_from(hermitian_eig(r), num_sources, grid, spacing_over_wavelength);
}

CMatrix fb_spatial_smooth(const CMatrix& r, int subarray_len) {
  const auto m = static_cast<int>(r.rows());
  if (r.cols() != m) throw DomainError("covariance must be square");
  if (subarray_len < 2 || subarray_len > m) {
    throw DomainError("subarray length must lie in [2, M]");
  }
  const int l = subarray_len;
  const int p = m - l + 1;
  CMatrix rf = CMatrix::Zero(l, l);
  for (int i = 0; i < p; ++i) rf += r.block(i, i, l, l);
  rf /= static_cast<double>(p);
  CMatrix rb(l, l);
  for (int a = 0; a < l; ++a) {
    for (int b = 0; b < l; ++b) rb(a, b) = std::conj(rf(l - 1 - a, l - 1 - b));
  }
  CMatrix fb = 0.5 * (rf + rb);
  return fb;
}

PeakPick pick_peaks(const std::vector<double>& grid, const RVector& values, int k) {
  const auto size = static_cast<Eigen::Index>(grid.size());
  if (values.size() != size) throw DomainError("spectrum length mismatch");
  if (k < 1) throw DomainError("need at least one peak");
  std::vector<Eigen::Index> maxima;
  for (Eigen::Index i = 1; i + 1 < size; ++i) {
    if (values(i) > values(i - 1) && values(i) > values(i + 1)) maxima.push_back(i);
  }
  auto by_value = [&](Eigen::Index x, Eigen::Index y) {
    return values(x) > values(y) || (values(x) == values(y) && x < y);
  };
  std::sort(maxima.begin(), maxima.end(), by_value);

  PeakPick out;
  std::vector<Eigen::Index> chosen(maxima.begin(),
                                   maxima.begin() + std::min<std::size_t>(maxima.size(), k));
  if (static_cast<int>(chosen.size()) < k) {
    out.degenerate = true;
    std::vector<Eigen::Index> rest;
    for (Eigen::Index i = 0; i < size; ++i) {
      if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) rest.push_back(i);
    }
    std::sort(rest.begin(), rest.end(), by_value);
    for (std::size_t i = 0; i < rest.size() && static_cast<int>(chosen.size()) < k; ++i) {
      chosen.push_back(rest[i]);
    }
  }
  for (Eigen::Index i : chosen) out.angles.push_back(grid[static_cast<std::size_t>(i)]);
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

MusicResult music(const CMatrix& r, int num_sources, const std::vector<double>& grid,
                  double spacing_over_wavelength) {
  check_model_order(num_sources, static_cast<int>(r.rows()));
  const EigenDecomposition eig = hermitian_eig(r);
  MusicResult res;
  res.spectrum = spectrum_from(eig, num_sources, grid, spacing_over_wavelength);
  res.peaks = pick_peaks(grid, res.spectrum.values, num_sources);
  res.rank_deficient = signal_subspace_deficient(eig.values, num_sources);
  return res;
}

MusicResult ss_music(const CMatrix& r, int num_sources, int subarray_len,
                     const std::vector<double>& grid, double spacing_over_wavelength) {
  if (num_sources >= subarray_len) throw DomainError("SS-MUSIC needs K < L");
  return music(fb_spatial_smooth(r, subarray_len), num_sources, grid, spacing_over_wavelength);
}

void write_spectrum_csv(const MusicSpectrum& s, bool log10_values,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << (log10_values ? "angle_deg,log10_pseudospectrum\n" : "angle_deg,pseudospectrum\n");
  char buf[96];
  for (std::size_t i = 0; i < s.angles.size(); ++i) {
    const double v = s.values(static_cast<Eigen::Index>(i));
    std::snprintf(buf, sizeof buf, "%.4f,%.9g\n", s.angles[i], log10_values ? std::log10(v) : v);
    out << buf;
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace doa
