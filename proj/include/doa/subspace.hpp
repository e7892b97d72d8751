#pragma once

#include <filesystem>
#include <vector>

#include "doa/types.hpp"

namespace doa {

/// Eigenvalues in descending order; column i of `vectors` belongs to values(i).
struct EigenDecomposition {
  RVector values;
  CMatrix vectors;
  int sweeps = 0;
};

/// Cyclic complex Jacobi. Stops once the off-diagonal Frobenius mass drops
/// below 1e-12 ||R||_F; throws ConvergenceError after `max_sweeps` sweeps and
/// DomainError when R is not Hermitian to 1e-10 (relative).
EigenDecomposition hermitian_eig(const CMatrix& r, int max_sweeps = 100);

struct MusicSpectrum {
  std::vector<double> angles;
  RVector values;
};

/// P(theta) = 1 / (a^H E_n E_n^H a) with E_n spanning the M-K smallest
/// eigenvalues. Uses the ideal ULA response of size R.rows().
MusicSpectrum music_spectrum(const CMatrix& r, int num_sources, const std::vector<double>& grid,
                             double spacing_over_wavelength = 0.5);

/// Forward/backward spatially smoothed covariance of the L-element subarrays.
CMatrix fb_spatial_smooth(const CMatrix& r, int subarray_len);

struct PeakPick {
  std::vector<double> angles;  // sorted ascending
  /// Fewer than K strict local maxima existed; the rest were padded.
  bool degenerate = false;
};

/// K largest strict local maxima; pads with the largest remaining grid values
/// when there are fewer.
PeakPick pick_peaks(const std::vector<double>& grid, const RVector& values, int k);

struct MusicResult {
  MusicSpectrum spectrum;
  PeakPick peaks;
  /// lambda_K did not rise clearly (2x) above the mean noise eigenvalue, so the
  /// signal subspace has fewer than K dimensions (coherent sources).
  bool rank_deficient = false;

  bool degenerate() const { return peaks.degenerate || rank_deficient; }
};

/// lambda_K <= 2 * mean(lambda_{K+1..M}) for descending eigenvalues.
bool signal_subspace_deficient(const RVector& eigenvalues, int num_sources);

MusicResult music(const CMatrix& r, int num_sources, const std::vector<double>& grid,
                  double spacing_over_wavelength = 0.5);

/// MUSIC on the forward/backward smoothed covariance of L-element subarrays.
MusicResult ss_music(const CMatrix& r, int num_sources, int subarray_len,
                     const std::vector<double>& grid, double spacing_over_wavelength = 0.5);

/// angle_deg,pseudospectrum (or log10_pseudospectrum).
void write_spectrum_csv(const MusicSpectrum& s, bool log10_values,
                        const std::filesystem::path& path);

}  // namespace doa
