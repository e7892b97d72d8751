#include <gtest/gtest.h>

#include <vector>

#include "doa/kernels.hpp"

using namespace doa;

TEST(Gemm, ReferenceMatchesEigen) {
  const RMatrix a = RMatrix::Random(37, 53);
  const RMatrix b = RMatrix::Random(53, 29);
  RMatrix c;
  kernels::gemm_reference(a, b, c);
  const RMatrix e = a * b;
  EXPECT_LT((c - e).cwiseAbs().maxCoeff(), 1e-12);
  RMatrix bad;
  EXPECT_THROW(kernels::gemm_reference(a, a, bad), DomainError);
}

TEST(ScanGains, SerialAndParallelAgreeBitwise) {
  // Large enough to cross the parallel threshold.
  const CMatrix t = CMatrix::Random(1201, 190);
  const CVector y = CVector::Random(190);
  RVector g1, g2;
  kernels::scan_gains_serial(t, y, g1);
  kernels::scan_gains_parallel(t, y, g2);
  EXPECT_EQ(g1, g2);
  for (Eigen::Index i = 0; i < 5; ++i) {
    EXPECT_NEAR(g1(i), std::abs(t.row(i).conjugate().dot(y.conjugate())), 1e-12);
  }
}

TEST(MusicKernel, SerialAndParallelAgreeBitwise) {
  const CMatrix e = CMatrix::Random(20, 18);
  const CMatrix s = CMatrix::Random(20, 1201);
  RVector p1, p2;
  kernels::music_pseudospectrum_serial(e, s, p1);
  kernels::music_pseudospectrum_parallel(e, s, p2);
  EXPECT_EQ(p1, p2);
  for (Eigen::Index i = 0; i < 5; ++i) {
    const double denom = (e.adjoint() * s.col(i)).squaredNorm();
    EXPECT_NEAR(p1(i) * denom, 1.0, 1e-12);
  }
}

TEST(RmspropKernel, SerialAndParallelAgreeBitwise) {
  const std::size_t n = 100000;
  std::vector<double> w1(n), a1(n), g(n);
  for (std::size_t i = 0; i < n; ++i) {
    w1[i] = 0.001 * static_cast<double>(i % 97);
    a1[i] = 0.01 * static_cast<double>(i % 13);
    g[i] = 0.1 * static_cast<double>(static_cast<int>(i % 31) - 15);
  }
  std::vector<double> w2 = w1, a2 = a1;
  kernels::rmsprop_update_serial(w1.data(), a1.data(), g.data(), n, 1e-3, 0.9, 1e-8);
  kernels::rmsprop_update_parallel(w2.data(), a2.data(), g.data(), n, 1e-3, 0.9, 1e-8);
  EXPECT_EQ(w1, w2);
  EXPECT_EQ(a1, a2);
}

TEST(RmspropKernel, FirstStepValue) {
  double w = 0.0, acc = 0.0;
  const double g = 1.0;
  kernels::rmsprop_update_serial(&w, &acc, &g, 1, 1e-3, 0.9, 1e-8);
  EXPECT_NEAR(acc, 0.1, 1e-16);
  EXPECT_NEAR(w, -0.0031623, 1e-7);
}

TEST(Threads, Settings) {
  kernels::set_deterministic(true);
  EXPECT_TRUE(kernels::deterministic());
  kernels::set_deterministic(false);
  EXPECT_FALSE(kernels::deterministic());
  EXPECT_GE(kernels::max_threads(), 1);
}
