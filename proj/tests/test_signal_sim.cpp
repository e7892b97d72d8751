#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "doa/array_geometry.hpp"
#include "doa/signal_sim.hpp"

using namespace doa;

namespace {
const ArrayConfig kArray{20, 0.5};
}

TEST(Waveforms, CoherentUnitPathsGiveIdenticalRows) {
  SourceScene s;
  s.angles_deg = {-10, 0, 10};
  s.coherence = std::vector<CoherencePath>(3, CoherencePath{1.0, 0.0});
  s.num_snapshots = 50;
  Rng rng(1);
  const CMatrix x = gen_waveforms(s, rng);
  EXPECT_EQ(x.row(0), x.row(1));
  EXPECT_EQ(x.row(0), x.row(2));
}

TEST(Waveforms, CoherentScaledReplica) {
  SourceScene s;
  s.angles_deg = {-10, 10};
  s.coherence = std::vector<CoherencePath>{{1.0, 0.0}, {2.0, kPi}};
  s.num_snapshots = 64;
  Rng rng(2);
  const CMatrix x = gen_waveforms(s, rng);
  EXPECT_LT((x.row(1) + 2.0 * x.row(0)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Waveforms, UncorrelatedRowsDecorrelate) {
  SourceScene s;
  s.angles_deg = {-10, 10};
  s.num_snapshots = 100000;
  Rng rng(3);
  const CMatrix x = gen_waveforms(s, rng);
  const double n = static_cast<double>(s.num_snapshots);
  const cplx cross = x.row(0).dot(x.row(1)) / n;
  EXPECT_LT(std::abs(cross), 0.02);
  EXPECT_NEAR(x.row(0).squaredNorm() / n, 1.0, 0.02);
}

TEST(Snapshots, NoiselessSingleSourceColumnsAreSteering) {
  SourceScene s;
  s.angles_deg = {23.0};
  s.snr_db = std::numeric_limits<double>::infinity();
  s.num_snapshots = 10;
  Rng rng(4);
  const CVector a = ideal_steering(23.0, kArray);
  const CMatrix z = synthesize_snapshots(s, make_ideal_steering(kArray), rng);
  for (Eigen::Index t = 0; t < z.cols(); ++t) {
    const cplx c = a.dot(z.col(t));  // a^H z (a has unit norm)
    EXPECT_LT((z.col(t) - c * a).norm(), 1e-13);
  }
}

TEST(Snapshots, NoSourcesRejected) {
  SourceScene s;
  Rng rng(5);
  EXPECT_THROW(synthesize_snapshots(s, make_ideal_steering(kArray), rng), DomainError);
}

TEST(Snapshots, SeedIsBitReproducible) {
  SourceScene s;
  s.angles_deg = {-15, -5};
  s.coherence = std::vector<CoherencePath>{{1.0, 0.0}, {0.7, 1.1}};
  Rng r1(99), r2(99);
  const auto st = make_ideal_steering(kArray);
  const CMatrix a = synthesize_snapshots(s, st, r1);
  const CMatrix b = synthesize_snapshots(s, st, r2);
  EXPECT_EQ(a, b);
}

TEST(SampleCovariance, SingleSnapshotIsRankOne) {
  CMatrix z(3, 1);
  z << cplx(1, 2), cplx(-0.5, 0.1), cplx(0, 3);
  const CMatrix r = sample_covariance(z);
  EXPECT_LT((r - z * z.adjoint()).norm(), 1e-15);
}

TEST(SampleCovariance, CoherentNoiselessIsRankOne) {
  SourceScene s;
  s.angles_deg = {-30, 0, 25};
  s.coherence = std::vector<CoherencePath>{{1.0, 0.0}, {0.8, 0.4}, {0.6, 2.0}};
  s.snr_db = std::numeric_limits<double>::infinity();
  Rng rng(6);
  const CMatrix r = simulate_covariance(s, make_ideal_steering(kArray), rng);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
  const auto& ev = es.eigenvalues();
  EXPECT_GT(ev(19) / std::abs(ev(18)), 1e10);
}

TEST(SampleCovariance, ConvergesToIdeal) {
  SourceScene s;
  s.angles_deg = {-20, 35};
  s.snr_db = 0.0;
  s.num_snapshots = 100000;
  Rng rng(7);
  const auto st = make_ideal_steering(kArray);
  const CMatrix r = simulate_covariance(s, st, rng);
  const CMatrix ref = ideal_covariance(s.angles_deg, {1.0, 1.0}, 1.0, st, 20);
  EXPECT_LT((r - ref).norm() / ref.norm(), 0.05);
  EXPECT_LT((r - r.adjoint()).norm(), 1e-15);
}

TEST(IdealCovariance, SingleSourceAndNoiseOnly) {
  const auto st = make_ideal_steering(kArray);
  const CVector a = st(12.0);
  const CMatrix r = ideal_covariance({12.0}, {1.0}, 0.0, st, 20);
  EXPECT_LT((r - a * a.adjoint()).norm(), 1e-15);
  const CMatrix n = ideal_covariance({}, {}, 1.0, st, 20);
  EXPECT_EQ(n, CMatrix::Identity(20, 20));
}

TEST(IdealCovariance, CoherentMatchesSampleLimit) {
  const auto st = make_ideal_steering(kArray);
  const std::vector<CoherencePath> paths{{1.0, 0.0}, {0.7, 2.0}};
  const CMatrix ref = ideal_coherent_covariance({-15, -5}, paths, 0.0, st);
  SourceScene s;
  s.angles_deg = {-15, -5};
  s.coherence = paths;
  s.snr_db = std::numeric_limits<double>::infinity();
  s.num_snapshots = 1000000;
  Rng rng(8);
  const CMatrix r = simulate_covariance(s, st, rng);
  EXPECT_LT((r - ref).norm(), 1e-2);
}

TEST(Noise, VarianceFromSnr) {
  EXPECT_DOUBLE_EQ(noise_variance(0.0), 1.0);
  EXPECT_NEAR(noise_variance(10.0), 0.1, 1e-16);
  EXPECT_EQ(noise_variance(std::numeric_limits<double>::infinity()), 0.0);
}

TEST(Coherence, RandomPathsInRange) {
  Rng rng(9);
  const auto p = random_coherence(8, rng);
  ASSERT_EQ(p.size(), 8u);
  EXPECT_EQ(p[0].amplitude, 1.0);
  EXPECT_EQ(p[0].phase, 0.0);
  for (std::size_t k = 1; k < p.size(); ++k) {
    EXPECT_GE(p[k].amplitude, 0.5);
    EXPECT_LE(p[k].amplitude, 1.0);
    EXPECT_GE(p[k].phase, 0.0);
    EXPECT_LT(p[k].phase, 2.0 * kPi);
  }
}
