#include <gtest/gtest.h>

#include <cmath>

#include "doa/array_geometry.hpp"

using namespace doa;

TEST(IdealSteering, BroadsideIsUniform) {
  const CVector a = ideal_steering(0.0, {4, 0.5});
  ASSERT_EQ(a.size(), 4);
  for (Eigen::Index m = 0; m < 4; ++m) {
    EXPECT_DOUBLE_EQ(a(m).real(), 0.5);
    EXPECT_DOUBLE_EQ(a(m).imag(), 0.0);
  }
}

TEST(IdealSteering, ThirtyDegreesTwoElements) {
  // sin 30 = 1/2 so the second element is rotated by -pi/2.
  const CVector a = ideal_steering(30.0, {2, 0.5});
  const cplx expected = std::polar(1.0 / std::sqrt(2.0), -kPi / 2.0);
  EXPECT_NEAR(std::abs(a(1) - expected), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(a(0).real(), 1.0 / std::sqrt(2.0));
}

TEST(IdealSteering, NearEndfirePhase) {
  const CVector a = ideal_steering(90.0 - 1e-7, {3, 0.5});
  EXPECT_NEAR(std::arg(a(1)), -kPi, 1e-6);
}

TEST(IdealSteering, UnitNormAndDomain) {
  const CVector a = ideal_steering(-37.3, {20, 0.5});
  EXPECT_NEAR(a.norm(), 1.0, 1e-14);
  EXPECT_THROW(ideal_steering(90.0, {20, 0.5}), DomainError);
  EXPECT_THROW(ideal_steering(-90.0, {20, 0.5}), DomainError);
  EXPECT_THROW(ideal_steering(10.0, {0, 0.5}), Error);
}

TEST(ImperfectionModel, StandardPattern) {
  const ArrayConfig cfg{20, 0.5};
  const ImperfectionModel m = ImperfectionModel::standard(cfg);
  int zero = 0, pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < 20; ++i) {
    const double g = m.gain_error(i);
    if (g == 0.0) ++zero;
    else if (std::abs(g - 0.2) < 1e-15) ++pos;
    else if (std::abs(g + 0.2) < 1e-15) ++neg;
  }
  EXPECT_EQ(zero, 1);
  EXPECT_EQ(pos, 10);
  EXPECT_EQ(neg, 9);

  const cplx gamma = ImperfectionModel::default_gamma();
  EXPECT_EQ(m.coupling_vector(0), cplx(0.0, 0.0));
  for (int i = 1; i < 20; ++i) {
    EXPECT_NEAR(std::abs(m.coupling_vector(i) - std::pow(gamma, i)), 0.0, 1e-14);
  }
  EXPECT_THROW(ImperfectionModel::standard({7, 0.5}), ConfigError);
}

TEST(ImperfectionModel, ZeroGammaGivesZeroCoupling) {
  const ImperfectionModel m = ImperfectionModel::standard({8, 0.5}, cplx{0.0, 0.0});
  EXPECT_EQ(m.coupling_matrix.norm(), 0.0);
}

TEST(ImperfectionModel, ToeplitzIsSymmetricNotHermitian) {
  CVector c(3);
  c << cplx(1, 0), cplx(0.2, 0.3), cplx(-0.1, 0.5);
  const CMatrix t = symmetric_toeplitz(c);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) EXPECT_EQ(t(i, k), c(std::abs(i - k)));
  }
}

TEST(ImperfectSteering, ZeroWeightsMatchIdeal) {
  const ArrayConfig cfg{20, 0.5};
  const auto model = ImperfectionModel::standard(cfg);
  for (double th : {-59.0, -15.0, 0.0, 33.3}) {
    const CVector a = imperfect_steering(th, cfg, ImperfectionWeights::none(), model);
    const CVector b = ideal_steering(th, cfg);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(ImperfectSteering, GainOnlyAtBroadside) {
  const ArrayConfig cfg{20, 0.5};
  const auto model = ImperfectionModel::standard(cfg);
  ImperfectionWeights w;
  w.gain = 1.0;
  const CVector a = imperfect_steering(0.0, cfg, w, model);
  const double s = 1.0 / std::sqrt(20.0);
  for (Eigen::Index m = 0; m < 20; ++m) {
    EXPECT_NEAR(std::abs(a(m) - cplx(s * (1.0 + model.gain_error(m)), 0.0)), 0.0, 1e-15);
  }
}

TEST(ImperfectSteering, CouplingOnlyMatchesDenseProduct) {
  const ArrayConfig cfg{20, 0.5};
  const auto model = ImperfectionModel::standard(cfg);
  ImperfectionWeights w;
  w.coupling = 1.0;
  const double th = -21.7;
  const CVector a = imperfect_steering(th, cfg, w, model);
  const CVector ideal = ideal_steering(th, cfg);
  // Brute-force (I + E) a with explicit loops over |i - k|.
  for (int i = 0; i < 20; ++i) {
    cplx acc = ideal(i);
    for (int k = 0; k < 20; ++k) acc += model.coupling_vector(std::abs(i - k)) * ideal(k);
    EXPECT_NEAR(std::abs(a(i) - acc), 0.0, 1e-14);
  }
}

TEST(ImperfectSteering, PhaseAndPositionTerms) {
  const ArrayConfig cfg{6, 0.5};
  const auto model = ImperfectionModel::standard(cfg);
  const double th = 12.0;
  const double s = std::sin(th * kPi / 180.0);
  ImperfectionWeights w;
  w.phase = 0.5;
  w.position = 0.25;
  const CVector a = imperfect_steering(th, cfg, w, model);
  for (int m = 0; m < 6; ++m) {
    const double phase = -2.0 * kPi * (m * 0.5 + 0.25 * model.position_error(m)) * s +
                         0.5 * model.phase_error(m);
    const cplx expected = std::polar(1.0 / std::sqrt(6.0), phase);
    EXPECT_NEAR(std::abs(a(m) - expected), 0.0, 1e-15);
  }
}

TEST(ImperfectionWeights, RangeChecked) {
  ImperfectionWeights w;
  w.gain = 1.5;
  EXPECT_THROW(w.validate(), Error);
  w.gain = -0.1;
  EXPECT_THROW(w.validate(), Error);
  EXPECT_NO_THROW(ImperfectionWeights::full().validate());
}
