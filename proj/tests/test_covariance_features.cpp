#include <gtest/gtest.h>

#include <cmath>

#include "doa/array_geometry.hpp"
#include "doa/covariance_features.hpp"
#include "doa/signal_sim.hpp"

using namespace doa;

TEST(ExtractUpper, ThreeByThreeOrder) {
  CMatrix r(3, 3);
  r << cplx(1, 0), cplx(2, 1), cplx(3, -1),
       cplx(2, -1), cplx(4, 0), cplx(5, 2),
       cplx(3, 1), cplx(5, -2), cplx(6, 0);
  const CVector u = extract_upper(r);
  ASSERT_EQ(u.size(), 3);
  EXPECT_EQ(u(0), r(0, 1));
  EXPECT_EQ(u(1), r(0, 2));
  EXPECT_EQ(u(2), r(1, 2));
}

TEST(ExtractUpper, Sizes) {
  const CMatrix r2 = CMatrix::Random(2, 2);
  EXPECT_EQ(extract_upper(r2).size(), 1);
  EXPECT_EQ(extract_upper(r2)(0), r2(0, 1));
  const CMatrix r20 = CMatrix::Identity(20, 20);
  EXPECT_EQ(extract_upper(r20).size(), 190);
  EXPECT_EQ(covariance_features(r20 + CMatrix::Constant(20, 20, cplx(0.1, 0.2))).size(), 380);
  EXPECT_EQ(feature_length(20), 380);
  EXPECT_THROW(extract_upper(CMatrix::Zero(1, 1)), DomainError);
}

TEST(ExtractUpper, RestoreRoundTrip) {
  CMatrix r = CMatrix::Random(5, 5);
  r = r + r.adjoint().eval();
  r.diagonal().setZero();
  EXPECT_EQ(restore_off_diagonal(extract_upper(r), 5), r);
}

TEST(RealComplex, Examples) {
  CVector x(1);
  x << cplx(1, 2);
  const RVector v = to_real(x);
  ASSERT_EQ(v.size(), 2);
  EXPECT_EQ(v(0), 1.0);
  EXPECT_EQ(v(1), 2.0);

  RVector w(2);
  w << 1.0, 2.0;
  EXPECT_EQ(to_complex(w)(0), cplx(1, 2));
  EXPECT_EQ(to_complex(RVector::Zero(6)), CVector::Zero(3));

  CVector real_only(3);
  real_only << 1.0, -2.0, 3.5;
  EXPECT_EQ(to_real(real_only).tail(3), RVector::Zero(3));
  EXPECT_THROW(to_complex(RVector::Zero(3)), DomainError);
}

TEST(RealComplex, RoundTrips) {
  const CVector x = CVector::Random(17);
  EXPECT_EQ(to_complex(to_real(x)), x);
  const RVector v = RVector::Random(34);
  EXPECT_EQ(to_real(to_complex(v)), v);
}

TEST(Normalize, Examples) {
  RVector v(4);
  v << 3, 4, 0, 0;
  const RVector n = normalize(v);
  EXPECT_NEAR(n(0), 0.6, 1e-16);
  EXPECT_NEAR(n(1), 0.8, 1e-16);
  EXPECT_THROW(normalize(RVector::Zero(4)), DomainError);
  for (int i = 0; i < 20; ++i) {
    const RVector r = RVector::Random(380) * (i + 1);
    EXPECT_NEAR(normalize(r).norm(), 1.0, 1e-12);
    EXPECT_LT((normalize(normalize(r)) - normalize(r)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Template, MatchesIdealCovarianceFeatures) {
  const ArrayConfig cfg{20, 0.5};
  const auto st = make_ideal_steering(cfg);
  for (double th : {-50.0, -15.0, 7.3}) {
    const FeatureVector t = make_template(th, st);
    const FeatureVector f = covariance_features(ideal_covariance({th}, {1.0}, 0.0, st, 20));
    EXPECT_EQ(t, f);
    EXPECT_NEAR(std::abs(to_complex(t).dot(to_complex(t))), 1.0, 1e-14);
  }
}

TEST(Template, DistinctAnglesAreDiscriminative) {
  // Brute-force complex correlation of the normalized upper triangles.
  const ArrayConfig cfg{20, 0.5};
  auto upper_unit = [&](double th) {
    const CVector a = ideal_steering(th, cfg);
    CVector u(190);
    int idx = 0;
    for (int i = 0; i < 20; ++i) {
      for (int k = i + 1; k < 20; ++k) u(idx++) = a(i) * std::conj(a(k));
    }
    return CVector(u / u.norm());
  };
  const CVector r1 = upper_unit(-15.0);
  const CVector r2 = upper_unit(-5.0);
  cplx acc = 0.0;
  for (int i = 0; i < 190; ++i) acc += std::conj(r1(i)) * r2(i);
  EXPECT_LT(std::abs(acc), 0.5);

  const CVector t1 = to_complex(make_template(-15.0, make_ideal_steering(cfg)));
  EXPECT_LT((t1 - r1).cwiseAbs().maxCoeff(), 1e-14);
}
