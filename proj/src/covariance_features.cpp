#include "doa/covariance_features.hpp"

namespace doa {

CVector extract_upper(const CMatrix& r) {
  const Eigen::Index m = r.rows();
  if (m < 2 || r.cols() != m) throw DomainError("covariance must be square with M >= 2");
  CVector out(m * (m - 1) / 2);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = i + 1; k < m; ++k) out(idx++) = r(i, k);
  }
  return out;
}

CMatrix restore_off_diagonal(const CVector& upper, int num_elements) {
  const Eigen::Index m = num_elements;
  if (upper.size() != m * (m - 1) / 2) throw DomainError("upper-triangle length mismatch");
  CMatrix r = CMatrix::Zero(m, m);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = i + 1; k < m; ++k) {
      r(i, k) = upper(idx);
      r(k, i) = std::conj(upper(idx));
      ++idx;
    }
  }
  return r;
}

RVector to_real(const CVector& x) {
  const Eigen::Index l = x.size();
  RVector v(2 * l);
  v.head(l) = x.real();
  v.tail(l) = x.imag();
  return v;
}

CVector to_complex(const RVector& v) {
  if (v.size() % 2 != 0) throw DomainError("real feature vector must have even length");
  const Eigen::Index l = v.size() / 2;
  CVector x(l);
  for (Eigen::Index i = 0; i < l; ++i) x(i) = cplx(v(i), v(l + i));
  return x;
}

RVector normalize(const RVector& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw DomainError("cannot normalize a zero vector");
  return v / n;
}

FeatureVector covariance_features(const CMatrix& r, bool normalized) {
  RVector v = to_real(extract_upper(r));
  return normalized ? normalize(v) : v;
}

FeatureVector make_template(double theta_deg, const SteeringFn& steering) {
  const CVector a = steering(theta_deg);
  return covariance_features(a * a.adjoint(), true);
}

}  // namespace doa
