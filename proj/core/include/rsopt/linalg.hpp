#pragma once

#include <Eigen/Dense>
#include <complex>

namespace rsopt {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Embeds a Hermitian form p^H A p into real coordinates x = [Re p; Im p]:
// p^H A p = x^T [Re A, -Im A; Im A, Re A] x.
inline RMat real_embedding(const CMat& a) {
  const auto n = a.rows();
  RMat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = a.real();
  out.topRightCorner(n, n) = -a.imag();
  out.bottomLeftCorner(n, n) = a.imag();
  out.bottomRightCorner(n, n) = a.real();
  return out;
}

inline RVec stack_real(const CVec& v) {
  RVec out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

inline CVec unstack_real(const Eigen::Ref<const RVec>& x) {
  const auto n = x.size() / 2;
  CVec out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = Complex(x(i), x(n + i));
  return out;
}

}  // namespace rsopt
