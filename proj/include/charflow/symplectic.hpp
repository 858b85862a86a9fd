#pragma once

#include <cassert>
#include <cmath>

#include <Eigen/Dense>

namespace charflow {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Standard complex structure J = [[0, -I], [I, 0]] on R^{2n}.
template <typename Scalar = double>
Mat<Scalar> standard_j(Eigen::Index n) {
  Mat<Scalar> j = Mat<Scalar>::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -Mat<Scalar>::Identity(n, n);
  j.bottomLeftCorner(n, n) = Mat<Scalar>::Identity(n, n);
  return j;
}

/// Applies J without forming it: (x, p) -> (-p, x).
template <typename Derived>
Vec<typename Derived::Scalar> apply_j(const Eigen::MatrixBase<Derived>& v) {
  const Eigen::Index n = v.size() / 2;
  Vec<typename Derived::Scalar> out(v.size());
  out.head(n) = -v.tail(n);
  out.tail(n) = v.head(n);
  return out;
}

/// ||M^T J M - J||_max, zero for symplectic M.
template <typename Derived>
typename Derived::Scalar symplectic_defect(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const Mat<Scalar> j = standard_j<Scalar>(m.rows() / 2);
  return (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
}

/// Symplectic direct sum A ⋄ B: A acts on the (q_1..q_a, p_1..p_a) block and
/// B on the remaining conjugate pairs, in the global (q, p) ordering.
template <typename DA, typename DB>
Mat<typename DA::Scalar> direct_sum(const Eigen::MatrixBase<DA>& a,
                                    const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  const Eigen::Index na = a.rows() / 2;
  const Eigen::Index nb = b.rows() / 2;
  const Eigen::Index n = na + nb;
  Mat<Scalar> out = Mat<Scalar>::Zero(2 * n, 2 * n);
  for (int bi = 0; bi < 2; ++bi) {
    for (int bj = 0; bj < 2; ++bj) {
      out.block(bi * n, bj * n, na, na) = a.block(bi * na, bj * na, na, na);
      out.block(bi * n + na, bj * n + na, nb, nb) = b.block(bi * nb, bj * nb, nb, nb);
    }
  }
  return out;
}

/// Planar rotation R(theta) = [[cos, -sin], [sin, cos]].
template <typename Scalar = double>
Mat<Scalar> rotation2(Scalar theta) {
  Mat<Scalar> r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

/// Jordan-type block N_1(lambda, b) = [[lambda, b], [0, lambda]].
template <typename Scalar = double>
Mat<Scalar> jordan2(Scalar lambda, Scalar b) {
  Mat<Scalar> m(2, 2);
  m << lambda, b, 0, lambda;
  return m;
}

/// Symplectic form w(u, v) = <J u, v>.
template <typename DU, typename DV>
typename DU::Scalar omega(const Eigen::MatrixBase<DU>& u, const Eigen::MatrixBase<DV>& v) {
  return apply_j(u).dot(v);
}

}  // namespace charflow
