// packed.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Real packing of Hermitian outer products, so that sums of weighted
// outer products and quadratic forms over many frames become GEMVs.

#ifndef INCAR_SRC_PACKED_H_
#define INCAR_SRC_PACKED_H_

#include "incar/core.h"

namespace incar::internal {

// Hermitian D x D matrices as real D^2-vectors: the diagonal, then the
// real and imaginary parts of each upper entry (i < j).
inline RealMatrix PackOuterProducts(const ComplexMatrix &z) {
  const Eigen::Index D = z.rows();
  RealMatrix p(D * D, z.cols());
  p.topRows(D) = z.cwiseAbs2();
  Eigen::Index row = D;
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = i + 1; j < D; ++j) {
      const Eigen::RowVectorXcd c = z.row(i).cwiseProduct(z.row(j).conjugate());
      p.row(row++) = c.real();
      p.row(row++) = c.imag();
    }
  return p;
}

inline ComplexMatrix UnpackHermitian(const RealVector &b, Eigen::Index D) {
  ComplexMatrix m(D, D);
  for (Eigen::Index i = 0; i < D; ++i) m(i, i) = b(i);
  Eigen::Index row = D;
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = i + 1; j < D; ++j) {
      m(i, j) = Complex(b(row), b(row + 1));
      m(j, i) = std::conj(m(i, j));
      row += 2;
    }
  return m;
}

// Coefficients a with a . pack(z) = z^H A z for Hermitian A.
inline RealVector QuadraticCoefficients(const ComplexMatrix &A) {
  const Eigen::Index D = A.rows();
  RealVector a(D * D);
  for (Eigen::Index i = 0; i < D; ++i) a(i) = A(i, i).real();
  Eigen::Index row = D;
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = i + 1; j < D; ++j) {
      a(row++) = 2.0 * A(i, j).real();
      a(row++) = 2.0 * A(i, j).imag();
    }
  return a;
}

}  // namespace incar::internal

#endif  // INCAR_SRC_PACKED_H_
