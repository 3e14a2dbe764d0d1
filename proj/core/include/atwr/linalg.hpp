#pragma once

#include <Eigen/Dense>
#include <complex>

#include "atwr/errors.hpp"

namespace atwr {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Full SVD, A = U diag(s) V^H with square U (rows x rows) and V (cols x
/// cols). Keeping the full factors means the null-space blocks needed by the
/// precoder construction are always available.
struct SvdResult {
  ComplexMatrix u;
  RealVector s;  // descending, size min(rows, cols)
  ComplexMatrix v;
};

/// A = Q R, Q unitary, R upper-triangular with real nonnegative diagonal.
struct QrResult {
  ComplexMatrix q;
  ComplexMatrix r;
};

/// A = L Q, L lower-triangular with real nonnegative diagonal, Q unitary.
struct LqResult {
  ComplexMatrix l;
  ComplexMatrix q;
};

bool is_finite(const ComplexMatrix& a);

/// Throws InvalidInput on empty or non-finite input.
SvdResult svd(const ComplexMatrix& a);

/// Square matrices only (DimensionMismatch otherwise). The unit phases of the
/// triangular diagonal are absorbed into Q so repeated factorizations of the
/// same matrix are reproducible.
QrResult qr(const ComplexMatrix& a);
LqResult lq(const ComplexMatrix& a);

/// Orthonormal basis B (k columns) for the left null-space of a tall
/// full-column-rank matrix, so B^H a = 0. The columns are the trailing k left
/// singular vectors in descending-singular-value order.
///
/// Throws NullSpaceTooSmall when k > rows - cols and RankDeficient when the
/// smallest singular value drops below 1e-12 of the largest.
ComplexMatrix left_null_basis(const ComplexMatrix& a, Eigen::Index k);

/// Mirror of left_null_basis for the right null-space of a wide
/// full-row-rank matrix: a B = 0.
ComplexMatrix null_basis(const ComplexMatrix& a, Eigen::Index k);

/// SVD-based inverse of a square matrix that refuses to invert anything with
/// condition number above `cond_limit` (throws IllConditioned).
ComplexMatrix inverse_checked(const ComplexMatrix& a, double cond_limit = 1e12);

}  // namespace atwr
