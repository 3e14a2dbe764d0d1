#include "atwr/linalg.hpp"

#include <cmath>
#include <utility>

namespace atwr {

namespace {

constexpr double kRankTol = 1e-12;

void require_finite(const ComplexMatrix& a, const char* op) {
  if (!is_finite(a)) {
    throw InvalidInput(std::string(op) + ": matrix has non-finite entries");
  }
}

// Rotate the unit phase of each diagonal entry of R into the columns of Q so
// the diagonal of R becomes real and nonnegative. Zero diagonals are left
// untouched (their phase is arbitrary anyway).
void normalize_phases(ComplexMatrix& q, ComplexMatrix& r) {
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    const double mag = std::abs(r(i, i));
    if (mag == 0.0) continue;
    const Complex phase = r(i, i) / mag;
    r.row(i) *= std::conj(phase);
    q.col(i) *= phase;
  }
}

void check_full_rank(const RealVector& s, const char* op) {
  const Eigen::Index n = s.size();
  if (n == 0 || s(0) == 0.0 || s(n - 1) < kRankTol * s(0)) {
    throw RankDeficient(std::string(op) + ": matrix is numerically rank-deficient");
  }
}

}  // namespace

bool is_finite(const ComplexMatrix& a) { return a.allFinite(); }

SvdResult svd(const ComplexMatrix& a) {
  if (a.size() == 0) throw InvalidInput("svd: empty matrix");
  require_finite(a, "svd");
  Eigen::JacobiSVD<ComplexMatrix> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

QrResult qr(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("qr: matrix must be square");
  if (a.size() == 0) throw InvalidInput("qr: empty matrix");
  require_finite(a, "qr");
  Eigen::HouseholderQR<ComplexMatrix> dec(a);
  ComplexMatrix q = dec.householderQ();
  ComplexMatrix r = dec.matrixQR().triangularView<Eigen::Upper>();
  normalize_phases(q, r);
  return {std::move(q), std::move(r)};
}

LqResult lq(const ComplexMatrix& a) {
  // A = L Q  <=>  A^H = Q_r R with L = R^H, Q = Q_r^H.
  QrResult adj = qr(a.adjoint());
  return {adj.r.adjoint(), adj.q.adjoint()};
}

ComplexMatrix left_null_basis(const ComplexMatrix& a, Eigen::Index k) {
  if (a.size() == 0) throw InvalidInput("left_null_basis: empty matrix");
  require_finite(a, "left_null_basis");
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  if (rows < cols) {
    throw DimensionMismatch("left_null_basis: matrix must have at least as many rows as columns");
  }
  if (k > rows - cols) {
    throw NullSpaceTooSmall("left_null_basis: requested basis exceeds null-space dimension");
  }
  SvdResult dec = svd(a);
  check_full_rank(dec.s, "left_null_basis");
  return dec.u.rightCols(k);
}

ComplexMatrix null_basis(const ComplexMatrix& a, Eigen::Index k) {
  if (a.size() == 0) throw InvalidInput("null_basis: empty matrix");
  require_finite(a, "null_basis");
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  if (cols < rows) {
    throw DimensionMismatch("null_basis: matrix must have at least as many columns as rows");
  }
  if (k > cols - rows) {
    throw NullSpaceTooSmall("null_basis: requested basis exceeds null-space dimension");
  }
  SvdResult dec = svd(a);
  check_full_rank(dec.s, "null_basis");
  return dec.v.rightCols(k);
}

ComplexMatrix inverse_checked(const ComplexMatrix& a, double cond_limit) {
  if (a.rows() != a.cols()) throw DimensionMismatch("inverse_checked: matrix must be square");
  require_finite(a, "inverse_checked");
  Eigen::JacobiSVD<ComplexMatrix> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = dec.singularValues();
  const Eigen::Index n = s.size();
  if (!(s(n - 1) > 0) || s(0) / s(n - 1) > cond_limit) {
    throw IllConditioned("inverse_checked: condition number above limit");
  }
  return dec.matrixV() * s.cwiseInverse().asDiagonal() * dec.matrixU().adjoint();
}

}  // namespace atwr
