#include "sinrkit/linalg.hpp"

#include <cmath>

#include "sinrkit/errors.hpp"

namespace sinrkit {

ComplexMatrix sample_ginibre(int rows, int cols, RngState& rng) {
  if (rows <= 0 || cols <= 0) {
    throw ConfigError("sample_ginibre: dimensions must be positive");
  }
  ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = rng.complex_normal();
    }
  }
  return m;
}

ComplexMatrix sample_haar_unitary(int n, RngState& rng) {
  ComplexMatrix g = sample_ginibre(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the diagonal phases so Q is exactly Haar rather than QR-biased.
  for (int j = 0; j < n; ++j) {
    std::complex<double> d = r(j, j);
    const double mag = std::abs(d);
    const std::complex<double> phase = mag > 0.0 ? d / mag : 1.0;
    q.col(j) *= phase;
  }
  return q;
}

ComplexMatrix sample_haar_truncation(int full_dim, int rows, int cols,
                                     RngState& rng) {
  if (rows > full_dim || cols > full_dim) {
    throw ConfigError(
        "sample_haar_truncation: block exceeds the unitary dimension");
  }
  ComplexMatrix u = sample_haar_unitary(full_dim, rng);
  return u.topLeftCorner(rows, cols);
}

ComplexMatrix cholesky_lower(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw ConfigError("cholesky_lower: matrix must be square");
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(
        "cholesky_lower: matrix is not positive definite");
  }
  return llt.matrixL();
}

ComplexMatrix hermitian_inverse(const ComplexMatrix& a) {
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(
        "hermitian_inverse: matrix is not positive definite");
  }
  return llt.solve(Eigen::MatrixXcd::Identity(a.rows(), a.cols()));
}

double diagonal_of_inverse(const ComplexMatrix& a, int k) {
  if (k < 0 || k >= a.rows()) {
    throw ConfigError("diagonal_of_inverse: index out of range");
  }
  ComplexMatrix L = cholesky_lower(a);
  ComplexVector e = ComplexVector::Zero(a.rows());
  e(k) = 1.0;
  ComplexVector v = L.triangularView<Eigen::Lower>().solve(e);
  return v.squaredNorm();
}

std::vector<double> diagonal_of_inverse_from_factor(const ComplexMatrix& L) {
  const int n = static_cast<int>(L.rows());
  std::vector<double> out(n);
  ComplexVector e = ComplexVector::Zero(n);
  for (int k = 0; k < n; ++k) {
    e.setZero();
    e(k) = 1.0;
    ComplexVector v = L.triangularView<Eigen::Lower>().solve(e);
    out[k] = v.squaredNorm();
  }
  return out;
}

std::vector<double> diagonal_of_inverse_all(const ComplexMatrix& a) {
  return diagonal_of_inverse_from_factor(cholesky_lower(a));
}

}  // namespace sinrkit
