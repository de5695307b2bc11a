#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "sinrkit/rng.hpp"

namespace sinrkit {

// Dense complex matrix, row-major entry storage (the order file formats use).
using ComplexMatrix =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic,
                  Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;

// Matrix of iid CN(0,1) entries (unit total variance per entry).
ComplexMatrix sample_ginibre(int rows, int cols, RngState& rng);

// Haar-distributed unitary via QR of a Ginibre matrix with the diagonal phase
// fix (without it the QR convention biases the distribution).
ComplexMatrix sample_haar_unitary(int n, RngState& rng);

// Top-left rows x cols block of a Haar unitary of size full_dim.
ComplexMatrix sample_haar_truncation(int full_dim, int rows, int cols,
                                     RngState& rng);

inline ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }
inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b;
}

// Lower Cholesky factor of a Hermitian positive definite matrix.
// Throws NotPositiveDefinite otherwise.
ComplexMatrix cholesky_lower(const ComplexMatrix& a);

// Inverse of a Hermitian positive definite matrix (through Cholesky).
ComplexMatrix hermitian_inverse(const ComplexMatrix& a);

// [A^{-1}]_{kk} for Hermitian positive definite A and 0-based k, via one
// triangular solve: A = L L* gives [A^{-1}]_{kk} = |L^{-1} e_k|^2.
double diagonal_of_inverse(const ComplexMatrix& a, int k);

// All diagonal entries of A^{-1} at once (n triangular solves on one factor).
std::vector<double> diagonal_of_inverse_all(const ComplexMatrix& a);

// Same, but reusing an existing lower Cholesky factor.
std::vector<double> diagonal_of_inverse_from_factor(const ComplexMatrix& L);

}  // namespace sinrkit
