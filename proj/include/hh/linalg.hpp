#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "hh/errors.hpp"

namespace hh::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Solves A x = b by partial-pivot LU. Throws SingularMatrix when a pivot
// falls below 1e-14 * max|A|.
Vector lu_solve(const Matrix& A, const Vector& b);

struct EigenResult {
  std::vector<std::complex<double>> eigenvalues;  // sorted by descending real part
  int iterations = 0;
  bool converged = true;
};

// Eigenvalues of a real dense matrix: balancing, Householder reduction to
// Hessenberg form, then Francis double-shift QR with deflation. On iteration
// exhaustion the unconverged block's diagonal is returned and converged is
// cleared.
EigenResult eigenvalues(const Matrix& A);

}  // namespace hh::linalg
