#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace qapca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown when a matrix factorization does not converge.
struct SvdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when an operation requires full column rank and the input does
/// not have it. `achieved_rank` is the numerical rank that was found.
struct RankDeficientError : std::runtime_error {
  int achieved_rank;
  RankDeficientError(const std::string& what, int rank)
      : std::runtime_error(what), achieved_rank(rank) {}
};

/// Thin SVD of a dense matrix: m = u * sigma.asDiagonal() * v^T.
/// Singular values are nonnegative and sorted in decreasing order.
struct SvdResult {
  Matrix u;      // rows(m) x r
  Vector sigma;  // r, descending
  Matrix v;      // cols(m) x r
};

/// Gram matrix x^T x (symmetric positive semidefinite).
Matrix gram(const Matrix& x);

/// Thin SVD. Throws SvdError if the decomposition does not converge.
SvdResult svd(const Matrix& m);

/// Sum of singular values.
double nuclear_norm(const Matrix& m);

/// Nearest matrix with orthonormal columns in Frobenius distance (u * v^T
/// from the thin SVD). Requires cols <= rows and full column rank; throws
/// RankDeficientError otherwise, since the minimizer is not unique.
Matrix nearest_orthonormal(const Matrix& t);

/// Removes the span of the unit vector r from every column of x:
/// returns x - r r^T x. Throws std::invalid_argument unless ||r|| = 1
/// within 1e-10.
Matrix nullspace_project(const Matrix& x, const Vector& r);

/// Numerical column rank at relative tolerance `rtol` (singular values
/// above rtol * sigma_max count).
int numerical_rank(const Matrix& m, double rtol = 1e-8);

/// Max-norm distance of g^T g from the identity; 0 for orthonormal columns.
double orthonormality_defect(const Matrix& g);

}  // namespace qapca
