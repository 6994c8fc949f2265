#include "qapca/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace qapca {

Matrix gram(const Matrix& x) {
  if (!x.allFinite()) throw std::invalid_argument("gram: input has non-finite entries");
  Matrix g = x.transpose() * x;
  // Force exact symmetry; the product is symmetric only up to rounding.
  g = 0.5 * (g + g.transpose()).eval();
  return g;
}

SvdResult svd(const Matrix& m) {
  if (!m.allFinite()) throw std::invalid_argument("svd: input has non-finite entries");
  Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) {
    throw SvdError("svd: decomposition did not converge");
  }
  return SvdResult{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

double nuclear_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return svd(m).sigma.sum();
}

Matrix nearest_orthonormal(const Matrix& t) {
  if (t.cols() > t.rows()) {
    throw std::invalid_argument("nearest_orthonormal: matrix must be tall (cols <= rows)");
  }
  const SvdResult f = svd(t);
  const double smax = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < f.sigma.size(); ++i) {
    if (f.sigma(i) > 1e-10 * smax && f.sigma(i) > 0.0) ++rank;
  }
  if (rank < t.cols()) {
    throw RankDeficientError(
        "nearest_orthonormal: input has rank " + std::to_string(rank) + " < " +
            std::to_string(t.cols()) + " columns; nearest orthonormal matrix is not unique",
        rank);
  }
  return f.u * f.v.transpose();
}

Matrix nullspace_project(const Matrix& x, const Vector& r) {
  if (r.size() != x.rows()) {
    throw std::invalid_argument("nullspace_project: direction length does not match row count");
  }
  if (std::abs(r.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("nullspace_project: direction is not a unit vector");
  }
  return x - r * (r.transpose() * x);
}

int numerical_rank(const Matrix& m, double rtol) {
  if (m.size() == 0) return 0;
  const Vector s = svd(m).sigma;
  const double smax = s.size() > 0 ? s(0) : 0.0;
  if (!(smax > 0.0)) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rtol * smax) ++rank;
  }
  return rank;
}

double orthonormality_defect(const Matrix& g) {
  Matrix d = g.transpose() * g;
  d.diagonal().array() -= 1.0;
  return d.cwiseAbs().maxCoeff();
}

}  // namespace qapca
