#pragma once

#include <Eigen/Dense>
#include <lapacke.h>

#include <string>

#include "rydfrag/errors.hpp"

namespace rydfrag::linalg {

// Dense symmetric eigenproblem through LAPACK. Eigenvalues ascend; with
// vectors requested the columns of `vectors` are orthonormal.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // empty when not requested
};

// All eigenpairs (divide and conquer).
inline SymmetricEigen eigh(Eigen::MatrixXd a, bool want_vectors = true) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  SymmetricEigen out;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'U', n, a.data(), n,
                                         out.values.data());
  if (info != 0) throw SolverError("dsyevd failed with info = " + std::to_string(info));
  if (want_vectors) out.vectors = std::move(a);
  return out;
}

// Eigenpairs with ascending indices in [first, last] (0-based, inclusive).
inline SymmetricEigen eigh_range(Eigen::MatrixXd a, Eigen::Index first, Eigen::Index last,
                                 bool want_vectors = true) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (first < 0 || last < first || last >= n) throw InvalidArgument("eigh_range: bad index window");
  const lapack_int count = static_cast<lapack_int>(last - first + 1);
  SymmetricEigen out;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, want_vectors ? count : 1);
  Eigen::VectorXi support(2 * count);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'I', 'U', n, a.data(), n,
                                         0.0, 0.0, static_cast<lapack_int>(first + 1),
                                         static_cast<lapack_int>(last + 1), 0.0, &found, w.data(), z.data(), n,
                                         support.data());
  if (info != 0) throw SolverError("dsyevr failed with info = " + std::to_string(info));
  if (found != count) throw SolverError("dsyevr returned " + std::to_string(found) + " of " +
                                        std::to_string(count) + " requested eigenpairs");
  out.values = w.head(count);
  if (want_vectors) out.vectors = std::move(z);
  return out;
}

}  // namespace rydfrag::linalg
