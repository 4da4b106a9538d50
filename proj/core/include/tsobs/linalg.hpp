#pragma once

#include <Eigen/Dense>

namespace tsobs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix symmetric_part(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Extreme eigenvalues of the symmetric part of a square matrix.
double min_eigenvalue(const Matrix& m);
double max_eigenvalue(const Matrix& m);

double spectral_norm(const Matrix& m);

// Rank from singular values, counting those above rel_tol * sigma_max.
// The zero matrix has rank 0.
int numerical_rank(const Matrix& m, double rel_tol = 1e-10);

// Largest absolute entry of m - m^T.
double asymmetry(const Matrix& m);

bool all_finite(const Matrix& m);

}  // namespace tsobs
