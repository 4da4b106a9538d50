#include "tsobs/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace tsobs {

namespace {

Vector sym_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric_part(m), Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

}  // namespace

double min_eigenvalue(const Matrix& m) { return sym_eigenvalues(m).minCoeff(); }

double max_eigenvalue(const Matrix& m) { return sym_eigenvalues(m).maxCoeff(); }

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

int numerical_rank(const Matrix& m, double rel_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector& s = svd.singularValues();
    if (s(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) > rel_tol * s(0)) ++rank;
    }
    return rank;
}

double asymmetry(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace tsobs
