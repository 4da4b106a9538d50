#include "tsobs/tsmodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "tsobs/error.hpp"

namespace tsobs {

namespace {

// Paths below follow the JSON document layout so loader errors point into
// the file.
void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& path) {
    if (m.rows() != rows || m.cols() != cols) {
        throw ModelError(path, "expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                                   " matrix, got " + std::to_string(m.rows()) + "x" +
                                   std::to_string(m.cols()));
    }
    if (!m.allFinite()) throw ModelError(path, "matrix has non-finite entries");
}

void check_family(const AffineFamily& f, Eigen::Index rows, Eigen::Index cols, int n_p,
                  const std::string& path) {
    check_shape(f.base, rows, cols, path + "/base");
    if (static_cast<int>(f.slopes.size()) != n_p) {
        throw ModelError(path + "/slopes", "expected " + std::to_string(n_p) + " slope matrices");
    }
    for (int j = 0; j < n_p; ++j) {
        check_shape(f.slopes[j], rows, cols, path + "/slopes/" + std::to_string(j));
    }
}

void check_premises(const std::vector<Premise>& premises, const Dimensions& d) {
    if (static_cast<int>(premises.size()) != d.n_p) {
        throw ModelError("/premises", "expected " + std::to_string(d.n_p) + " premise variables");
    }
    for (int j = 0; j < d.n_p; ++j) {
        const auto& p = premises[j];
        const std::string path = "/premises/" + std::to_string(j);
        if (!std::isfinite(p.min) || !std::isfinite(p.max)) {
            throw ModelError(path, "premise bounds must be finite");
        }
        if (!(p.min < p.max)) throw ModelError(path, "premise bound min must be below max");
        if (p.selector.size() != d.n_y + d.n_u) {
            throw ModelError(path + "/selector",
                             "selector must have length n_y + n_u = " + std::to_string(d.n_y + d.n_u));
        }
        if (!p.selector.allFinite()) throw ModelError(path + "/selector", "non-finite entry");
    }
}

void check_output_matrix(const Matrix& C, const Dimensions& d) {
    check_shape(C, d.n_y, d.n, "/C");
    if (numerical_rank(C) != d.n_y) throw ModelError("/C", "C must have full row rank");
}

}  // namespace

void Dimensions::validate() const {
    if (n < 1) throw ModelError("/dimensions/n", "n must be at least 1");
    if (n_y < 1 || n_y > n) throw ModelError("/dimensions/n_y", "n_y must satisfy 1 <= n_y <= n");
    if (n_u < 0) throw ModelError("/dimensions/n_u", "n_u must be non-negative");
    if (n_p < 0 || n_p > 16) throw ModelError("/dimensions/n_p", "n_p must be in [0, 16]");
    if (n_theta < 0) throw ModelError("/dimensions/n_theta", "n_theta must be non-negative");
}

Matrix AffineFamily::at(const Vector& z) const {
    Matrix m = base;
    for (std::size_t j = 0; j < slopes.size(); ++j) m += z(static_cast<Eigen::Index>(j)) * slopes[j];
    return m;
}

void ParamAffineModel::validate() const {
    dims.validate();
    check_family(A, dims.n, dims.n, dims.n_p, "/A");
    check_family(B, dims.n, dims.n_u, dims.n_p, "/B");
    check_family(F, dims.n, 1, dims.n_p, "/F");
    if (static_cast<int>(transmission.size()) != dims.n_theta) {
        throw ModelError("/transmission",
                         "expected " + std::to_string(dims.n_theta) + " transmission entries");
    }
    for (int k = 0; k < dims.n_theta; ++k) {
        const std::string path = "/transmission/" + std::to_string(k);
        check_family(transmission[k].A, dims.n, dims.n, dims.n_p, path + "/A");
        check_family(transmission[k].B, dims.n, dims.n_u, dims.n_p, path + "/B");
        check_family(transmission[k].F, dims.n, 1, dims.n_p, path + "/F");
    }
    check_output_matrix(C, dims);
    check_premises(premises, dims);
}

void TSModel::validate() const {
    dims.validate();
    const int r = dims.r();
    if (static_cast<int>(A.size()) != r || static_cast<int>(B.size()) != r ||
        static_cast<int>(F.size()) != r || static_cast<int>(transmission.size()) != r ||
        static_cast<int>(vertex_bits.size()) != r) {
        throw ModelError("/vertices", "expected " + std::to_string(r) + " submodels");
    }
    std::set<std::uint32_t> seen;
    for (int i = 0; i < r; ++i) {
        const std::string path = "/vertices/" + std::to_string(i);
        check_shape(A[i], dims.n, dims.n, path + "/A");
        check_shape(B[i], dims.n, dims.n_u, path + "/B");
        check_shape(F[i], dims.n, 1, path + "/F");
        if (static_cast<int>(transmission[i].size()) != dims.n_theta) {
            throw ModelError(path + "/transmission",
                             "expected " + std::to_string(dims.n_theta) + " transmission entries");
        }
        for (int j = 0; j < dims.n_theta; ++j) {
            const std::string tp = path + "/transmission/" + std::to_string(j);
            check_shape(transmission[i][j].A, dims.n, dims.n, tp + "/A");
            check_shape(transmission[i][j].B, dims.n, dims.n_u, tp + "/B");
            check_shape(transmission[i][j].F, dims.n, 1, tp + "/F");
        }
        if (vertex_bits[i] >= static_cast<std::uint32_t>(r)) {
            throw ModelError(path + "/bits", "bit pattern out of range");
        }
        if (!seen.insert(vertex_bits[i]).second) {
            throw ModelError(path + "/bits", "duplicate bit pattern");
        }
    }
    check_output_matrix(C, dims);
    check_premises(premises, dims);
}

std::vector<std::uint32_t> default_vertex_bits(int n_p) {
    const std::uint32_t r = 1u << n_p;
    std::vector<std::uint32_t> bits(r);
    for (std::uint32_t i = 0; i < r; ++i) bits[i] = (r - 1) ^ i;
    return bits;
}

Vector corner(const std::vector<Premise>& premises, std::uint32_t bits) {
    Vector z(static_cast<Eigen::Index>(premises.size()));
    for (std::size_t j = 0; j < premises.size(); ++j) {
        z(static_cast<Eigen::Index>(j)) = (bits >> j) & 1u ? premises[j].max : premises[j].min;
    }
    return z;
}

Vector eval_weights(const TSModel& model, const Vector& z) {
    const int n_p = model.dims.n_p;
    if (z.size() != n_p) {
        throw ModelError("", "premise vector has length " + std::to_string(z.size()) +
                                 ", expected " + std::to_string(n_p));
    }
    Vector eta(n_p);
    for (int j = 0; j < n_p; ++j) {
        const auto& p = model.premises[j];
        eta(j) = std::clamp((z(j) - p.min) / (p.max - p.min), 0.0, 1.0);
    }
    const int r = model.dims.r();
    Vector mu(r);
    for (int i = 0; i < r; ++i) {
        double w = 1.0;
        for (int j = 0; j < n_p; ++j) {
            w *= (model.vertex_bits[i] >> j) & 1u ? eta(j) : 1.0 - eta(j);
        }
        mu(i) = w;
    }
    return mu;
}

PremiseValue premise_from_io(const TSModel& model, const Vector& y, const Vector& u) {
    const auto& d = model.dims;
    if (y.size() != d.n_y || u.size() != d.n_u) {
        throw ModelError("", "output/input vector dimension mismatch");
    }
    Vector yu(d.n_y + d.n_u);
    yu << y, u;
    PremiseValue out{Vector(d.n_p), false};
    for (int j = 0; j < d.n_p; ++j) {
        const auto& p = model.premises[j];
        const double raw = p.selector.dot(yu);
        const double clamped = std::clamp(raw, p.min, p.max);
        if (clamped != raw) out.saturated = true;
        out.z(j) = clamped;
    }
    return out;
}

TSModel snl_decompose(const ParamAffineModel& pam) {
    pam.validate();
    if (pam.dims.n_p < 1) throw ModelError("/dimensions/n_p", "sector decomposition needs n_p >= 1");

    TSModel ts;
    ts.dims = pam.dims;
    ts.C = pam.C;
    ts.premises = pam.premises;
    ts.vertex_bits = default_vertex_bits(pam.dims.n_p);
    const int r = pam.dims.r();
    ts.A.reserve(r);
    ts.B.reserve(r);
    ts.F.reserve(r);
    ts.transmission.resize(r);
    for (int i = 0; i < r; ++i) {
        const Vector z = corner(pam.premises, ts.vertex_bits[i]);
        ts.A.push_back(pam.A.at(z));
        ts.B.push_back(pam.B.at(z));
        ts.F.push_back(pam.F.at(z));
        for (const auto& fam : pam.transmission) {
            ts.transmission[i].push_back({fam.A.at(z), fam.B.at(z), fam.F.at(z)});
        }
    }
    return ts;
}

BlendedMatrices assemble_matrices(const TSModel& model, const Vector& mu, const Vector& theta) {
    const auto& d = model.dims;
    if (mu.size() != d.r()) throw ModelError("", "weight vector has wrong length");
    if (theta.size() != d.n_theta) throw ModelError("", "parameter vector has wrong length");
    if (std::abs(mu.sum() - 1.0) > 1e-9 || mu.minCoeff() < -1e-9) {
        throw ModelError("", "weight vector is not convex");
    }
    BlendedMatrices out{Matrix::Zero(d.n, d.n), Matrix::Zero(d.n, d.n_u), Vector::Zero(d.n)};
    for (int i = 0; i < d.r(); ++i) {
        Matrix a = model.A[i];
        Matrix b = model.B[i];
        Vector f = model.F[i];
        for (int j = 0; j < d.n_theta; ++j) {
            const auto& t = model.transmission[i][j];
            a += theta(j) * t.A;
            b += theta(j) * t.B;
            f += theta(j) * t.F;
        }
        out.A += mu(i) * a;
        out.B += mu(i) * b;
        out.F += mu(i) * f;
    }
    return out;
}

double max_transmission_norm(const TSModel& model) {
    double a_bar = 0.0;
    for (const auto& row : model.transmission) {
        for (const auto& t : row) a_bar = std::max(a_bar, spectral_norm(t.A));
    }
    return a_bar;
}

}  // namespace tsobs
