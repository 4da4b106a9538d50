#pragma once

#include <random>

#include "tsobs/lmi.hpp"
#include "tsobs/simulator.hpp"
#include "tsobs/tsmodel.hpp"

namespace tsobs::fixtures {

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
    }
    return m;
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Dimensions random_dims(std::mt19937_64& rng, int max_n = 4, int max_p = 2, int max_theta = 2) {
    Dimensions d;
    d.n = uniform_int(rng, 1, max_n);
    d.n_y = uniform_int(rng, 1, d.n);
    d.n_u = uniform_int(rng, 0, 2);
    d.n_p = uniform_int(rng, 0, max_p);
    d.n_theta = uniform_int(rng, 0, max_theta);
    return d;
}

inline AffineFamily random_family(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, int n_p) {
    AffineFamily f;
    f.base = random_matrix(rng, rows, cols);
    for (int j = 0; j < n_p; ++j) f.slopes.push_back(random_matrix(rng, rows, cols));
    return f;
}

inline std::vector<Premise> random_premises(std::mt19937_64& rng, const Dimensions& d) {
    std::vector<Premise> out;
    for (int j = 0; j < d.n_p; ++j) {
        Premise p;
        p.min = uniform(rng, -3.0, 1.0);
        p.max = p.min + uniform(rng, 0.1, 4.0);
        p.selector = random_matrix(rng, d.n_y + d.n_u, 1);
        out.push_back(p);
    }
    return out;
}

// Full row rank with probability one.
inline Matrix random_output(std::mt19937_64& rng, const Dimensions& d) {
    return random_matrix(rng, d.n_y, d.n);
}

inline ParamAffineModel random_param_affine(std::mt19937_64& rng, const Dimensions& d) {
    ParamAffineModel m;
    m.dims = d;
    m.A = random_family(rng, d.n, d.n, d.n_p);
    m.B = random_family(rng, d.n, d.n_u, d.n_p);
    m.F = random_family(rng, d.n, 1, d.n_p);
    for (int j = 0; j < d.n_theta; ++j) {
        m.transmission.push_back({random_family(rng, d.n, d.n, d.n_p), random_family(rng, d.n, d.n_u, d.n_p),
                                  random_family(rng, d.n, 1, d.n_p)});
    }
    m.C = random_output(rng, d);
    m.premises = random_premises(rng, d);
    return m;
}

// Hurwitz vertex matrices close to a common base.
inline TSModel random_stable_ts_model(std::mt19937_64& rng, const Dimensions& d, double transmission_scale = 0.3) {
    TSModel m;
    m.dims = d;
    m.premises = random_premises(rng, d);
    m.vertex_bits = default_vertex_bits(d.n_p);
    m.C = random_output(rng, d);
    const Matrix base = random_matrix(rng, d.n, d.n, 0.5);
    for (int i = 0; i < d.r(); ++i) {
        Matrix a = base + random_matrix(rng, d.n, d.n, 0.2);
        const double shift = a.eigenvalues().real().maxCoeff() + uniform(rng, 0.5, 2.0);
        a -= shift * Matrix::Identity(d.n, d.n);
        m.A.push_back(a);
        m.B.push_back(random_matrix(rng, d.n, d.n_u));
        m.F.push_back(random_matrix(rng, d.n, 1));
        std::vector<Transmission> row;
        for (int j = 0; j < d.n_theta; ++j) {
            row.push_back({random_matrix(rng, d.n, d.n, transmission_scale), random_matrix(rng, d.n, d.n_u),
                           random_matrix(rng, d.n, 1)});
        }
        m.transmission.push_back(row);
    }
    return m;
}

}  // namespace tsobs::fixtures
