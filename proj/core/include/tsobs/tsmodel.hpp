#pragma once

#include <cstdint>
#include <vector>

#include "tsobs/linalg.hpp"

namespace tsobs {

struct Dimensions {
    int n = 0;        // states
    int n_u = 0;      // inputs
    int n_y = 0;      // outputs
    int n_p = 0;      // premise variables
    int n_theta = 0;  // unknown parameters

    // Submodel count, 2^n_p.
    int r() const { return 1 << n_p; }

    void validate() const;

    bool operator==(const Dimensions&) const = default;
};

// A measured premise variable z_j = selector . (y, u), bounded to [min, max].
struct Premise {
    double min = 0.0;
    double max = 1.0;
    Vector selector;  // length n_y + n_u
};

// M(z) = base + sum_j z_j slopes[j].
struct AffineFamily {
    Matrix base;
    std::vector<Matrix> slopes;

    Matrix at(const Vector& z) const;
};

// Transmission matrices of one unknown parameter.
struct Transmission {
    Matrix A;  // n x n
    Matrix B;  // n x n_u
    Matrix F;  // n x 1
};

struct TransmissionFamily {
    AffineFamily A;
    AffineFamily B;
    AffineFamily F;
};

// Nonlinear system written affine in bounded premise variables and affine in
// the unknown parameters:
//   xdot = A(z) x + B(z) u + F(z) + sum_k theta_k (Abar_k(z) x + Bbar_k(z) u + Fbar_k(z))
//   y    = C x
struct ParamAffineModel {
    Dimensions dims;
    AffineFamily A;
    AffineFamily B;
    AffineFamily F;
    std::vector<TransmissionFamily> transmission;  // one per parameter
    Matrix C;
    std::vector<Premise> premises;

    void validate() const;
};

struct TSModel {
    Dimensions dims;
    std::vector<Matrix> A;  // r entries, n x n
    std::vector<Matrix> B;  // r entries, n x n_u
    std::vector<Matrix> F;  // r entries, n x 1
    // transmission[i][j]: submodel i, parameter j.
    std::vector<std::vector<Transmission>> transmission;
    Matrix C;
    std::vector<Premise> premises;
    // Bit j of vertex_bits[i] set: submodel i sits on the upper bound of premise j.
    std::vector<std::uint32_t> vertex_bits;

    void validate() const;
};

// Default corner assignment: submodel 0 takes every upper bound, the last
// submodel every lower bound.
std::vector<std::uint32_t> default_vertex_bits(int n_p);

// Premise-box corner addressed by a bit pattern.
Vector corner(const std::vector<Premise>& premises, std::uint32_t bits);

// Convex weights mu_i(z) as tensor products of normalized sector coordinates.
// z is clamped to the premise box.
Vector eval_weights(const TSModel& model, const Vector& z);

struct PremiseValue {
    Vector z;
    bool saturated = false;
};

// z_j = s_j . (y, u), clamped to the premise box.
PremiseValue premise_from_io(const TSModel& model, const Vector& y, const Vector& u);

// Sector-nonlinearity transform: vertex matrices are the affine families
// evaluated at the premise-box corners.
TSModel snl_decompose(const ParamAffineModel& pam);

struct BlendedMatrices {
    Matrix A;
    Matrix B;
    Vector F;
};

// sum_i mu_i (A_i + sum_j theta_j Abar_ij), and likewise for B and F.
BlendedMatrices assemble_matrices(const TSModel& model, const Vector& mu, const Vector& theta);

// Maximum spectral norm over all Abar_ij.
double max_transmission_norm(const TSModel& model);

}  // namespace tsobs
