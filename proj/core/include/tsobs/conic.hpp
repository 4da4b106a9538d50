#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsobs/linalg.hpp"

namespace tsobs {

// Solver-agnostic conic program over a real variable vector x:
//
//   minimize    c^T x
//   subject to  F0_k + sum_l x_l F_lk  is PSD          (semidefinite blocks)
//               || V_k x + v0_k ||_2 <= a_k^T x + t0_k  (second-order cones)
//
// Constraint matrices are stored densely per variable; models handled here
// are small (a few dozen variables, blocks of order 2n).
struct VariableBlock {
    std::string name;
    enum class Kind { Symmetric, Full, Scalar } kind = Kind::Scalar;
    int rows = 1;
    int cols = 1;
    int offset = 0;  // index of the first scalar variable
    int size() const;
};

struct LmiTerm {
    int var = 0;
    Matrix coef;  // symmetric, dim x dim
};

struct LmiBlock {
    std::string name;
    Matrix constant;  // symmetric
    std::vector<LmiTerm> terms;

    int dim() const { return static_cast<int>(constant.rows()); }
    Matrix evaluate(const Vector& x) const;
};

struct SocBlock {
    std::string name;
    Matrix v_coef;        // m x num_vars
    Vector v_const;       // m
    Vector t_coef;        // num_vars
    double t_const = 0.0;
    // Variable index when the cone bounds a dedicated epigraph variable that
    // appears nowhere else except the objective.
    std::optional<int> epigraph_var;

    double slack(const Vector& x) const;  // t - ||v||
};

struct ConicProgram {
    int num_vars = 0;
    std::vector<VariableBlock> blocks;
    std::vector<LmiBlock> lmis;
    std::vector<SocBlock> socs;
    Vector objective;  // minimized

    // Barrier degree: sum of LMI orders plus 2 per cone.
    int barrier_degree() const;
};

struct SolverOptions {
    double gap_tolerance = 1e-9;   // stop when degree / tau falls below
    double tau_initial = 1.0;
    double tau_growth = 10.0;
    double tau_max = 1e14;
    int max_newton_steps = 200;    // per centering
    double newton_tolerance = 1e-10;  // on half the squared Newton decrement
};

struct SolveStats {
    int outer_iterations = 0;
    int newton_steps = 0;
    double final_tau = 0.0;
    double gap_bound = 0.0;
    double phase1_slack = 0.0;
};

struct ConicSolution {
    Vector x;
    double objective = 0.0;
    SolveStats stats;
};

// Two-phase log-barrier interior-point method. Throws InfeasibleError when
// the phase-I slack is certified positive and SolverError on numerical
// breakdown.
ConicSolution solve_conic(const ConicProgram& program, const SolverOptions& options = {});

// Minimum over all constraints of the constraint slack at x (LMI minimum
// eigenvalue, cone t - ||v||). Positive means strictly feasible.
double min_constraint_slack(const ConicProgram& program, const Vector& x);

}  // namespace tsobs
