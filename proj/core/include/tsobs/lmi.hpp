#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsobs/conic.hpp"
#include "tsobs/linalg.hpp"
#include "tsobs/tsmodel.hpp"

namespace tsobs {

enum class Objective { MinBeta, MaxGamma, FeasibilityOnly };

std::string to_string(Objective objective);
Objective objective_from_string(const std::string& name);

struct DesignSpec {
    std::optional<double> theta_bar;  // required unless MaxGamma or n_theta = 0
    Objective objective = Objective::MinBeta;
    double pd_margin = 1e-6;          // epsilon in P, Q >= eps I and the observer LMIs
    Vector rho;                       // adaptation gains, one per parameter
    double variable_bound = 100.0;    // ||(P, Q, M_i, gamma)||_2 <= bound
    SolverOptions solver;

    void validate(int n_theta) const;
};

struct ObserverDesign {
    Matrix P;
    Matrix Q;
    std::vector<Matrix> M;  // n x n_y per submodel
    std::vector<Matrix> L;  // P^{-1} M_i
    double gamma = 0.0;
    double a_bar = 0.0;
    double theta_bar_max = 0.0;  // +inf when n_theta * a_bar = 0
    Vector beta;                 // Frobenius-norm residuals, one per parameter
    Vector rho;
    Matrix C_pinv;
    Matrix H;
    double pd_margin = 1e-6;
    Objective objective = Objective::MinBeta;
    SolveStats stats;
};

struct PseudoInverse {
    Matrix C_pinv;  // n x n_y
    Matrix H;       // I - C_pinv C
};

// Moore-Penrose inverse through the SVD; singular values below
// 1e-12 * sigma_max are treated as zero.
PseudoInverse pseudo_inverse(const Matrix& C);

struct RankEntry {
    int submodel = 0;
    int parameter = 0;
    char which = 'A';  // 'A', 'B' or 'F'
    bool zero = false;
    int rank = 0;
    int rank_with_C = 0;
    bool full_column_rank = false;
    bool rank_preserved = false;

    bool passes() const { return zero || (full_column_rank && rank_preserved); }
};

struct RankReport {
    std::vector<RankEntry> entries;
    bool rank_conditions_hold = true;

    std::vector<RankEntry> failures() const;
};

// Per-matrix rank conditions on the transmission matrices: each nonzero
// Abar_ij, Bbar_ij, Fbar_ij of full column rank with rank(C T) = rank(T).
RankReport check_rank_conditions(const TSModel& model);

// Index layout of the decision variables inside the conic program.
struct DesignVariables {
    int P = 0;                      // offset of the symmetric P block
    int Q = 0;
    std::vector<int> M;             // offset per submodel, row-major n x n_y
    std::optional<int> gamma;       // present for MaxGamma
    std::optional<int> p_max;       // upper bound on lambda_max(P), present for MaxGamma
    struct Residual {
        int submodel;
        int parameter;
        char which;
        int epigraph;               // variable index of the bound t >= ||T^T P H||_F
    };
    std::vector<Residual> residuals;
    int design_count = 0;           // P, Q, M, gamma and p_max variables come first
};

struct ConstraintSystem {
    ConicProgram program;
    DesignVariables vars;
    double gamma_fixed = 0.0;   // used when gamma is not a decision variable
    double a_bar = 0.0;
    PseudoInverse pinv;
    int matrix_constraints = 0;  // observer-design matrix inequalities (P, Q, per-submodel, Schur)
};

ConstraintSystem build_constraints(const TSModel& model, const DesignSpec& spec);

// Solves the synthesis problem. Throws InfeasibleError / SolverError.
ObserverDesign solve_design(const TSModel& model, const DesignSpec& spec);

// Rebuilds an ObserverDesign from P, Q, M and gamma (gains, residuals,
// pseudo-inverse and derived bounds are recomputed).
ObserverDesign make_design(const TSModel& model, const Matrix& P, const Matrix& Q,
                           const std::vector<Matrix>& M, double gamma, const Vector& rho,
                           double pd_margin, Objective objective);

// Residual sum_i ||Abar_ij^T P H||_F + ||Bbar_ij^T P H||_F + ||Fbar_ij^T P H||_F per parameter.
Vector annihilation_residuals(const TSModel& model, const Matrix& P, const Matrix& H);

// lambda_min(Q) / (2 lambda_max(P) n_theta a_bar); +inf when n_theta a_bar = 0.
double theta_bar_admissible(const ObserverDesign& design, int n_theta);

}  // namespace tsobs
