#include "tsobs/lmi.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "tsobs/error.hpp"

namespace tsobs {

std::string to_string(Objective objective) {
    switch (objective) {
        case Objective::MinBeta: return "min_beta";
        case Objective::MaxGamma: return "max_gamma";
        case Objective::FeasibilityOnly: return "feasibility";
    }
    return "unknown";
}

Objective objective_from_string(const std::string& name) {
    if (name == "min_beta") return Objective::MinBeta;
    if (name == "max_gamma") return Objective::MaxGamma;
    if (name == "feasibility" || name == "feasibility_only") return Objective::FeasibilityOnly;
    throw ModelError("/design/objective", "unknown objective '" + name + "'");
}

void DesignSpec::validate(int n_theta) const {
    if (!(pd_margin > 0.0) || !std::isfinite(pd_margin)) {
        throw ModelError("/design/pd_margin", "pd_margin must be positive");
    }
    if (!(variable_bound > 0.0) || !std::isfinite(variable_bound)) {
        throw ModelError("/design/variable_bound", "variable_bound must be positive");
    }
    if (theta_bar && (!(*theta_bar > 0.0) || !std::isfinite(*theta_bar))) {
        throw ModelError("/design/theta_bar", "theta_bar must be positive");
    }
    if (n_theta > 0 && objective != Objective::MaxGamma && !theta_bar) {
        throw ModelError("/design/theta_bar", "theta_bar is required unless objective is max_gamma");
    }
    if (rho.size() != n_theta) {
        throw ModelError("/design/rho", "expected " + std::to_string(n_theta) + " adaptation gains");
    }
    for (Eigen::Index j = 0; j < rho.size(); ++j) {
        if (!(rho(j) > 0.0) || !std::isfinite(rho(j))) {
            throw ModelError("/design/rho/" + std::to_string(j), "adaptation gains must be positive");
        }
    }
}

PseudoInverse pseudo_inverse(const Matrix& C) {
    Eigen::JacobiSVD<Matrix> svd(C, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    Vector s_inv = Vector::Zero(s.size());
    const double cutoff = s.size() > 0 ? 1e-12 * s(0) : 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) > cutoff) s_inv(k) = 1.0 / s(k);
    }
    PseudoInverse out;
    out.C_pinv = svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
    out.H = Matrix::Identity(C.cols(), C.cols()) - out.C_pinv * C;
    return out;
}

std::vector<RankEntry> RankReport::failures() const {
    std::vector<RankEntry> out;
    for (const auto& e : entries) {
        if (!e.passes()) out.push_back(e);
    }
    return out;
}

namespace {

RankEntry rank_entry(const Matrix& T, const Matrix& C, int i, int j, char which) {
    RankEntry e{i, j, which};
    e.zero = T.size() == 0 || T.cwiseAbs().maxCoeff() == 0.0;
    if (e.zero) return e;
    e.rank = numerical_rank(T);
    e.rank_with_C = numerical_rank(C * T);
    e.full_column_rank = e.rank == T.cols();
    e.rank_preserved = e.rank == e.rank_with_C;
    return e;
}

// Basis matrix of the symmetric variable at (a, b), a <= b.
Matrix sym_basis(int n, int a, int b) {
    Matrix e = Matrix::Zero(n, n);
    e(a, b) = 1.0;
    e(b, a) = 1.0;
    return e;
}

struct SymIndex {
    int a;
    int b;
};

std::vector<SymIndex> sym_indices(int n) {
    std::vector<SymIndex> out;
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) out.push_back({a, b});
    }
    return out;
}

const Matrix& transmission_matrix(const Transmission& t, char which) {
    return which == 'A' ? t.A : which == 'B' ? t.B : t.F;
}

}  // namespace

RankReport check_rank_conditions(const TSModel& model) {
    RankReport report;
    for (int i = 0; i < model.dims.r(); ++i) {
        for (int j = 0; j < model.dims.n_theta; ++j) {
            for (char which : {'A', 'B', 'F'}) {
                report.entries.push_back(
                    rank_entry(transmission_matrix(model.transmission[i][j], which), model.C, i, j, which));
            }
        }
    }
    for (const auto& e : report.entries) report.rank_conditions_hold &= e.passes();
    return report;
}

ConstraintSystem build_constraints(const TSModel& model, const DesignSpec& spec) {
    model.validate();
    spec.validate(model.dims.n_theta);

    const int n = model.dims.n;
    const int n_y = model.dims.n_y;
    const int r = model.dims.r();
    const int n_theta = model.dims.n_theta;
    const double eps = spec.pd_margin;
    const Matrix I = Matrix::Identity(n, n);

    ConstraintSystem sys;
    sys.pinv = pseudo_inverse(model.C);
    sys.a_bar = max_transmission_norm(model);
    const bool has_schur = n_theta > 0;
    const bool gamma_free = has_schur && spec.objective == Objective::MaxGamma;
    if (has_schur && !gamma_free) {
        const double root = n_theta * sys.a_bar * *spec.theta_bar;
        sys.gamma_fixed = root * root;
    }

    ConicProgram& prog = sys.program;
    DesignVariables& vars = sys.vars;
    const auto sym = sym_indices(n);
    const int n_sym = static_cast<int>(sym.size());
    int next = 0;
    vars.P = next;
    prog.blocks.push_back({"P", VariableBlock::Kind::Symmetric, n, n, next});
    next += n_sym;
    vars.Q = next;
    prog.blocks.push_back({"Q", VariableBlock::Kind::Symmetric, n, n, next});
    next += n_sym;
    for (int i = 0; i < r; ++i) {
        vars.M.push_back(next);
        prog.blocks.push_back({"M_" + std::to_string(i + 1), VariableBlock::Kind::Full, n, n_y, next});
        next += n * n_y;
    }
    if (gamma_free) {
        vars.gamma = next;
        prog.blocks.push_back({"gamma", VariableBlock::Kind::Scalar, 1, 1, next});
        ++next;
        vars.p_max = next;
        prog.blocks.push_back({"p_max", VariableBlock::Kind::Scalar, 1, 1, next});
        ++next;
    }
    vars.design_count = next;

    // Epigraph variables for the annihilation residuals.
    if (spec.objective == Objective::MinBeta) {
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < n_theta; ++j) {
                for (char which : {'A', 'B', 'F'}) {
                    const Matrix& T = transmission_matrix(model.transmission[i][j], which);
                    if (T.size() == 0 || (T.transpose() * sys.pinv.H).cwiseAbs().maxCoeff() == 0.0) {
                        continue;
                    }
                    vars.residuals.push_back({i, j, which, next});
                    const std::string name = std::string("t_") + which + "bar_" + std::to_string(i + 1) +
                                             std::to_string(j + 1);
                    prog.blocks.push_back({name, VariableBlock::Kind::Scalar, 1, 1, next});
                    ++next;
                }
            }
        }
    }
    prog.num_vars = next;
    prog.objective = Vector::Zero(next);

    // P >= eps I, Q >= eps I
    for (auto [offset, name] : {std::pair{vars.P, "pd_P"}, std::pair{vars.Q, "pd_Q"}}) {
        LmiBlock b;
        b.name = name;
        b.constant = -eps * I;
        for (int k = 0; k < n_sym; ++k) b.terms.push_back({offset + k, sym_basis(n, sym[k].a, sym[k].b)});
        prog.lmis.push_back(std::move(b));
    }

    // -(P A_i + A_i^T P - M_i C - C^T M_i^T + Q) - eps I >= 0
    for (int i = 0; i < r; ++i) {
        const Matrix& A = model.A[i];
        LmiBlock b;
        b.name = "lmi12_" + std::to_string(i + 1);
        b.constant = -eps * I;
        for (int k = 0; k < n_sym; ++k) {
            const Matrix e = sym_basis(n, sym[k].a, sym[k].b);
            b.terms.push_back({vars.P + k, -(e * A + A.transpose() * e)});
            b.terms.push_back({vars.Q + k, -e});
        }
        for (int a = 0; a < n; ++a) {
            for (int c = 0; c < n_y; ++c) {
                Matrix e = Matrix::Zero(n, n_y);
                e(a, c) = 1.0;
                const Matrix ec = e * model.C;
                b.terms.push_back({vars.M[i] + a * n_y + c, ec + ec.transpose()});
            }
        }
        prog.lmis.push_back(std::move(b));
    }

    // [[Q - gamma I, P], [P, I]] >= 0
    if (has_schur) {
        LmiBlock b;
        b.name = "schur13";
        b.constant = Matrix::Zero(2 * n, 2 * n);
        b.constant.bottomRightCorner(n, n) = I;
        if (!gamma_free) b.constant.topLeftCorner(n, n) = -sys.gamma_fixed * I;
        for (int k = 0; k < n_sym; ++k) {
            const Matrix e = sym_basis(n, sym[k].a, sym[k].b);
            Matrix q = Matrix::Zero(2 * n, 2 * n);
            q.topLeftCorner(n, n) = e;
            b.terms.push_back({vars.Q + k, q});
            Matrix p = Matrix::Zero(2 * n, 2 * n);
            p.topRightCorner(n, n) = e;
            p.bottomLeftCorner(n, n) = e;
            b.terms.push_back({vars.P + k, p});
        }
        if (gamma_free) {
            Matrix g = Matrix::Zero(2 * n, 2 * n);
            g.topLeftCorner(n, n) = -I;
            b.terms.push_back({*vars.gamma, g});
        }
        prog.lmis.push_back(std::move(b));
    }
    sys.matrix_constraints = static_cast<int>(prog.lmis.size());

    if (gamma_free) {
        LmiBlock b;
        b.name = "gamma_nonneg";
        b.constant = Matrix::Zero(1, 1);
        b.terms.push_back({*vars.gamma, Matrix::Ones(1, 1)});
        prog.lmis.push_back(std::move(b));
        prog.objective(*vars.gamma) = -1.0;

        // p I - P >= 0 and [[Q - gamma I, p I], [p I, I]] >= 0, so that
        // lambda_min(Q) >= gamma + p^2 >= 2 sqrt(gamma) lambda_max(P).
        LmiBlock bound;
        bound.name = "p_max";
        bound.constant = Matrix::Zero(n, n);
        bound.terms.push_back({*vars.p_max, I});
        for (int k = 0; k < n_sym; ++k) bound.terms.push_back({vars.P + k, -sym_basis(n, sym[k].a, sym[k].b)});
        prog.lmis.push_back(std::move(bound));

        LmiBlock eig;
        eig.name = "schur_eig10";
        eig.constant = Matrix::Zero(2 * n, 2 * n);
        eig.constant.bottomRightCorner(n, n) = I;
        for (int k = 0; k < n_sym; ++k) {
            Matrix q = Matrix::Zero(2 * n, 2 * n);
            q.topLeftCorner(n, n) = sym_basis(n, sym[k].a, sym[k].b);
            eig.terms.push_back({vars.Q + k, q});
        }
        Matrix g = Matrix::Zero(2 * n, 2 * n);
        g.topLeftCorner(n, n) = -I;
        eig.terms.push_back({*vars.gamma, g});
        Matrix pm = Matrix::Zero(2 * n, 2 * n);
        pm.topRightCorner(n, n) = I;
        pm.bottomLeftCorner(n, n) = I;
        eig.terms.push_back({*vars.p_max, pm});
        prog.lmis.push_back(std::move(eig));
    }

    // ||design variables||_2 <= bound
    {
        SocBlock s;
        s.name = "variable_bound";
        s.v_coef = Matrix::Zero(vars.design_count, next);
        s.v_coef.leftCols(vars.design_count) = Matrix::Identity(vars.design_count, vars.design_count);
        s.v_const = Vector::Zero(vars.design_count);
        s.t_coef = Vector::Zero(next);
        s.t_const = spec.variable_bound;
        prog.socs.push_back(std::move(s));
    }

    // t >= ||T^T P H||_F for each nonzero residual term
    for (const auto& res : vars.residuals) {
        const Matrix& T = transmission_matrix(model.transmission[res.submodel][res.parameter], res.which);
        const Eigen::Index m = T.cols() * n;
        SocBlock s;
        s.name = std::string("beta_") + res.which + "bar_" + std::to_string(res.submodel + 1) +
                 std::to_string(res.parameter + 1);
        s.v_coef = Matrix::Zero(m, next);
        for (int k = 0; k < n_sym; ++k) {
            const Matrix term = T.transpose() * sym_basis(n, sym[k].a, sym[k].b) * sys.pinv.H;
            s.v_coef.col(vars.P + k) = Eigen::Map<const Vector>(term.data(), m);
        }
        s.v_const = Vector::Zero(m);
        s.t_coef = Vector::Zero(next);
        s.t_coef(res.epigraph) = 1.0;
        s.epigraph_var = res.epigraph;
        prog.socs.push_back(std::move(s));
        prog.objective(res.epigraph) = 1.0;
    }
    return sys;
}

Vector annihilation_residuals(const TSModel& model, const Matrix& P, const Matrix& H) {
    const Matrix PH = P * H;
    Vector beta = Vector::Zero(model.dims.n_theta);
    for (int j = 0; j < model.dims.n_theta; ++j) {
        for (int i = 0; i < model.dims.r(); ++i) {
            const auto& t = model.transmission[i][j];
            beta(j) += (t.A.transpose() * PH).norm() + (t.B.transpose() * PH).norm() +
                       (t.F.transpose() * PH).norm();
        }
    }
    return beta;
}

ObserverDesign make_design(const TSModel& model, const Matrix& P, const Matrix& Q,
                           const std::vector<Matrix>& M, double gamma, const Vector& rho,
                           double pd_margin, Objective objective) {
    ObserverDesign d;
    d.P = P;
    d.Q = Q;
    d.M = M;
    d.gamma = gamma;
    d.rho = rho;
    d.pd_margin = pd_margin;
    d.objective = objective;
    const PseudoInverse pinv = pseudo_inverse(model.C);
    d.C_pinv = pinv.C_pinv;
    d.H = pinv.H;
    d.a_bar = max_transmission_norm(model);
    const double scale = model.dims.n_theta * d.a_bar;
    d.theta_bar_max = scale > 0.0 ? std::sqrt(std::max(gamma, 0.0)) / scale
                                  : std::numeric_limits<double>::infinity();
    Eigen::LLT<Matrix> llt(P);
    if (llt.info() != Eigen::Success) throw SolverError("Lyapunov matrix is not positive definite");
    d.L.reserve(M.size());
    for (const auto& m : M) d.L.push_back(llt.solve(m));
    d.beta = annihilation_residuals(model, P, pinv.H);
    return d;
}

ObserverDesign solve_design(const TSModel& model, const DesignSpec& spec) {
    ConstraintSystem sys = build_constraints(model, spec);
    const ConicSolution sol = solve_conic(sys.program, spec.solver);

    const int n = model.dims.n;
    const int n_y = model.dims.n_y;
    const auto unpack_sym = [&](int offset) {
        Matrix m(n, n);
        int k = 0;
        for (int a = 0; a < n; ++a) {
            for (int b = a; b < n; ++b, ++k) {
                m(a, b) = sol.x(offset + k);
                m(b, a) = sol.x(offset + k);
            }
        }
        return m;
    };
    const Matrix P = unpack_sym(sys.vars.P);
    const Matrix Q = unpack_sym(sys.vars.Q);
    std::vector<Matrix> M;
    for (int offset : sys.vars.M) {
        Matrix m(n, n_y);
        for (int a = 0; a < n; ++a) {
            for (int c = 0; c < n_y; ++c) m(a, c) = sol.x(offset + a * n_y + c);
        }
        M.push_back(std::move(m));
    }
    const double gamma = sys.vars.gamma ? sol.x(*sys.vars.gamma) : sys.gamma_fixed;
    ObserverDesign d = make_design(model, P, Q, M, gamma, spec.rho, spec.pd_margin, spec.objective);
    d.stats = sol.stats;
    return d;
}

double theta_bar_admissible(const ObserverDesign& design, int n_theta) {
    const double scale = n_theta * design.a_bar;
    if (scale == 0.0) return std::numeric_limits<double>::infinity();
    return min_eigenvalue(design.Q) / (2.0 * max_eigenvalue(design.P) * scale);
}

}  // namespace tsobs
