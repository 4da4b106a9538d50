#include "tsobs/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

#include "tsobs/error.hpp"

namespace tsobs {

int VariableBlock::size() const {
    switch (kind) {
        case Kind::Symmetric: return rows * (rows + 1) / 2;
        case Kind::Full: return rows * cols;
        case Kind::Scalar: return 1;
    }
    return 0;
}

Matrix LmiBlock::evaluate(const Vector& x) const {
    Matrix f = constant;
    for (const auto& t : terms) f += x(t.var) * t.coef;
    return f;
}

double SocBlock::slack(const Vector& x) const {
    const double t = t_coef.dot(x) + t_const;
    const Vector v = v_coef * x + v_const;
    return t - v.norm();
}

int ConicProgram::barrier_degree() const {
    int degree = 2 * static_cast<int>(socs.size());
    for (const auto& lmi : lmis) degree += lmi.dim();
    return degree;
}

double min_constraint_slack(const ConicProgram& program, const Vector& x) {
    double slack = std::numeric_limits<double>::infinity();
    for (const auto& lmi : program.lmis) slack = std::min(slack, min_eigenvalue(lmi.evaluate(x)));
    for (const auto& soc : program.socs) slack = std::min(slack, soc.slack(x));
    return slack;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BarrierEval {
    double value = kInf;  // barrier only, objective excluded
    Vector gradient;
    Matrix hessian;
};

// Log barrier of the feasible set. Returns value = +inf outside the interior.
// Derivatives are only filled when `derivatives` is set.
BarrierEval barrier(const ConicProgram& prog, const Vector& x, bool derivatives) {
    const Eigen::Index nv = prog.num_vars;
    BarrierEval out;
    double value = 0.0;
    if (derivatives) {
        out.gradient = Vector::Zero(nv);
        out.hessian = Matrix::Zero(nv, nv);
    }

    for (const auto& lmi : prog.lmis) {
        const Matrix f = lmi.evaluate(x);
        Eigen::LLT<Matrix> llt(f);
        if (llt.info() != Eigen::Success) return out;
        const Matrix& l = llt.matrixL();
        const Vector diag = l.diagonal();
        if ((diag.array() <= 0.0).any()) return out;
        value -= 2.0 * diag.array().log().sum();
        if (!derivatives || lmi.terms.empty()) continue;

        const int d = lmi.dim();
        const auto nt = static_cast<Eigen::Index>(lmi.terms.size());
        Matrix w(d * d, nt);
        for (Eigen::Index k = 0; k < nt; ++k) {
            const auto& term = lmi.terms[static_cast<std::size_t>(k)];
            Matrix s = llt.matrixL().solve(term.coef);
            s = llt.matrixL().solve(s.transpose()).eval();
            out.gradient(term.var) -= s.trace();
            w.col(k) = Eigen::Map<const Vector>(s.data(), d * d);
        }
        const Matrix h = w.transpose() * w;
        for (Eigen::Index a = 0; a < nt; ++a) {
            for (Eigen::Index b = 0; b < nt; ++b) {
                out.hessian(lmi.terms[a].var, lmi.terms[b].var) += h(a, b);
            }
        }
    }

    for (const auto& soc : prog.socs) {
        const double t = soc.t_coef.dot(x) + soc.t_const;
        const Vector v = soc.v_coef * x + soc.v_const;
        const double s = t * t - v.squaredNorm();
        if (t <= 0.0 || s <= 0.0) return out;
        value -= std::log(s);
        if (!derivatives) continue;

        const Eigen::Index m = v.size();
        Matrix jac(m + 1, nv);
        jac.row(0) = soc.t_coef.transpose();
        jac.bottomRows(m) = soc.v_coef;
        Vector g(m + 1);
        g(0) = -2.0 * t / s;
        g.tail(m) = 2.0 * v / s;
        Vector w(m + 1);
        w(0) = t;
        w.tail(m) = -v;
        Matrix h = (4.0 / (s * s)) * w * w.transpose();
        h(0, 0) -= 2.0 / s;
        h.bottomRightCorner(m, m).diagonal().array() += 2.0 / s;
        out.gradient += jac.transpose() * g;
        out.hessian += jac.transpose() * h * jac;
    }

    out.value = value;
    return out;
}

// Solves H dx = -g with Jacobi scaling; regularizes when H is not safely
// positive definite.
Vector newton_direction(const Matrix& hessian, const Vector& gradient) {
    const Eigen::Index nv = hessian.rows();
    Vector scale(nv);
    for (Eigen::Index k = 0; k < nv; ++k) {
        const double d = hessian(k, k);
        scale(k) = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
    }
    Matrix hs = scale.asDiagonal() * hessian * scale.asDiagonal();
    const Vector gs = scale.cwiseProduct(gradient);
    double reg = 0.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
        Matrix reg_h = hs;
        reg_h.diagonal().array() += reg;
        Eigen::LDLT<Matrix> ldlt(reg_h);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            Vector y = ldlt.solve(-gs);
            if (y.allFinite()) return scale.cwiseProduct(y);
        }
        reg = reg == 0.0 ? 1e-14 : reg * 100.0;
    }
    throw SolverError("Newton system could not be factorized");
}

struct Centering {
    int steps = 0;
    bool stalled = false;   // round-off floor reached before the Newton tolerance
    double decrement = 0.0;
};

// Minimizes tau * c^T x + barrier(x) from a strictly feasible x. The iterate
// stays strictly feasible whether or not centering completes.
Centering center(const ConicProgram& prog, Vector& x, double tau, const SolverOptions& opt) {
    const Vector& c = prog.objective;
    Centering out;
    double previous = std::numeric_limits<double>::infinity();
    int stagnant = 0;
    for (int step = 0; step < opt.max_newton_steps; ++step) {
        out.steps = step;
        BarrierEval be = barrier(prog, x, true);
        if (!std::isfinite(be.value)) throw SolverError("iterate left the interior");
        const Vector grad = tau * c + be.gradient;
        const Vector dx = newton_direction(be.hessian, grad);
        const double decrement = -grad.dot(dx);
        if (!std::isfinite(decrement)) throw SolverError("non-finite Newton decrement");
        out.decrement = decrement;
        if (decrement / 2.0 <= opt.newton_tolerance) return out;
        stagnant = decrement < 0.1 && decrement > 0.5 * previous ? stagnant + 1 : 0;
        if (stagnant >= 5) {
            out.stalled = true;
            return out;
        }
        previous = decrement;

        // Objective change is accumulated exactly; only barrier values are
        // differenced, which keeps the Armijo test meaningful at large tau.
        double alpha = 1.0;
        bool accepted = false;
        while (alpha > 1e-16) {
            const Vector trial = x + alpha * dx;
            const BarrierEval tb = barrier(prog, trial, false);
            if (std::isfinite(tb.value)) {
                const double change = tau * alpha * c.dot(dx) + (tb.value - be.value);
                if (change <= -0.25 * alpha * decrement) {
                    x = trial;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            out.stalled = true;
            return out;
        }
    }
    out.steps = opt.max_newton_steps;
    out.stalled = true;
    return out;
}

bool is_epigraph(const ConicProgram& prog, int var) {
    return std::any_of(prog.socs.begin(), prog.socs.end(),
                       [var](const SocBlock& s) { return s.epigraph_var == var; });
}

struct PhaseOne {
    ConicProgram program;
    std::vector<int> active;  // phase-I index -> original index
};

// Phase-I program over the non-epigraph variables plus a slack s added to
// every LMI and every non-epigraph cone: minimize s subject to
// F_k(x) + s I >= 0 and ||v(x)|| <= t(x) + s.
PhaseOne make_phase_one(const ConicProgram& prog) {
    PhaseOne p1;
    std::vector<int> to_active(static_cast<std::size_t>(prog.num_vars), -1);
    for (int v = 0; v < prog.num_vars; ++v) {
        if (!is_epigraph(prog, v)) {
            to_active[static_cast<std::size_t>(v)] = static_cast<int>(p1.active.size());
            p1.active.push_back(v);
        }
    }
    const int na = static_cast<int>(p1.active.size());
    const int slack = na;
    p1.program.num_vars = na + 1;
    p1.program.objective = Vector::Zero(na + 1);
    p1.program.objective(slack) = 1.0;

    for (const auto& lmi : prog.lmis) {
        LmiBlock b;
        b.name = lmi.name;
        b.constant = lmi.constant;
        for (const auto& t : lmi.terms) {
            const int a = to_active[static_cast<std::size_t>(t.var)];
            if (a < 0) throw SolverError("epigraph variable used inside an LMI");
            b.terms.push_back({a, t.coef});
        }
        b.terms.push_back({slack, Matrix::Identity(lmi.dim(), lmi.dim())});
        p1.program.lmis.push_back(std::move(b));
    }
    for (const auto& soc : prog.socs) {
        if (soc.epigraph_var) continue;
        SocBlock b;
        b.name = soc.name;
        b.v_const = soc.v_const;
        b.t_const = soc.t_const;
        b.v_coef = Matrix::Zero(soc.v_coef.rows(), na + 1);
        b.t_coef = Vector::Zero(na + 1);
        for (int a = 0; a < na; ++a) {
            b.v_coef.col(a) = soc.v_coef.col(p1.active[static_cast<std::size_t>(a)]);
            b.t_coef(a) = soc.t_coef(p1.active[static_cast<std::size_t>(a)]);
        }
        b.t_coef(slack) = 1.0;
        p1.program.socs.push_back(std::move(b));
    }
    return p1;
}

}  // namespace

ConicSolution solve_conic(const ConicProgram& program, const SolverOptions& options) {
    if (program.objective.size() != program.num_vars) {
        throw SolverError("objective length does not match variable count");
    }
    if (program.lmis.empty()) throw SolverError("program has no semidefinite constraints");
    ConicSolution sol;

    // Phase I.
    PhaseOne p1 = make_phase_one(program);
    const int na = static_cast<int>(p1.active.size());
    Vector z = Vector::Zero(na + 1);
    double worst = 0.0;
    for (const auto& lmi : program.lmis) worst = std::max(worst, -min_eigenvalue(lmi.constant));
    for (const auto& soc : program.socs) {
        if (!soc.epigraph_var) worst = std::max(worst, soc.v_const.norm() - soc.t_const);
    }
    z(na) = worst + 1.0;
    if (!std::isfinite(barrier(p1.program, z, false).value)) {
        throw SolverError("no interior starting point for the cone constraints");
    }
    const double deg1 = p1.program.barrier_degree();
    double tau = options.tau_initial;
    while (true) {
        const Centering cs = center(p1.program, z, tau, options);
        sol.stats.newton_steps += cs.steps;
        ++sol.stats.outer_iterations;
        const double s = z(na);
        sol.stats.phase1_slack = s;
        if (s < 0.0) break;
        if (cs.stalled) {
            throw SolverError("phase I stalled with Newton decrement " + std::to_string(cs.decrement) +
                              " at slack " + std::to_string(s));
        }
        const double lower = s - deg1 / tau;
        if (lower > 0.0) {
            throw InfeasibleError("LMI constraints are infeasible: minimal slack " + std::to_string(s) +
                                      " (certified lower bound " + std::to_string(lower) + ")",
                                  s, lower);
        }
        tau *= options.tau_growth;
        if (tau > options.tau_max) {
            throw SolverError("phase I could not decide feasibility; slack " + std::to_string(s));
        }
    }

    // Phase II from the phase-I point; epigraph variables start above their cones.
    Vector x = Vector::Zero(program.num_vars);
    for (int a = 0; a < na; ++a) x(p1.active[static_cast<std::size_t>(a)]) = z(a);
    for (const auto& soc : program.socs) {
        if (!soc.epigraph_var) continue;
        const double norm_v = (soc.v_coef * x + soc.v_const).norm();
        const double rest = soc.t_coef.dot(x) - soc.t_coef(*soc.epigraph_var) * x(*soc.epigraph_var) +
                            soc.t_const;
        x(*soc.epigraph_var) = (norm_v - rest + std::max(1.0, norm_v)) / soc.t_coef(*soc.epigraph_var);
    }

    const double degree = program.barrier_degree();
    const bool has_objective = program.objective.cwiseAbs().maxCoeff() > 0.0;
    tau = options.tau_initial;
    double centered_tau = 0.0;
    while (true) {
        const Vector last = x;
        const Centering cs = center(program, x, tau, options);
        sol.stats.newton_steps += cs.steps;
        ++sol.stats.outer_iterations;
        if (cs.stalled) {
            // Round-off floor: keep the stalled point if it is near the central
            // path, otherwise the last point centered to tolerance.
            if (cs.decrement < 1.0) {
                sol.stats.final_tau = tau;
                sol.stats.gap_bound = has_objective ? 2.0 * degree / tau : 0.0;
                break;
            }
            if (centered_tau == 0.0) {
                throw SolverError("centering stalled with Newton decrement " + std::to_string(cs.decrement));
            }
            x = last;
            break;
        }
        centered_tau = tau;
        sol.stats.final_tau = tau;
        sol.stats.gap_bound = has_objective ? degree / tau : 0.0;
        if (!has_objective || degree / tau < options.gap_tolerance) break;
        tau *= options.tau_growth;
        if (tau > options.tau_max) break;
    }
    if (!x.allFinite()) throw SolverError("non-finite solution");
    sol.x = std::move(x);
    sol.objective = program.objective.dot(sol.x);
    return sol;
}

}  // namespace tsobs
