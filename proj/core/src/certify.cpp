#include "tsobs/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "tsobs/error.hpp"

namespace tsobs {

const ConditionRecord* CertificationReport::find(const std::string& id) const {
    for (const auto& c : conditions) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

namespace {

ConditionRecord positive_definite(const std::string& id, const Matrix& m, double eps, double tol) {
    ConditionRecord rec;
    rec.id = id;
    rec.tolerance = tol;
    const double asym = asymmetry(m);
    const double lambda = min_eigenvalue(m);
    // Symmetry is a hard requirement; round-off level asymmetry is ignored.
    const double asym_tol = 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
    rec.margin = asym > asym_tol ? -asym : lambda - 0.5 * eps;
    rec.pass = rec.margin >= -tol;
    rec.detail = "lambda_min=" + std::to_string(lambda) + " asymmetry=" + std::to_string(asym);
    return rec;
}

}  // namespace

double sampled_robust_margin(const TSModel& model, const ObserverDesign& design, double theta_bar,
                             int samples, unsigned seed) {
    const auto& d = model.dims;
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double bound = std::isfinite(theta_bar) ? theta_bar : 0.0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        Vector mu(d.r());
        for (int i = 0; i < d.r(); ++i) mu(i) = -std::log(1.0 - unit(gen));
        mu /= mu.sum();
        Vector theta(d.n_theta);
        for (int j = 0; j < d.n_theta; ++j) theta(j) = bound * (2.0 * unit(gen) - 1.0);
        Vector e(d.n);
        for (int k = 0; k < d.n; ++k) e(k) = normal(gen);
        e.normalize();

        Matrix acl = Matrix::Zero(d.n, d.n);
        for (int i = 0; i < d.r(); ++i) {
            Matrix a = model.A[i] - design.L[i] * model.C;
            for (int j = 0; j < d.n_theta; ++j) a += theta(j) * model.transmission[i][j].A;
            acl += mu(i) * a;
        }
        const Matrix pa = design.P * acl;
        worst = std::max(worst, e.dot((pa + pa.transpose()) * e));
    }
    return worst;
}

CertificationReport certify(const TSModel& model, const ObserverDesign& design, const CertifyOptions& opt) {
    const auto& d = model.dims;
    if (design.P.rows() != d.n || design.P.cols() != d.n || design.Q.rows() != d.n ||
        design.Q.cols() != d.n || static_cast<int>(design.L.size()) != d.r()) {
        throw ModelError("", "design dimensions do not match the model");
    }
    for (const auto& l : design.L) {
        if (l.rows() != d.n || l.cols() != d.n_y) throw ModelError("", "observer gain has wrong shape");
    }

    CertificationReport report;
    const double tol = opt.tolerance;
    report.conditions.push_back(positive_definite("pd_P", design.P, design.pd_margin, tol));
    report.conditions.push_back(positive_definite("pd_Q", design.Q, design.pd_margin, tol));

    // P (A_i - L_i C) + (A_i - L_i C)^T P + Q <= 0
    for (int i = 0; i < d.r(); ++i) {
        const Matrix pa = design.P * (model.A[i] - design.L[i] * model.C);
        const double lambda = max_eigenvalue(pa + pa.transpose() + design.Q);
        ConditionRecord rec;
        rec.id = "lmi12_" + std::to_string(i + 1);
        rec.tolerance = tol;
        rec.margin = -lambda;
        rec.pass = rec.margin >= -tol;
        rec.detail = "lambda_max=" + std::to_string(lambda);
        report.conditions.push_back(rec);
    }

    const bool parametric = d.n_theta > 0;
    const double theta_certified = theta_bar_admissible(design, d.n_theta);
    report.theta_bar_certified = theta_certified;
    bool robust_ok = !parametric;
    if (parametric) {
        Matrix block(2 * d.n, 2 * d.n);
        block << design.Q - design.gamma * Matrix::Identity(d.n, d.n), design.P, design.P,
            Matrix::Identity(d.n, d.n);
        ConditionRecord schur;
        schur.id = "schur13";
        schur.tolerance = tol;
        schur.margin = min_eigenvalue(block);
        schur.pass = schur.margin >= -tol;
        schur.mandatory = false;
        schur.detail = "gamma=" + std::to_string(design.gamma);
        report.conditions.push_back(schur);

        // n_theta a_bar theta_bar <= lambda_min(Q) / (2 lambda_max(P))
        ConditionRecord eig;
        eig.id = "eig10";
        eig.tolerance = tol;
        eig.mandatory = false;
        const double scale = d.n_theta * design.a_bar;
        if (scale == 0.0) {
            eig.margin = std::numeric_limits<double>::infinity();
        } else {
            eig.margin = min_eigenvalue(design.Q) / (2.0 * max_eigenvalue(design.P)) -
                         scale * design.theta_bar_max;
        }
        eig.pass = eig.margin >= -tol;
        eig.detail = "theta_bar=" + std::to_string(design.theta_bar_max) +
                     " certified=" + std::to_string(theta_certified);
        report.conditions.push_back(eig);
        robust_ok = schur.pass || eig.pass;
    }

    const RankReport ranks = check_rank_conditions(model);
    ConditionRecord rank;
    rank.id = "thm1_rank";
    rank.mandatory = false;
    rank.margin = -static_cast<double>(ranks.failures().size());
    rank.pass = ranks.rank_conditions_hold;
    rank.detail = std::to_string(ranks.failures().size()) + " transmission matrices fail the rank test";
    report.conditions.push_back(rank);

    const Vector beta = annihilation_residuals(model, design.P, pseudo_inverse(model.C).H);
    for (int j = 0; j < d.n_theta; ++j) {
        ConditionRecord res;
        res.id = "thm2_residual_" + std::to_string(j + 1);
        res.mandatory = false;
        res.tolerance = opt.residual_tolerance;
        res.margin = -beta(j);
        res.pass = beta(j) <= opt.residual_tolerance;
        res.detail = "beta=" + std::to_string(beta(j));
        report.conditions.push_back(res);
    }

    if (parametric && opt.robust_samples > 0) {
        const double theta_used = std::min(design.theta_bar_max, theta_certified);
        ConditionRecord sampled;
        sampled.id = "robust_sampling";
        sampled.mandatory = false;
        sampled.tolerance = tol;
        sampled.margin =
            -sampled_robust_margin(model, design, theta_used, opt.robust_samples, opt.robust_seed);
        sampled.pass = sampled.margin >= -tol;
        sampled.detail = std::to_string(opt.robust_samples) + " samples";
        report.conditions.push_back(sampled);
    }

    bool overall = robust_ok;
    for (const auto& c : report.conditions) {
        if (c.mandatory) overall = overall && c.pass;
    }
    report.overall_pass = overall;
    return report;
}

LyapunovAudit lyapunov_decrease_audit(const Trajectory& tr, const ObserverDesign& design, double t_begin,
                                      double t_end) {
    if (design.P.rows() != tr.dims.n) throw ModelError("", "design does not match the trajectory");
    if (tr.rho.size() != tr.dims.n_theta) throw ModelError("", "trajectory carries no adaptation gains");

    LyapunovAudit audit;
    audit.t_begin = t_begin;
    audit.t_end = t_end;
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = 0; k < tr.samples(); ++k) {
        if (tr.t(k) >= t_begin && tr.t(k) <= t_end) idx.push_back(k);
    }
    audit.samples = static_cast<long long>(idx.size());
    if (idx.size() < 2) return audit;

    const Vector theta0 = tr.theta.col(idx.front());
    std::vector<double> V;
    V.reserve(idx.size());
    double excursion = 0.0;  // max_t |e_x| (|xhat| + |u| + 1)
    for (Eigen::Index k : idx) {
        if (tr.theta.col(k) != theta0) throw ModelError("", "theta varies inside the audited window");
        if (tr.saturated[static_cast<std::size_t>(k)]) ++audit.saturated_samples;
        const Vector ex = tr.x.col(k) - tr.xhat.col(k);
        const Vector et = tr.theta.col(k) - tr.thetahat.col(k);
        V.push_back(ex.dot(design.P * ex) + et.dot(tr.rho.cwiseProduct(et)));
        const double u_norm = tr.u.rows() > 0 ? tr.u.col(k).norm() : 0.0;
        excursion = std::max(excursion, ex.norm() * (tr.xhat.col(k).norm() + u_norm + 1.0));
    }
    audit.tolerance = design.beta.sum() * excursion + 1e-9;
    audit.V_initial = V.front();
    audit.V_final = V.back();
    audit.steps = static_cast<long long>(V.size()) - 1;
    long long violations = 0;
    audit.max_increase = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < V.size(); ++k) {
        const double inc = V[k] - V[k - 1];
        audit.max_increase = std::max(audit.max_increase, inc);
        if (inc > audit.tolerance) ++violations;
    }
    audit.violation_fraction = static_cast<double>(violations) / static_cast<double>(audit.steps);
    audit.nonincreasing_fraction = 1.0 - audit.violation_fraction;
    return audit;
}

}  // namespace tsobs
