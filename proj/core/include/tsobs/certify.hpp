#pragma once

#include <string>
#include <vector>

#include "tsobs/lmi.hpp"
#include "tsobs/simulator.hpp"
#include "tsobs/tsmodel.hpp"

namespace tsobs {

// One checked condition. `margin` is the signed satisfaction slack: the
// condition passes when margin >= -tolerance.
struct ConditionRecord {
    std::string id;  // pd_P, pd_Q, lmi12_<i>, schur13, eig10, thm1_rank, thm2_residual_<j>, robust_sampling
    double margin = 0.0;
    bool pass = false;
    double tolerance = 0.0;
    bool mandatory = true;
    std::string detail;
};

struct CertificationReport {
    std::vector<ConditionRecord> conditions;
    bool overall_pass = false;
    double theta_bar_certified = 0.0;

    const ConditionRecord* find(const std::string& id) const;
};

struct CertifyOptions {
    double tolerance = 1e-7;          // eigenvalue margins
    double residual_tolerance = 1e-6; // annihilation residuals (informational)
    int robust_samples = 100;         // sampled quadratic-form spot checks
    unsigned robust_seed = 7;
};

// Re-verifies a design with symmetric eigenvalue computations only.
CertificationReport certify(const TSModel& model, const ObserverDesign& design,
                            const CertifyOptions& options = {});

// Maximum of e^T [P Acl + Acl^T P] e over sampled weights, parameters with
// |theta_j| <= theta_bar, and unit vectors e, where
// Acl = A(mu) - L(mu) C + sum_j theta_j Abar(mu)_j.
double sampled_robust_margin(const TSModel& model, const ObserverDesign& design, double theta_bar,
                             int samples, unsigned seed);

struct LyapunovAudit {
    double t_begin = 0.0;
    double t_end = 0.0;
    long long samples = 0;
    long long steps = 0;
    double tolerance = 0.0;        // permitted V increase per recorded step
    double max_increase = 0.0;     // largest V(k+1) - V(k)
    double violation_fraction = 0.0;
    double nonincreasing_fraction = 1.0;
    long long saturated_samples = 0;
    double V_initial = 0.0;
    double V_final = 0.0;
};

// Audits V = e_x^T P e_x + sum_j rho_j e_theta_j^2 over samples with
// t in [t_begin, t_end]. Throws ModelError when theta varies in the window.
LyapunovAudit lyapunov_decrease_audit(const Trajectory& trajectory, const ObserverDesign& design,
                                      double t_begin, double t_end);

}  // namespace tsobs
