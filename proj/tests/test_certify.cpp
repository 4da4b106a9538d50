#include <gtest/gtest.h>

#include "tsobs/certify.hpp"
#include "tsobs/error.hpp"
#include "tsobs/example.hpp"

using namespace tsobs;

namespace {

const TSModel& model() {
    static const TSModel m = snl_decompose(example::param_affine_model());
    return m;
}

const ObserverDesign& design() {
    static const ObserverDesign d = solve_design(model(), example::design_spec());
    return d;
}

SimScenario short_scenario(double t_end) {
    SimScenario s = example::scenario();
    s.t_end = t_end;
    s.dt = 1e-2;
    s.theta_profile = {{0.0, Vector::Constant(1, 0.5)}, {t_end / 2, Vector::Constant(1, 0.3)}};
    return s;
}

}  // namespace

TEST(Certify, ExampleDesignPasses) {
    const CertificationReport r = certify(model(), design());
    EXPECT_TRUE(r.overall_pass);
    for (const char* id : {"pd_P", "pd_Q", "lmi12_1", "lmi12_2", "schur13", "eig10"}) {
        const ConditionRecord* c = r.find(id);
        ASSERT_NE(c, nullptr) << id;
        EXPECT_TRUE(c->pass) << id;
        EXPECT_GE(c->margin, -1e-7) << id;
    }
    const ConditionRecord* res = r.find("thm2_residual_1");
    ASSERT_NE(res, nullptr);
    EXPECT_TRUE(res->pass);
    EXPECT_GE(r.theta_bar_certified, 0.5);
    const ConditionRecord* rank = r.find("thm1_rank");
    ASSERT_NE(rank, nullptr);
    EXPECT_FALSE(rank->pass);
    EXPECT_FALSE(rank->mandatory);
}

TEST(Certify, AsymmetricLyapunovMatrixFails) {
    ObserverDesign d = design();
    d.P(0, 1) += 1e-3;
    const CertificationReport r = certify(model(), d);
    const ConditionRecord* c = r.find("pd_P");
    ASSERT_NE(c, nullptr);
    EXPECT_FALSE(c->pass);
    EXPECT_NEAR(c->margin, -1e-3, 1e-12);
    EXPECT_FALSE(r.overall_pass);
}

TEST(Certify, MissingOutputInjectionFails) {
    ObserverDesign d = design();
    d.L[1].setZero();
    const CertificationReport r = certify(model(), d);
    const ConditionRecord* c = r.find("lmi12_2");
    ASSERT_NE(c, nullptr);
    EXPECT_LT(c->margin, -1e-7);
    EXPECT_FALSE(c->pass);
    EXPECT_FALSE(r.overall_pass);
}

TEST(Certify, ShapeMismatchRejected) {
    ObserverDesign d = design();
    d.L.pop_back();
    EXPECT_THROW(certify(model(), d), ModelError);
}

TEST(Certify, SampledRobustMarginNegativeOnCertifiedRange) {
    const double worst = sampled_robust_margin(model(), design(), 0.5, 200, 11);
    EXPECT_LT(worst, 0.0);
}

TEST(LyapunovAudit, ZeroErrorsGiveZeroFunction) {
    SimScenario s = short_scenario(4.0);
    s.theta_profile = {{0.0, Vector::Constant(1, 0.4)}};
    s.xhat0 = s.x0;
    s.thetahat0 = Vector::Constant(1, 0.4);
    const SimulationResult res = run(model(), design(), s);
    EXPECT_EQ(res.trajectory.V.cwiseAbs().maxCoeff(), 0.0);
    const LyapunovAudit a = lyapunov_decrease_audit(res.trajectory, design(), 0.0, 4.0);
    EXPECT_EQ(a.V_initial, 0.0);
    EXPECT_EQ(a.V_final, 0.0);
    EXPECT_EQ(a.violation_fraction, 0.0);
}

TEST(LyapunovAudit, DecreasesOnExampleWindow) {
    SimScenario s = short_scenario(20.0);
    s.record_stride = 1;
    const SimulationResult res = run(model(), design(), s);
    const LyapunovAudit a = lyapunov_decrease_audit(res.trajectory, design(), 0.0, 9.99);
    EXPECT_GT(a.steps, 900);
    EXPECT_GE(a.nonincreasing_fraction, 0.99);
    EXPECT_LT(a.V_final, a.V_initial);
}

TEST(LyapunovAudit, VaryingParameterRejected) {
    const SimulationResult res = run(model(), design(), short_scenario(2.0));
    EXPECT_THROW(lyapunov_decrease_audit(res.trajectory, design(), 0.0, 2.0), ModelError);
}

TEST(LyapunovAudit, ReportsViolationsOfUnoptimizedDesign) {
    DesignSpec spec = example::design_spec();
    spec.objective = Objective::FeasibilityOnly;
    const ObserverDesign d = solve_design(model(), spec);
    EXPECT_GT(d.beta(0), design().beta(0));
    SimScenario s = short_scenario(10.0);
    s.theta_profile = {{0.0, Vector::Constant(1, 0.5)}};
    s.record_stride = 1;
    const SimulationResult res = run(model(), d, s);
    const LyapunovAudit a = lyapunov_decrease_audit(res.trajectory, d, 0.0, 10.0);
    EXPECT_EQ(a.steps, 1000);
    EXPECT_GE(a.violation_fraction, 0.0);
    EXPECT_LE(a.violation_fraction, 1.0);
    EXPECT_DOUBLE_EQ(a.violation_fraction + a.nonincreasing_fraction, 1.0);
    EXPECT_GT(a.tolerance, 1e-9);
}
