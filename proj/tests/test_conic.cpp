#include <gtest/gtest.h>

#include <cmath>

#include "tsobs/conic.hpp"
#include "tsobs/error.hpp"

using namespace tsobs;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

// a^T x + b >= 0 as a 1 x 1 block.
LmiBlock halfspace(const std::string& name, std::vector<std::pair<int, double>> a, double b) {
    LmiBlock blk{name, scalar(b), {}};
    for (auto [var, coef] : a) blk.terms.push_back({var, scalar(coef)});
    return blk;
}

}  // namespace

TEST(Conic, LinearProgram) {
    ConicProgram p;
    p.num_vars = 2;
    p.lmis.push_back(halfspace("x0>=1", {{0, 1.0}}, -1.0));
    p.lmis.push_back(halfspace("x1>=2", {{1, 1.0}}, -2.0));
    p.lmis.push_back(halfspace("x0+x1<=10", {{0, -1.0}, {1, -1.0}}, 10.0));
    p.objective = Vector::Ones(2);
    const ConicSolution s = solve_conic(p);
    EXPECT_NEAR(s.x(0), 1.0, 1e-7);
    EXPECT_NEAR(s.x(1), 2.0, 1e-7);
    EXPECT_NEAR(s.objective, 3.0, 1e-7);
    EXPECT_GT(min_constraint_slack(p, s.x), 0.0);
    EXPECT_EQ(p.barrier_degree(), 3);
}

TEST(Conic, SemidefiniteSchurComplement) {
    // [[x, 1], [1, 1]] >= 0  <=>  x >= 1
    ConicProgram p;
    p.num_vars = 1;
    LmiBlock blk;
    blk.name = "schur";
    blk.constant = (Matrix(2, 2) << 0, 1, 1, 1).finished();
    blk.terms.push_back({0, (Matrix(2, 2) << 1, 0, 0, 0).finished()});
    p.lmis.push_back(blk);
    p.lmis.push_back(halfspace("x<=5", {{0, -1.0}}, 5.0));
    p.objective = Vector::Ones(1);
    const ConicSolution s = solve_conic(p);
    EXPECT_NEAR(s.x(0), 1.0, 1e-7);
}

TEST(Conic, SecondOrderCone) {
    // minimize t subject to ||(1, 2)|| <= t, 0 <= t <= 10
    ConicProgram p;
    p.num_vars = 1;
    p.lmis.push_back(halfspace("t>=0", {{0, 1.0}}, 0.0));
    p.lmis.push_back(halfspace("t<=10", {{0, -1.0}}, 10.0));
    SocBlock c;
    c.name = "norm";
    c.v_coef = Matrix::Zero(2, 1);
    c.v_const = (Vector(2) << 1.0, 2.0).finished();
    c.t_coef = Vector::Ones(1);
    p.socs.push_back(c);
    p.objective = Vector::Ones(1);
    const ConicSolution s = solve_conic(p);
    EXPECT_NEAR(s.x(0), std::sqrt(5.0), 1e-7);
    EXPECT_EQ(p.barrier_degree(), 4);
}

TEST(Conic, InfeasibleProgramReported) {
    ConicProgram p;
    p.num_vars = 1;
    p.lmis.push_back(halfspace("x>=1", {{0, 1.0}}, -1.0));
    p.lmis.push_back(halfspace("x<=-1", {{0, -1.0}}, -1.0));
    p.objective = Vector::Zero(1);
    try {
        solve_conic(p);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_GT(e.slack_lower_bound(), 0.0);
        EXPECT_GE(e.slack(), 1.0 - 1e-6);
    }
}

TEST(Conic, ProgramWithoutMatrixConstraintsRejected) {
    ConicProgram p;
    p.num_vars = 1;
    p.objective = Vector::Ones(1);
    EXPECT_THROW(solve_conic(p), SolverError);
}

TEST(Conic, DeterministicAcrossRuns) {
    ConicProgram p;
    p.num_vars = 2;
    LmiBlock blk;
    blk.name = "psd";
    blk.constant = Matrix::Identity(2, 2);
    blk.terms.push_back({0, (Matrix(2, 2) << 1, 0.5, 0.5, -1).finished()});
    blk.terms.push_back({1, (Matrix(2, 2) << 0, 1, 1, 0).finished()});
    p.lmis.push_back(blk);
    p.objective = (Vector(2) << -1.0, 0.3).finished();
    const ConicSolution a = solve_conic(p);
    const ConicSolution b = solve_conic(p);
    EXPECT_TRUE(a.x == b.x);
    EXPECT_EQ(a.stats.newton_steps, b.stats.newton_steps);
}
