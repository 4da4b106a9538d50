#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "support.hpp"
#include "tsobs/certify.hpp"
#include "tsobs/error.hpp"
#include "tsobs/example.hpp"
#include "tsobs/lmi.hpp"

using namespace tsobs;

namespace {

TSModel single_vertex(const Matrix& A, const Matrix& C, std::vector<Matrix> abar = {}) {
    TSModel m;
    m.dims = {.n = static_cast<int>(A.rows()), .n_u = 0, .n_y = static_cast<int>(C.rows()), .n_p = 0,
              .n_theta = static_cast<int>(abar.size())};
    m.A = {A};
    m.B = {Matrix::Zero(A.rows(), 0)};
    m.F = {Matrix::Zero(A.rows(), 1)};
    std::vector<Transmission> row;
    for (const auto& a : abar) row.push_back({a, Matrix::Zero(A.rows(), 0), Matrix::Zero(A.rows(), 1)});
    m.transmission = {row};
    m.C = C;
    m.vertex_bits = default_vertex_bits(0);
    return m;
}

// PBH test: some eigenvalue with nonnegative real part is unobservable.
bool undetectable(const Matrix& A, const Matrix& C) {
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A.cast<std::complex<double>>());
    const Eigen::Index n = A.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto lambda = es.eigenvalues()(k);
        if (lambda.real() < 0.0) continue;
        Eigen::MatrixXcd pbh(n + C.rows(), n);
        pbh << A.cast<std::complex<double>>() - lambda * Eigen::MatrixXcd::Identity(n, n),
            C.cast<std::complex<double>>();
        if (Eigen::FullPivLU<Eigen::MatrixXcd>(pbh).rank() < n) return true;
    }
    return false;
}

const TSModel& example_model() {
    static const TSModel m = snl_decompose(example::param_affine_model());
    return m;
}

const ObserverDesign& example_design() {
    static const ObserverDesign d = solve_design(example_model(), example::design_spec());
    return d;
}

}  // namespace

TEST(PseudoInverse, ExampleOutputMatrix) {
    const PseudoInverse pi = pseudo_inverse(example_model().C);
    Matrix H = Matrix::Zero(3, 3);
    H(2, 2) = 1.0;
    EXPECT_LE((pi.H - H).cwiseAbs().maxCoeff(), 1e-12);
    const Matrix expected = (Matrix(3, 2) << 1, -1, 0, 1, 0, 0).finished();
    EXPECT_LE((pi.C_pinv - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PseudoInverse, SquareInvertibleAndOrthonormalRows) {
    const PseudoInverse id = pseudo_inverse(Matrix::Identity(4, 4));
    EXPECT_LE((id.C_pinv - Matrix::Identity(4, 4)).norm(), 1e-14);
    EXPECT_LE(id.H.norm(), 1e-14);

    std::mt19937_64 rng(3);
    const Eigen::HouseholderQR<Matrix> qr(fixtures::random_matrix(rng, 5, 5));
    const Matrix q = qr.householderQ();
    const Matrix rows = q.topRows(2);
    EXPECT_LE((pseudo_inverse(rows).C_pinv - rows.transpose()).norm(), 1e-12);
}

TEST(PseudoInverseProperty, MoorePenroseIdentities) {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        const int rows = fixtures::uniform_int(rng, 1, 6);
        const int cols = fixtures::uniform_int(rng, 1, 6);
        Matrix C = fixtures::random_matrix(rng, rows, cols);
        if (trial % 3 == 0 && std::min(rows, cols) > 1) {
            const int rank = fixtures::uniform_int(rng, 1, std::min(rows, cols) - 1);
            C = fixtures::random_matrix(rng, rows, rank) * fixtures::random_matrix(rng, rank, cols);
        }
        const Matrix X = pseudo_inverse(C).C_pinv;
        const double scale = std::max(1.0, C.norm() * X.norm());
        EXPECT_LE((C * X * C - C).norm() / std::max(1.0, C.norm()), 1e-10) << trial;
        EXPECT_LE((X * C * X - X).norm() / std::max(1.0, X.norm()), 1e-10) << trial;
        EXPECT_LE(((C * X).transpose() - C * X).norm() / scale, 1e-10) << trial;
        EXPECT_LE(((X * C).transpose() - X * C).norm() / scale, 1e-10) << trial;
    }
}

TEST(RankConditions, ExampleIsNotCoveredByTheDirectCase) {
    const RankReport report = check_rank_conditions(example_model());
    EXPECT_FALSE(report.rank_conditions_hold);
    bool saw_abar = false, saw_bbar = false;
    for (const auto& e : report.entries) {
        if (e.which == 'A') {
            saw_abar = true;
            EXPECT_FALSE(e.full_column_rank);
            EXPECT_EQ(e.rank, 2);
            EXPECT_FALSE(e.passes());
        }
        if (e.which == 'B') {
            saw_bbar = true;
            EXPECT_TRUE(e.full_column_rank);
            EXPECT_EQ(e.rank_with_C, 1);
            EXPECT_TRUE(e.passes());
        }
    }
    EXPECT_TRUE(saw_abar);
    EXPECT_TRUE(saw_bbar);
}

TEST(RankConditions, ZeroTransmissionHoldsVacuously) {
    const TSModel m = single_vertex(-Matrix::Identity(2, 2), Matrix::Identity(2, 2), {Matrix::Zero(2, 2)});
    EXPECT_TRUE(check_rank_conditions(m).rank_conditions_hold);
}

TEST(Constraints, ExampleStructure) {
    const ConstraintSystem sys = build_constraints(example_model(), example::design_spec());
    EXPECT_EQ(sys.matrix_constraints, 5);
    EXPECT_EQ(sys.vars.M.size(), 2u);
    EXPECT_FALSE(sys.vars.gamma.has_value());
    EXPECT_DOUBLE_EQ(sys.gamma_fixed, 0.25);
    EXPECT_DOUBLE_EQ(sys.a_bar, 1.0);
    // P and Q symmetric 3 x 3, two 3 x 2 gains.
    EXPECT_EQ(sys.vars.design_count, 6 + 6 + 2 * 6);
}

TEST(Constraints, NoParametersDropsSchurBlock) {
    const TSModel m = single_vertex(-Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    DesignSpec spec;
    spec.objective = Objective::FeasibilityOnly;
    const ConstraintSystem sys = build_constraints(m, spec);
    EXPECT_EQ(sys.matrix_constraints, 3);
    for (const auto& lmi : sys.program.lmis) EXPECT_NE(lmi.name, "schur13");
    const ObserverDesign d = solve_design(m, spec);
    EXPECT_EQ(d.gamma, 0.0);
    EXPECT_TRUE(std::isinf(d.theta_bar_max));
}

TEST(Design, StableSingleSubmodelShapes) {
    const TSModel m = single_vertex(-Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    DesignSpec spec;
    spec.objective = Objective::FeasibilityOnly;
    const ObserverDesign d = solve_design(m, spec);
    ASSERT_EQ(d.M.size(), 1u);
    EXPECT_EQ(d.M[0].rows(), 2);
    EXPECT_EQ(d.M[0].cols(), 2);
    EXPECT_TRUE(certify(m, d).overall_pass);
}

TEST(Design, ExampleMinBetaGivesBlockStructuredP) {
    const ObserverDesign& d = example_design();
    ASSERT_EQ(d.beta.size(), 1);
    EXPECT_LE(d.beta(0), 1e-6);
    const double fro = d.P.norm();
    EXPECT_LE(std::abs(d.P(0, 2)), 1e-6 * fro);
    EXPECT_LE(std::abs(d.P(1, 2)), 1e-6 * fro);
    EXPECT_GE(theta_bar_admissible(d, 1), 0.5);
}

TEST(Design, FullOutputMeansZeroResidual) {
    std::mt19937_64 rng(9);
    Dimensions dims{.n = 3, .n_u = 1, .n_y = 3, .n_p = 1, .n_theta = 1};
    TSModel m = fixtures::random_stable_ts_model(rng, dims);
    m.C = Matrix::Identity(3, 3);
    DesignSpec spec;
    spec.theta_bar = 0.1;
    spec.rho = Vector::Ones(1);
    const ObserverDesign d = solve_design(m, spec);
    EXPECT_LE(d.H.norm(), 1e-14);
    EXPECT_EQ(d.beta(0), 0.0);
}

TEST(Design, UnobservableUnstableModeIsInfeasible) {
    const Matrix A = (Matrix(2, 2) << 1, 0, 0, -1).finished();
    const Matrix C = (Matrix(1, 2) << 0, 1).finished();
    ASSERT_TRUE(undetectable(A, C));
    DesignSpec spec;
    spec.objective = Objective::FeasibilityOnly;
    try {
        solve_design(single_vertex(A, C), spec);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_GT(e.slack_lower_bound(), 0.0);
    }
}

TEST(Design, InfeasibilityAgreesWithHautusTest) {
    // The first state is decoupled and unmeasured: detectable iff a11 < 0.
    for (double a11 : {-2.0, -0.5, 0.5, 2.0}) {
        const Matrix A = (Matrix(3, 3) << a11, 0, 0, 0, -1, 0, 0, 1, 1).finished();
        const Matrix C = (Matrix(1, 3) << 0, 0, 1).finished();
        DesignSpec spec;
        spec.objective = Objective::FeasibilityOnly;
        if (undetectable(A, C)) {
            EXPECT_THROW(solve_design(single_vertex(A, C), spec), InfeasibleError) << a11;
        } else {
            EXPECT_NO_THROW(solve_design(single_vertex(A, C), spec)) << a11;
        }
    }
}

TEST(Design, MaxGammaConsistentWithEigenvalueBound) {
    DesignSpec spec = example::design_spec();
    spec.objective = Objective::MaxGamma;
    spec.theta_bar.reset();
    const ObserverDesign d = solve_design(example_model(), spec);
    EXPECT_GE(d.gamma, 0.25);
    const double lhs = std::sqrt(d.gamma) / d.a_bar;
    const double rhs = min_eigenvalue(d.Q) / (2.0 * max_eigenvalue(d.P) * d.a_bar);
    EXPECT_LE(lhs, rhs + 1e-6);
    EXPECT_NEAR(d.theta_bar_max, lhs, 1e-12);
    EXPECT_TRUE(certify(example_model(), d).overall_pass);
}

TEST(Design, ThetaBarRequiredForMinBeta) {
    DesignSpec spec = example::design_spec();
    spec.theta_bar.reset();
    EXPECT_THROW(solve_design(example_model(), spec), ModelError);
    spec.theta_bar = -1.0;
    EXPECT_THROW(solve_design(example_model(), spec), ModelError);
}

TEST(Design, DeterministicBitForBit) {
    const ObserverDesign a = solve_design(example_model(), example::design_spec());
    const ObserverDesign b = solve_design(example_model(), example::design_spec());
    EXPECT_TRUE(a.P == b.P);
    EXPECT_TRUE(a.Q == b.Q);
    EXPECT_TRUE(a.L[0] == b.L[0] && a.L[1] == b.L[1]);
    EXPECT_TRUE(a.beta == b.beta);
}

TEST(ThetaBarAdmissible, DirectFormula) {
    ObserverDesign d;
    d.P = Matrix::Identity(2, 2);
    d.Q = Matrix::Identity(2, 2);
    d.a_bar = 1.0;
    EXPECT_DOUBLE_EQ(theta_bar_admissible(d, 1), 0.5);
    d.P = 2.0 * Matrix::Identity(2, 2);
    d.Q = 4.0 * Matrix::Identity(2, 2);
    EXPECT_DOUBLE_EQ(theta_bar_admissible(d, 2), 0.5);
    d.a_bar = 0.0;
    EXPECT_EQ(theta_bar_admissible(d, 2), std::numeric_limits<double>::infinity());
}

TEST(DesignProperty, DeterministicOnRandomModels) {
    std::mt19937_64 rng(505);
    for (int trial = 0; trial < 100; ++trial) {
        Dimensions dims = fixtures::random_dims(rng, 3, 1, 1);
        const TSModel m = fixtures::random_stable_ts_model(rng, dims);
        DesignSpec spec;
        spec.objective = Objective::MaxGamma;
        spec.rho = Vector::Ones(dims.n_theta);
        ObserverDesign a, b;
        try {
            a = solve_design(m, spec);
        } catch (const Error&) {
            EXPECT_THROW(solve_design(m, spec), Error) << trial;
            continue;
        }
        b = solve_design(m, spec);
        EXPECT_TRUE(a.P == b.P && a.Q == b.Q && a.gamma == b.gamma) << trial;
    }
}
