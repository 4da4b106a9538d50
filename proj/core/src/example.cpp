#include "tsobs/example.hpp"

#include <numbers>

namespace tsobs::example {

namespace {

Matrix rows3(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

AffineFamily constant_family(Matrix base) {
    AffineFamily f;
    f.slopes.push_back(Matrix::Zero(base.rows(), base.cols()));
    f.base = std::move(base);
    return f;
}

}  // namespace

ParamAffineModel param_affine_model() {
    ParamAffineModel m;
    m.dims = {.n = 3, .n_u = 1, .n_y = 2, .n_p = 1, .n_theta = 1};

    // -0.7 x1^2 = (-0.7 z) x1 and -x1 x3 = (-z) x3 with z = x1.
    m.A.base = rows3({{0.0, -1.0, 1.0}, {0.0, -2.0, 0.0}, {0.5, 0.0, -2.0}});
    Matrix slope = Matrix::Zero(3, 3);
    slope(0, 0) = -0.7;
    slope(1, 2) = -1.0;
    m.A.slopes.push_back(slope);
    m.B = constant_family(rows3({{0.0}, {0.0}, {1.0}}));
    m.F = constant_family(Matrix::Zero(3, 1));

    // (1 - 0.8 x1) theta in row 1, (x2 + u) theta in row 2.
    TransmissionFamily tf;
    tf.A = constant_family(rows3({{-0.8, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 0.0}}));
    tf.B = constant_family(rows3({{0.0}, {1.0}, {0.0}}));
    tf.F = constant_family(rows3({{1.0}, {0.0}, {0.0}}));
    m.transmission.push_back(std::move(tf));

    m.C = rows3({{1.0, 1.0, 0.0}, {0.0, 1.0, 0.0}});
    Premise z;
    z.min = 0.0;
    z.max = 2.0;
    z.selector = Vector(3);
    z.selector << 1.0, -1.0, 0.0;  // z = y1 - y2 = x1
    m.premises.push_back(z);
    return m;
}

ReferenceMatrices reference_matrices() {
    ReferenceMatrices ref;
    ref.A1 = rows3({{-1.4, -1.0, 1.0}, {0.0, -2.0, -2.0}, {0.5, 0.0, -2.0}});
    ref.A2 = rows3({{0.0, -1.0, 1.0}, {0.0, -2.0, 0.0}, {0.5, 0.0, -2.0}});
    ref.A_bar = rows3({{-0.8, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 0.0}});
    ref.B = rows3({{0.0}, {0.0}, {1.0}});
    ref.B_bar = rows3({{0.0}, {1.0}, {0.0}});
    ref.F_bar = rows3({{1.0}, {0.0}, {0.0}});
    ref.C = rows3({{1.0, 1.0, 0.0}, {0.0, 1.0, 0.0}});
    return ref;
}

DesignSpec design_spec() {
    DesignSpec spec;
    spec.theta_bar = 0.5;
    spec.objective = Objective::MinBeta;
    spec.rho = Vector::Ones(1);
    return spec;
}

SimScenario scenario() {
    SimScenario s;
    s.t_end = 100.0;
    s.dt = 1e-3;
    s.x0 = Vector(3);
    s.x0 << 1.0, 0.5, 0.5;
    s.xhat0 = Vector::Zero(3);
    s.thetahat0 = Vector::Zero(1);
    s.theta_profile = {{0.0, Vector::Constant(1, 0.5)}, {50.0, Vector::Constant(1, 0.3)}};
    // The zero-frequency component with phase pi/2 is a constant offset of 1.
    s.inputs = {InputSignal::multisine({1.0, 0.5, 0.5}, {0.0, 0.1, 0.37}, {std::numbers::pi / 2.0, 0.0, 0.0})};
    s.rho = Vector::Ones(1);
    s.record_stride = 10;
    s.excitation_window = 10.0;
    return s;
}

}  // namespace tsobs::example
