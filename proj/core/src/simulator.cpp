#include "tsobs/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "tsobs/error.hpp"

namespace tsobs {

InputSignal InputSignal::constant(double c) {
    InputSignal s;
    s.kind = Kind::Constant;
    s.value = c;
    return s;
}

InputSignal InputSignal::multisine(std::vector<double> amplitudes, std::vector<double> frequencies,
                                   std::vector<double> phases) {
    InputSignal s;
    s.kind = Kind::Multisine;
    s.amplitudes = std::move(amplitudes);
    s.frequencies = std::move(frequencies);
    s.phases = std::move(phases);
    return s;
}

InputSignal InputSignal::prbs(double amplitude, double dwell, std::uint64_t seed) {
    InputSignal s;
    s.kind = Kind::Prbs;
    s.value = amplitude;
    s.dwell = dwell;
    s.seed = seed;
    return s;
}

std::string to_string(InputSignal::Kind kind) {
    switch (kind) {
        case InputSignal::Kind::Zero: return "zero";
        case InputSignal::Kind::Constant: return "constant";
        case InputSignal::Kind::Multisine: return "multisine";
        case InputSignal::Kind::Prbs: return "prbs";
    }
    return "unknown";
}

void InputSignal::validate(const std::string& path) const {
    if (!std::isfinite(value)) throw ModelError(path, "signal level must be finite");
    if (kind == Kind::Multisine) {
        if (amplitudes.size() != frequencies.size() || amplitudes.size() != phases.size()) {
            throw ModelError(path, "multisine amplitudes, frequencies and phases must have equal length");
        }
        for (double v : amplitudes) {
            if (!std::isfinite(v)) throw ModelError(path + "/amplitudes", "non-finite entry");
        }
        for (double v : frequencies) {
            if (!std::isfinite(v)) throw ModelError(path + "/frequencies", "non-finite entry");
        }
        for (double v : phases) {
            if (!std::isfinite(v)) throw ModelError(path + "/phases", "non-finite entry");
        }
    }
    if (kind == Kind::Prbs && !(dwell > 0.0 && std::isfinite(dwell))) {
        throw ModelError(path + "/dwell", "dwell must be positive");
    }
}

double make_input(const InputSignal& signal, double t) {
    switch (signal.kind) {
        case InputSignal::Kind::Zero: return 0.0;
        case InputSignal::Kind::Constant: return signal.value;
        case InputSignal::Kind::Multisine: {
            double u = 0.0;
            for (std::size_t k = 0; k < signal.amplitudes.size(); ++k) {
                u += signal.amplitudes[k] *
                     std::sin(2.0 * std::numbers::pi * signal.frequencies[k] * t + signal.phases[k]);
            }
            return u;
        }
        case InputSignal::Kind::Prbs: {
            // One seeded draw per dwell interval.
            const auto index = static_cast<std::int64_t>(std::floor(t / signal.dwell));
            const auto k = static_cast<std::uint64_t>(index);
            std::seed_seq seq{static_cast<std::uint32_t>(signal.seed), static_cast<std::uint32_t>(signal.seed >> 32),
                              static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
            std::mt19937_64 gen(seq);
            return (gen() & 1u) ? signal.value : -signal.value;
        }
    }
    return 0.0;
}

void SimScenario::validate(const Dimensions& dims) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ModelError("/scenario/dt", "dt must be positive");
    if (!(t_end >= dt) || !std::isfinite(t_end)) throw ModelError("/scenario/t_end", "t_end must be at least dt");
    if (x0.size() != dims.n || !x0.allFinite()) throw ModelError("/scenario/x0", "expected n finite entries");
    if (xhat0.size() != dims.n || !xhat0.allFinite()) {
        throw ModelError("/scenario/xhat0", "expected n finite entries");
    }
    if (thetahat0.size() != dims.n_theta || !thetahat0.allFinite()) {
        throw ModelError("/scenario/thetahat0", "expected n_theta finite entries");
    }
    if (theta_profile.empty() || theta_profile.front().t != 0.0) {
        throw ModelError("/scenario/theta_profile", "schedule must start at t = 0");
    }
    for (std::size_t k = 0; k < theta_profile.size(); ++k) {
        const std::string path = "/scenario/theta_profile/" + std::to_string(k);
        if (k > 0 && !(theta_profile[k].t > theta_profile[k - 1].t)) {
            throw ModelError(path + "/t", "schedule times must be strictly increasing");
        }
        if (theta_profile[k].theta.size() != dims.n_theta || !theta_profile[k].theta.allFinite()) {
            throw ModelError(path + "/theta", "expected n_theta finite entries");
        }
    }
    if (static_cast<int>(inputs.size()) != dims.n_u) {
        throw ModelError("/scenario/input", "expected one signal per input channel");
    }
    for (std::size_t k = 0; k < inputs.size(); ++k) inputs[k].validate("/scenario/input/" + std::to_string(k));
    if (rho.size() != dims.n_theta) throw ModelError("/scenario/rho", "expected n_theta adaptation gains");
    for (Eigen::Index j = 0; j < rho.size(); ++j) {
        if (!(rho(j) > 0.0) || !std::isfinite(rho(j))) {
            throw ModelError("/scenario/rho/" + std::to_string(j), "adaptation gains must be positive");
        }
    }
    if (record_stride < 1) throw ModelError("/scenario/record_stride", "record_stride must be at least 1");
    if (!(excitation_window > 0.0)) {
        throw ModelError("/scenario/excitation_window", "excitation_window must be positive");
    }
}

long long SimScenario::step_count() const {
    return static_cast<long long>(std::floor(t_end / dt + 1e-9));
}

long long SimScenario::sample_count() const { return step_count() / record_stride + 1; }

namespace {

constexpr double kDivergenceBound = 1e12;

struct Derivative {
    Vector x;
    Vector xhat;
    Vector thetahat;
};

// Right-hand side of the coupled plant / observer / update law.
class CoupledDynamics {
public:
    CoupledDynamics(const TSModel& model, const ObserverDesign& design, const Vector& rho)
        : model_(model), design_(design), rho_(rho), gain_(design.P * design.C_pinv) {}

    Derivative operator()(const ObserverState& s, const Vector& theta, const Vector& u) const {
        const auto& d = model_.dims;
        const Vector y = model_.C * s.x;
        const Vector ey = y - model_.C * s.xhat;
        const Vector mu = eval_weights(model_, premise_from_io(model_, y, u).z);
        const Vector injected = gain_ * ey;

        Derivative out{Vector::Zero(d.n), Vector::Zero(d.n), Vector::Zero(d.n_theta)};
        for (int i = 0; i < d.r(); ++i) {
            if (mu(i) == 0.0) continue;
            Vector fx = model_.A[i] * s.x + model_.F[i].col(0);
            Vector fxh = model_.A[i] * s.xhat + model_.F[i].col(0) + design_.L[i] * ey;
            if (d.n_u > 0) {
                fx += model_.B[i] * u;
                fxh += model_.B[i] * u;
            }
            for (int j = 0; j < d.n_theta; ++j) {
                const auto& tr = model_.transmission[i][j];
                Vector reg_x = tr.A * s.x + tr.F.col(0);
                Vector reg_xh = tr.A * s.xhat + tr.F.col(0);
                if (d.n_u > 0) {
                    reg_x += tr.B * u;
                    reg_xh += tr.B * u;
                }
                fx += theta(j) * reg_x;
                fxh += s.thetahat(j) * reg_xh;
                out.thetahat(j) += mu(i) * reg_xh.dot(injected) / rho_(j);
            }
            out.x += mu(i) * fx;
            out.xhat += mu(i) * fxh;
        }
        return out;
    }

private:
    const TSModel& model_;
    const ObserverDesign& design_;
    const Vector& rho_;
    Matrix gain_;  // P C^+
};

ObserverState advance(const ObserverState& s, const Derivative& k, double h) {
    return {s.x + h * k.x, s.xhat + h * k.xhat, s.thetahat + h * k.thetahat};
}

void check_design(const TSModel& model, const ObserverDesign& design, const Vector& rho) {
    const auto& d = model.dims;
    if (design.P.rows() != d.n || design.P.cols() != d.n || static_cast<int>(design.L.size()) != d.r() ||
        design.C_pinv.rows() != d.n || design.C_pinv.cols() != d.n_y) {
        throw ModelError("", "observer design does not match the model dimensions");
    }
    for (const auto& l : design.L) {
        if (l.rows() != d.n || l.cols() != d.n_y) throw ModelError("", "observer gain has wrong shape");
    }
    if (rho.size() != d.n_theta) throw ModelError("", "expected n_theta adaptation gains");
}

}  // namespace

ObserverState step(const TSModel& model, const ObserverDesign& design, const Vector& rho,
                   const ObserverState& state, const Vector& theta, const InputFunction& input,
                   double t, double dt) {
    const CoupledDynamics f(model, design, rho);
    const Vector u_start = input(t);
    const Vector u_mid = input(t + 0.5 * dt);
    const Vector u_end = input(t + dt);
    const Derivative k1 = f(state, theta, u_start);
    const Derivative k2 = f(advance(state, k1, 0.5 * dt), theta, u_mid);
    const Derivative k3 = f(advance(state, k2, 0.5 * dt), theta, u_mid);
    const Derivative k4 = f(advance(state, k3, dt), theta, u_end);
    const double w = dt / 6.0;
    return {state.x + w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            state.xhat + w * (k1.xhat + 2.0 * k2.xhat + 2.0 * k3.xhat + k4.xhat),
            state.thetahat + w * (k1.thetahat + 2.0 * k2.thetahat + 2.0 * k3.thetahat + k4.thetahat)};
}

ObserverState step(const TSModel& model, const ObserverDesign& design, const Vector& rho,
                   const ObserverState& state, const Vector& theta, const Vector& u, double dt) {
    return step(model, design, rho, state, theta, [&u](double) { return u; }, 0.0, dt);
}

Vector theta_at(const SimScenario& scenario, double t) {
    const double tol = 1e-9 * scenario.dt;
    const ThetaBreakpoint* current = &scenario.theta_profile.front();
    for (const auto& bp : scenario.theta_profile) {
        if (bp.t <= t + tol) current = &bp;
    }
    return current->theta;
}

SimulationResult run(const TSModel& model, const ObserverDesign& design, const SimScenario& scenario) {
    model.validate();
    scenario.validate(model.dims);
    check_design(model, design, scenario.rho);

    const auto& d = model.dims;
    const long long steps = scenario.step_count();
    const auto samples = static_cast<Eigen::Index>(scenario.sample_count());

    SimulationResult result;
    Trajectory& tr = result.trajectory;
    tr.dims = d;
    tr.rho = scenario.rho;
    tr.t.resize(samples);
    tr.x.resize(d.n, samples);
    tr.xhat.resize(d.n, samples);
    tr.theta.resize(d.n_theta, samples);
    tr.thetahat.resize(d.n_theta, samples);
    tr.mu.resize(d.r(), samples);
    tr.u.resize(d.n_u, samples);
    tr.y.resize(d.n_y, samples);
    tr.yhat.resize(d.n_y, samples);
    tr.ey.resize(d.n_y, samples);
    tr.V.resize(samples);
    tr.saturated.assign(static_cast<std::size_t>(samples), 0);
    tr.schedule_truncated = scenario.theta_profile.back().t > scenario.t_end;

    const InputFunction input = [&scenario, n_u = d.n_u](double t) {
        Vector u(n_u);
        for (int k = 0; k < n_u; ++k) u(k) = make_input(scenario.inputs[static_cast<std::size_t>(k)], t);
        return u;
    };

    ObserverState state{scenario.x0, scenario.xhat0, scenario.thetahat0};
    Eigen::Index recorded = 0;
    for (long long k = 0;; ++k) {
        const double t = static_cast<double>(k) * scenario.dt;
        const Vector theta = theta_at(scenario, t);
        if (k % scenario.record_stride == 0) {
            const Vector u = input(t);
            const Vector y = model.C * state.x;
            const Vector yhat = model.C * state.xhat;
            const PremiseValue premise = premise_from_io(model, y, u);
            const Vector ex = state.x - state.xhat;
            const Vector etheta = theta - state.thetahat;
            tr.t(recorded) = t;
            tr.x.col(recorded) = state.x;
            tr.xhat.col(recorded) = state.xhat;
            tr.theta.col(recorded) = theta;
            tr.thetahat.col(recorded) = state.thetahat;
            tr.mu.col(recorded) = eval_weights(model, premise.z);
            tr.u.col(recorded) = u;
            tr.y.col(recorded) = y;
            tr.yhat.col(recorded) = yhat;
            tr.ey.col(recorded) = y - yhat;
            tr.V(recorded) = ex.dot(design.P * ex) + etheta.dot(scenario.rho.cwiseProduct(etheta));
            tr.saturated[static_cast<std::size_t>(recorded)] = premise.saturated ? 1 : 0;
            ++recorded;
        }
        if (k == steps) break;
        ObserverState next = step(model, design, scenario.rho, state, theta, input, t, scenario.dt);
        if (!next.x.allFinite() || !next.xhat.allFinite() || !next.thetahat.allFinite() ||
            next.x.norm() > kDivergenceBound || next.xhat.norm() > kDivergenceBound ||
            next.thetahat.norm() > kDivergenceBound) {
            tr.diverged = true;
            break;
        }
        state = std::move(next);
    }

    if (recorded < samples) {
        tr.t.conservativeResize(recorded);
        for (Matrix* m : {&tr.x, &tr.xhat, &tr.theta, &tr.thetahat, &tr.mu, &tr.u, &tr.y, &tr.yhat, &tr.ey}) {
            m->conservativeResize(Eigen::NoChange, recorded);
        }
        tr.V.conservativeResize(recorded);
        tr.saturated.resize(static_cast<std::size_t>(recorded));
    }
    result.diagnostics = compute_diagnostics(model, design, tr, scenario.excitation_window);
    return result;
}

ExcitationDiagnostics compute_diagnostics(const TSModel& model, const ObserverDesign& design,
                                          const Trajectory& tr, double window) {
    const auto& d = model.dims;
    const Eigen::Index ns = tr.samples();
    ExcitationDiagnostics diag;
    diag.window = window;
    diag.saturated_samples = std::count(tr.saturated.begin(), tr.saturated.end(), std::uint8_t{1});
    diag.mu_min = Vector::Zero(d.r());
    diag.mu_max = Vector::Zero(d.r());
    diag.mu_variance = Vector::Zero(d.r());
    diag.regressor_mean_square = Vector::Zero(d.n_theta);
    diag.regressor_min_window_energy = Vector::Zero(d.n_theta);
    if (ns == 0) return diag;

    for (int i = 0; i < d.r(); ++i) {
        const auto row = tr.mu.row(i);
        diag.mu_min(i) = row.minCoeff();
        diag.mu_max(i) = row.maxCoeff();
        const double mean = row.mean();
        diag.mu_variance(i) = (row.array() - mean).square().mean();
    }

    // |phi_j|^2 with phi_j = sum_i mu_i (Abar_ij xhat + Bbar_ij u + Fbar_ij)^T P C^+
    const Matrix gain = design.P * design.C_pinv;
    Matrix phi_sq = Matrix::Zero(d.n_theta, ns);
    for (Eigen::Index k = 0; k < ns; ++k) {
        for (int j = 0; j < d.n_theta; ++j) {
            Vector reg = Vector::Zero(d.n);
            for (int i = 0; i < d.r(); ++i) {
                const auto& t = model.transmission[i][j];
                Vector term = t.A * tr.xhat.col(k) + t.F.col(0);
                if (d.n_u > 0) term += t.B * tr.u.col(k);
                reg += tr.mu(i, k) * term;
            }
            phi_sq(j, k) = (gain.transpose() * reg).squaredNorm();
        }
    }

    const double h = ns > 1 ? tr.t(1) - tr.t(0) : 0.0;
    const double duration = ns > 1 ? tr.t(ns - 1) - tr.t(0) : 0.0;
    // Window in samples; falls back to the whole run when the window is longer.
    Eigen::Index width = h > 0.0 ? static_cast<Eigen::Index>(std::llround(window / h)) : ns;
    if (window >= duration) width = ns;
    width = std::clamp<Eigen::Index>(width, 1, ns);
    diag.window_count = static_cast<int>(ns - width + 1);
    for (int j = 0; j < d.n_theta; ++j) {
        diag.regressor_mean_square(j) = phi_sq.row(j).mean();
        double energy = phi_sq.row(j).head(width).sum() * h;
        double min_energy = energy;
        for (Eigen::Index k = width; k < ns; ++k) {
            energy += (phi_sq(j, k) - phi_sq(j, k - width)) * h;
            min_energy = std::min(min_energy, energy);
        }
        diag.regressor_min_window_energy(j) = std::max(min_energy, 0.0);
    }
    return diag;
}

namespace {

void append_number(std::string& line, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    line.append(buf, res.ptr);
}

}  // namespace

std::string trajectory_csv_header(const Dimensions& dims) {
    std::string h = "t";
    for (int k = 1; k <= dims.n; ++k) h += ",x" + std::to_string(k);
    for (int k = 1; k <= dims.n; ++k) h += ",xhat" + std::to_string(k);
    for (int k = 1; k <= dims.n_theta; ++k) h += ",theta_" + std::to_string(k);
    for (int k = 1; k <= dims.n_theta; ++k) h += ",thetahat_" + std::to_string(k);
    for (int k = 1; k <= dims.r(); ++k) h += ",mu_" + std::to_string(k);
    for (int k = 1; k <= dims.n_u; ++k) h += ",u_" + std::to_string(k);
    for (int k = 1; k <= dims.n_y; ++k) h += ",ey_" + std::to_string(k);
    h += ",V,sat";
    return h;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << trajectory_csv_header(tr.dims) << '\n';
    std::string line;
    for (Eigen::Index k = 0; k < tr.samples(); ++k) {
        line.clear();
        append_number(line, tr.t(k));
        for (const Matrix* m : {&tr.x, &tr.xhat, &tr.theta, &tr.thetahat, &tr.mu, &tr.u, &tr.ey}) {
            for (Eigen::Index r = 0; r < m->rows(); ++r) {
                line += ',';
                append_number(line, (*m)(r, k));
            }
        }
        line += ',';
        append_number(line, tr.V(k));
        line += tr.saturated[static_cast<std::size_t>(k)] ? ",1" : ",0";
        os << line << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& is, const Dimensions& dims) {
    std::string line;
    if (!std::getline(is, line) || line != trajectory_csv_header(dims)) {
        throw ModelError("", "trajectory CSV header does not match the model dimensions");
    }
    std::vector<std::vector<double>> rows;
    const std::size_t width = 1 + 2 * dims.n + 2 * dims.n_theta + dims.r() + dims.n_u + dims.n_y + 2;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p <= end) {
            const char* comma = std::find(p, end, ',');
            double v = 0.0;
            const auto res = std::from_chars(p, comma, v);
            if (res.ec != std::errc() || res.ptr != comma) {
                throw ModelError("", "malformed number in trajectory CSV row " + std::to_string(rows.size() + 1));
            }
            row.push_back(v);
            p = comma + 1;
        }
        if (row.size() != width) {
            throw ModelError("", "wrong column count in trajectory CSV row " + std::to_string(rows.size() + 1));
        }
        rows.push_back(std::move(row));
    }

    Trajectory tr;
    tr.dims = dims;
    const auto ns = static_cast<Eigen::Index>(rows.size());
    tr.t.resize(ns);
    tr.x.resize(dims.n, ns);
    tr.xhat.resize(dims.n, ns);
    tr.theta.resize(dims.n_theta, ns);
    tr.thetahat.resize(dims.n_theta, ns);
    tr.mu.resize(dims.r(), ns);
    tr.u.resize(dims.n_u, ns);
    tr.ey.resize(dims.n_y, ns);
    tr.V.resize(ns);
    tr.saturated.resize(static_cast<std::size_t>(ns));
    for (Eigen::Index k = 0; k < ns; ++k) {
        const auto& row = rows[static_cast<std::size_t>(k)];
        std::size_t c = 0;
        tr.t(k) = row[c++];
        for (Matrix* m : {&tr.x, &tr.xhat, &tr.theta, &tr.thetahat, &tr.mu, &tr.u, &tr.ey}) {
            for (Eigen::Index r = 0; r < m->rows(); ++r) (*m)(r, k) = row[c++];
        }
        tr.V(k) = row[c++];
        tr.saturated[static_cast<std::size_t>(k)] = row[c] != 0.0 ? 1 : 0;
    }
    return tr;
}

}  // namespace tsobs
