#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsobs/lmi.hpp"
#include "tsobs/tsmodel.hpp"

namespace tsobs {

// Scalar excitation signal for one input channel.
struct InputSignal {
    enum class Kind { Zero, Constant, Multisine, Prbs };
    Kind kind = Kind::Zero;
    double value = 0.0;  // Constant level, Prbs amplitude
    std::vector<double> amplitudes;
    std::vector<double> frequencies;  // Hz
    std::vector<double> phases;       // rad
    double dwell = 1.0;               // Prbs switching period, s
    std::uint64_t seed = 42;

    static InputSignal zero() { return {}; }
    static InputSignal constant(double c);
    static InputSignal multisine(std::vector<double> amplitudes, std::vector<double> frequencies,
                                 std::vector<double> phases);
    static InputSignal prbs(double amplitude, double dwell, std::uint64_t seed);

    void validate(const std::string& path) const;
};

std::string to_string(InputSignal::Kind kind);

// Deterministic value at time t. Multisine: sum_k a_k sin(2 pi f_k t + phi_k);
// Prbs: +-amplitude, one fixed-seed draw per dwell interval.
double make_input(const InputSignal& signal, double t);

struct ThetaBreakpoint {
    double t = 0.0;
    Vector theta;
};

struct SimScenario {
    double t_end = 10.0;
    double dt = 1e-3;
    Vector x0;
    Vector xhat0;
    Vector thetahat0;
    std::vector<ThetaBreakpoint> theta_profile;  // piecewise constant, first at t = 0
    std::vector<InputSignal> inputs;             // one per input channel
    Vector rho;
    int record_stride = 1;
    double excitation_window = 10.0;  // s, window for the regressor energy diagnostic

    void validate(const Dimensions& dims) const;

    // Integration step count and recorded sample count.
    long long step_count() const;
    long long sample_count() const;
};

struct ObserverState {
    Vector x;
    Vector xhat;
    Vector thetahat;
};

// Input as a function of time.
using InputFunction = std::function<Vector(double)>;

// One classical RK4 step of the coupled plant / adaptive observer starting
// at time t. The premise is recomputed from (y, u) at every stage; theta is
// held constant over the step.
ObserverState step(const TSModel& model, const ObserverDesign& design, const Vector& rho,
                   const ObserverState& state, const Vector& theta, const InputFunction& input,
                   double t, double dt);

// Overload with an input held constant over the step.
ObserverState step(const TSModel& model, const ObserverDesign& design, const Vector& rho,
                   const ObserverState& state, const Vector& theta, const Vector& u, double dt);

// Column k of each matrix is sample k.
struct Trajectory {
    Dimensions dims;
    Vector t;
    Matrix x, xhat, theta, thetahat, mu, u, y, yhat, ey;
    Vector V;
    std::vector<std::uint8_t> saturated;
    Vector rho;
    bool diverged = false;  // a state left the finite range or exceeded 1e12 in norm
    bool schedule_truncated = false;  // schedule entries beyond t_end were ignored

    Eigen::Index samples() const { return t.size(); }
};

struct ExcitationDiagnostics {
    Vector mu_min, mu_max, mu_variance;  // per submodel
    Vector regressor_mean_square;        // per parameter
    Vector regressor_min_window_energy;  // per parameter
    double window = 0.0;
    int window_count = 0;
    long long saturated_samples = 0;
};

struct SimulationResult {
    Trajectory trajectory;
    ExcitationDiagnostics diagnostics;
};

SimulationResult run(const TSModel& model, const ObserverDesign& design, const SimScenario& scenario);

Vector theta_at(const SimScenario& scenario, double t);

ExcitationDiagnostics compute_diagnostics(const TSModel& model, const ObserverDesign& design,
                                          const Trajectory& trajectory, double window);

// CSV: t, x1..xn, xhat1..xhatn, theta_1.., thetahat_1.., mu_1.., u_1.., ey_1.., V, sat
std::string trajectory_csv_header(const Dimensions& dims);
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);
// Reads the CSV columns back; y and yhat are not part of the file and stay empty.
Trajectory read_trajectory_csv(std::istream& is, const Dimensions& dims);

}  // namespace tsobs
