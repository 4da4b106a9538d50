#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "tsobs/certify.hpp"
#include "tsobs/error.hpp"

namespace tsobs::app {

// Process exit status, one per outcome category.
enum class ExitCode : int {
    Ok = 0,
    CheckFailed = 1,     // certification or example reproduction check failed
    Infeasible = 2,
    SolverFailure = 3,   // numerical breakdown or other internal failure
    InvalidInput = 4,    // config, model or command line invalid
    Diverged = 5,
    OutputFailure = 6,
};

class OutputError : public Error {
public:
    using Error::Error;
};

ExitCode exit_code_for(const std::exception& e);

struct Overrides {
    std::optional<std::string> out;
    std::optional<Objective> objective;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<double> t_end;
};

// Applies command-line overrides and re-validates the affected parts.
void apply_overrides(RunConfig& config, const Overrides& overrides);

CertifyOptions certify_options(const Overrides& overrides);

// Run settings for the embedded example.
RunConfig example_config();

// Per constant-theta window of a run: errors at the last sample of the
// window and the Lyapunov audit over it.
struct WindowReport {
    double t_begin = 0.0;
    double t_end = 0.0;  // time of the last sample in the window
    double state_error = 0.0;
    double parameter_error = 0.0;           // max_j |theta_j - thetahat_j|
    double relative_parameter_error = 0.0;  // max_j |e_theta_j| / |theta_j| (absolute where theta_j = 0)
    LyapunovAudit audit;
};

std::vector<WindowReport> window_reports(const Trajectory& trajectory, const ObserverDesign& design,
                                         const SimScenario& scenario);

struct ReproductionCheck {
    bool exact = true;
    std::vector<std::string> mismatches;
};

// Bitwise comparison of the decomposed example against its published vertex matrices.
ReproductionCheck check_example_decomposition(const TSModel& model);

ExitCode cmd_design(const RunConfig& config, const CertifyOptions& options = {});
ExitCode cmd_simulate(const RunConfig& config, const CertifyOptions& options = {});
ExitCode cmd_certify(const RunConfig& config, const CertifyOptions& options = {});
ExitCode cmd_reproduce_example(const RunConfig& config, const CertifyOptions& options = {});

// Loads the config (if any), applies overrides, dispatches and maps
// exceptions to exit codes.
int run_command(const std::string& command, const std::optional<std::string>& config_path,
                const Overrides& overrides);

// TSOBS_LOG: trace, debug, info, warn, error, critical or off.
void configure_logging();

}  // namespace tsobs::app
