#pragma once

#include <stdexcept>
#include <string>

namespace tsobs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid model, design, scenario or config document. `path` is a JSON
// pointer into the offending document (empty when not document-bound).
class ModelError : public Error {
public:
    ModelError(std::string path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// The conic program has no strictly feasible point. `slack_lower_bound` is the
// certified lower bound on the phase-I slack (positive means infeasible).
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& message, double slack, double slack_lower_bound)
        : Error(message), slack_(slack), slack_lower_bound_(slack_lower_bound) {}

    double slack() const noexcept { return slack_; }
    double slack_lower_bound() const noexcept { return slack_lower_bound_; }

private:
    double slack_;
    double slack_lower_bound_;
};

// Numerical breakdown of the interior-point iteration; distinct from
// infeasibility.
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace tsobs
