#pragma once

#include <optional>
#include <string>

#include "tsobs/io.hpp"

namespace tsobs::app {

struct OutputOptions {
    std::string directory = "out";
    bool emit_csv = true;
    bool emit_plots = true;
    bool emit_report = true;
};

// One run: a model, the synthesis settings, a simulation scenario and,
// optionally, a precomputed observer design.
struct RunConfig {
    io::AnyModel model;
    DesignSpec design;
    SimScenario scenario;
    std::optional<ObserverDesign> observer;
    OutputOptions outputs;

    TSModel ts_model() const { return io::to_ts_model(model); }
};

// Model and observer entries may be inline documents or file paths; relative
// paths are resolved against base_dir. The model is given under exactly one
// of "param_affine_model", "ts_model" or "model" (dispatching on "kind").
RunConfig run_config_from_json(const io::json& j, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

// Everything inline, so the document is self-contained.
io::json to_json(const RunConfig& config);

}  // namespace tsobs::app
