#include "config.hpp"

#include <filesystem>

#include "tsobs/error.hpp"

namespace tsobs::app {

namespace fs = std::filesystem;

namespace {

// Inline object, or a path string to a JSON file.
io::json resolve(const io::json& j, const std::string& base_dir, const std::string& path) {
    if (j.is_object()) return j;
    if (!j.is_string()) throw ModelError(path, "expected an inline object or a file path");
    fs::path p = j.get<std::string>();
    if (p.is_relative()) p = fs::path(base_dir) / p;
    if (!fs::exists(p)) throw ModelError(path, "file not found: " + p.string());
    return io::read_json_file(p.string());
}

bool flag(const io::json& j, const char* key, bool fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_boolean()) throw ModelError(std::string("/outputs/") + key, "expected a boolean");
    return it->get<bool>();
}

}  // namespace

RunConfig run_config_from_json(const io::json& j, const std::string& base_dir) {
    if (!j.is_object()) throw ModelError("", "config must be a JSON object");
    RunConfig config;

    int given = 0;
    for (const char* key : {"param_affine_model", "ts_model", "model"}) given += j.contains(key) ? 1 : 0;
    if (given != 1) {
        throw ModelError("", "exactly one of param_affine_model, ts_model or model must be given");
    }
    // Error paths inside the model point into the model document.
    if (j.contains("param_affine_model")) {
        config.model = io::param_affine_from_json(resolve(j["param_affine_model"], base_dir, "/param_affine_model"));
    } else if (j.contains("ts_model")) {
        config.model = io::ts_model_from_json(resolve(j["ts_model"], base_dir, "/ts_model"));
    } else {
        config.model = io::model_from_json(resolve(j["model"], base_dir, "/model"));
    }
    const TSModel ts = config.ts_model();
    const auto& dims = ts.dims;

    config.design = io::design_spec_from_json(j.value("design", io::json::object()), dims.n_theta);
    config.scenario = io::scenario_from_json(j.value("scenario", io::json::object()), dims);
    if (j.contains("observer")) {
        config.observer = io::design_from_json(resolve(j["observer"], base_dir, "/observer"), ts);
    }
    if (j.contains("outputs")) {
        const io::json& o = j["outputs"];
        if (!o.is_object()) throw ModelError("/outputs", "expected an object");
        if (o.contains("directory")) {
            if (!o["directory"].is_string()) throw ModelError("/outputs/directory", "expected a string");
            config.outputs.directory = o["directory"].get<std::string>();
        }
        config.outputs.emit_csv = flag(o, "emit_csv", true);
        config.outputs.emit_plots = flag(o, "emit_plots", true);
        config.outputs.emit_report = flag(o, "emit_report", true);
    }
    return config;
}

RunConfig load_run_config(const std::string& path) {
    const io::json j = io::read_json_file(path);
    const fs::path parent = fs::path(path).parent_path();
    return run_config_from_json(j, parent.empty() ? "." : parent.string());
}

io::json to_json(const RunConfig& config) {
    io::json j;
    if (const auto* pam = std::get_if<ParamAffineModel>(&config.model)) {
        j["param_affine_model"] = io::to_json(*pam);
    } else {
        j["ts_model"] = io::to_json(std::get<TSModel>(config.model));
    }
    j["design"] = io::to_json(config.design);
    j["scenario"] = io::to_json(config.scenario);
    if (config.observer) j["observer"] = io::to_json(*config.observer);
    j["outputs"] = {{"directory", config.outputs.directory},
                    {"emit_csv", config.outputs.emit_csv},
                    {"emit_plots", config.outputs.emit_plots},
                    {"emit_report", config.outputs.emit_report}};
    return j;
}

}  // namespace tsobs::app
