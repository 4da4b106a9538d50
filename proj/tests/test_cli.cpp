#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "app.hpp"
#include "config.hpp"
#include "support.hpp"
#include "tsobs/example.hpp"

using namespace tsobs;
using io::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    fs::path dir = fs::temp_directory_path() / "tsobs_cli_tests" / (std::string(info->test_suite_name()) + "_" + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const fs::path& dir, const json& j) {
    const fs::path path = dir / "config.json";
    std::ofstream(path) << j.dump(2);
    return path.string();
}

json example_config_json(const fs::path& out) {
    app::RunConfig config = app::example_config();
    config.scenario.t_end = 10.0;
    config.scenario.theta_profile = {{0.0, Vector::Constant(1, 0.5)}, {5.0, Vector::Constant(1, 0.3)}};
    config.outputs.directory = out.string();
    return app::to_json(config);
}

json toy_model(double a11) {
    return {{"kind", "takagi_sugeno"},
            {"dimensions", {{"n", 2}, {"n_u", 0}, {"n_y", 1}, {"n_p", 0}, {"n_theta", 0}}},
            {"premises", json::array()},
            {"vertices", {{{"A", {{a11, 0.0}, {0.0, -1.0}}}}}},
            {"C", {{0.0, 1.0}}}};
}

}  // namespace

TEST(Cli, DesignOnExampleSucceeds) {
    const fs::path dir = scratch_dir();
    const std::string cfg = write_config(dir, example_config_json(dir / "out"));
    EXPECT_EQ(app::run_command("design", cfg, {}), 0);
    const json design = io::read_json_file((dir / "out" / "design.json").string());
    EXPECT_LE(design["beta"][0].get<double>(), 1e-6);
    const json cert = io::read_json_file((dir / "out" / "certification.json").string());
    EXPECT_TRUE(cert["overall_pass"].get<bool>());
    EXPECT_TRUE(fs::exists(dir / "out" / "conic_program.json"));

    EXPECT_EQ(app::run_command("certify", cfg, {}), 0);
}

TEST(Cli, ObjectiveOverride) {
    const fs::path dir = scratch_dir();
    const std::string cfg = write_config(dir, example_config_json(dir / "out"));
    app::Overrides o;
    o.objective = Objective::MaxGamma;
    EXPECT_EQ(app::run_command("design", cfg, o), 0);
    const json design = io::read_json_file((dir / "out" / "design.json").string());
    EXPECT_EQ(design["objective"], "max_gamma");
    EXPECT_GE(design["theta_bar_max"].get<double>(), 0.5);
}

TEST(Cli, DegeneratePremiseIsInvalidInput) {
    const fs::path dir = scratch_dir();
    json j = example_config_json(dir / "out");
    j["param_affine_model"]["premises"][0]["max"] = 0.0;
    EXPECT_EQ(app::run_command("design", write_config(dir, j), {}), 4);
}

TEST(Cli, TwoModelsAreInvalidInput) {
    const fs::path dir = scratch_dir();
    json j = example_config_json(dir / "out");
    j["ts_model"] = toy_model(-1.0);
    EXPECT_EQ(app::run_command("design", write_config(dir, j), {}), 4);
    EXPECT_EQ(app::run_command("design", std::nullopt, {}), 4);
    EXPECT_EQ(app::run_command("design", (dir / "missing.json").string(), {}), 4);
}

TEST(Cli, ModelByPath) {
    const fs::path dir = scratch_dir();
    json j = example_config_json(dir / "out");
    std::ofstream(dir / "model.json") << j["param_affine_model"].dump();
    j["param_affine_model"] = "model.json";
    EXPECT_EQ(app::run_command("design", write_config(dir, j), {}), 0);
}

TEST(Cli, UnobservableUnstableModelIsInfeasible) {
    const fs::path dir = scratch_dir();
    const json j = {{"ts_model", toy_model(1.0)},
                    {"design", {{"objective", "feasibility"}}},
                    {"outputs", {{"directory", (dir / "out").string()}}}};
    EXPECT_EQ(app::run_command("design", write_config(dir, j), {}), 2);
}

TEST(Cli, UnwritableOutputIsOutputFailure) {
    const fs::path dir = scratch_dir();
    std::ofstream(dir / "blocker") << "x";
    const std::string cfg = write_config(dir, example_config_json(dir / "blocker" / "out"));
    EXPECT_EQ(app::run_command("design", cfg, {}), 6);
}

TEST(Cli, DivergenceExitCode) {
    const fs::path dir = scratch_dir();
    TSModel m = std::get<TSModel>(io::model_from_json(toy_model(5.0)));
    ObserverDesign d;
    d.P = Matrix::Identity(2, 2);
    d.Q = Matrix::Identity(2, 2);
    d.M = {Matrix::Zero(2, 1)};
    d.L = d.M;
    d.C_pinv = Matrix::Zero(2, 1);
    d.H = Matrix::Identity(2, 2);
    d.beta = Vector::Zero(0);
    d.rho = Vector::Zero(0);
    const json j = {{"ts_model", io::to_json(m)},
                    {"observer", io::to_json(d)},
                    {"scenario", {{"t_end", 20.0}, {"dt", 0.01}, {"x0", {1.0, 1.0}}}},
                    {"outputs", {{"directory", (dir / "out").string()}, {"emit_plots", false}}}};
    EXPECT_EQ(app::run_command("simulate", write_config(dir, j), {}), 5);
    EXPECT_TRUE(fs::exists(dir / "out" / "diagnostics.json"));
}

TEST(Cli, SimulateWritesOutputs) {
    const fs::path dir = scratch_dir();
    const std::string cfg = write_config(dir, example_config_json(dir / "out"));
    app::Overrides o;
    o.t_end = 60.0;
    o.dt = 0.01;
    EXPECT_EQ(app::run_command("simulate", cfg, o), 0);
    for (const char* f : {"trajectory.csv", "diagnostics.json", "design.json", "err_states.svg",
                          "theta_tracking.svg", "input.svg", "weights.svg"}) {
        EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
    }
    const json diag = io::read_json_file((dir / "out" / "diagnostics.json").string());
    EXPECT_FALSE(diag["diverged"].get<bool>());
    EXPECT_EQ(diag["windows"].size(), 2u);
}

TEST(Cli, InvalidOverrideIsInvalidInput) {
    const fs::path dir = scratch_dir();
    const std::string cfg = write_config(dir, example_config_json(dir / "out"));
    app::Overrides o;
    o.dt = -1.0;
    EXPECT_EQ(app::run_command("simulate", cfg, o), 4);
}

TEST(Cli, ReproduceExample) {
    const fs::path dir = scratch_dir();
    app::Overrides o;
    o.out = (dir / "out").string();
    EXPECT_EQ(app::run_command("reproduce-example", std::nullopt, o), 0);
    for (const char* f : {"err_states.svg", "theta_tracking.svg", "input.svg", "weights.svg", "summary.json"}) {
        EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
    }
    const json s = io::read_json_file((dir / "out" / "summary.json").string());
    EXPECT_TRUE(s["decomposition"]["exact"].get<bool>());
    EXPECT_EQ(s["decomposition"]["A1_11"].get<double>(), -1.4);
    EXPECT_EQ(s["decomposition"]["A2_23"].get<double>(), 0.0);
    EXPECT_FALSE(s["theorem1_applicable"].get<bool>());
    EXPECT_NEAR(s["H"][2][2].get<double>(), 1.0, 1e-12);
    EXPECT_NEAR(s["H"][0][0].get<double>(), 0.0, 1e-12);
    EXPECT_LE(s["beta_1"].get<double>(), 1e-6);
}

TEST(Cli, ExitCodesAreDistinct) {
    using app::ExitCode;
    EXPECT_EQ(app::exit_code_for(ModelError("", "x")), ExitCode::InvalidInput);
    EXPECT_EQ(app::exit_code_for(InfeasibleError("x", 1, 1)), ExitCode::Infeasible);
    EXPECT_EQ(app::exit_code_for(SolverError("x")), ExitCode::SolverFailure);
    EXPECT_EQ(app::exit_code_for(app::OutputError("x")), ExitCode::OutputFailure);
}

TEST(ConfigProperty, RoundTripIsExact) {
    std::mt19937_64 rng(909);
    for (int trial = 0; trial < 100; ++trial) {
        Dimensions d = fixtures::random_dims(rng, 3, 2, 2);
        if (trial % 2 == 0 && d.n_p == 0) d.n_p = 1;
        app::RunConfig c;
        if (trial % 2 == 0) {
            c.model = fixtures::random_param_affine(rng, d);
        } else {
            c.model = fixtures::random_stable_ts_model(rng, d);
        }
        c.design.objective = trial % 3 == 0 ? Objective::MaxGamma : Objective::MinBeta;
        c.design.theta_bar = fixtures::uniform(rng, 0.01, 1.0);
        c.design.rho = (fixtures::random_matrix(rng, d.n_theta, 1).array().abs() + 0.5).matrix();
        c.design.pd_margin = fixtures::uniform(rng, 1e-8, 1e-4);
        c.scenario.t_end = fixtures::uniform(rng, 1.0, 20.0);
        c.scenario.dt = fixtures::uniform(rng, 1e-4, 1e-2);
        c.scenario.x0 = fixtures::random_matrix(rng, d.n, 1);
        c.scenario.xhat0 = Vector::Zero(d.n);
        c.scenario.thetahat0 = Vector::Zero(d.n_theta);
        c.scenario.theta_profile = {{0.0, fixtures::random_matrix(rng, d.n_theta, 1)}};
        c.scenario.inputs.assign(static_cast<std::size_t>(d.n_u), InputSignal::prbs(1.0, 0.3, rng()));
        c.scenario.rho = Vector::Ones(d.n_theta);
        c.outputs.directory = "run_" + std::to_string(trial);
        c.outputs.emit_plots = trial % 2 == 1;

        const json j = app::to_json(c);
        const app::RunConfig back = app::run_config_from_json(json::parse(j.dump()));
        ASSERT_EQ(app::to_json(back).dump(), j.dump()) << trial;
        EXPECT_TRUE(back.scenario.x0 == c.scenario.x0) << trial;
        EXPECT_EQ(back.design.theta_bar, c.design.theta_bar) << trial;
    }
}
