#include "app.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "svg.hpp"
#include "tsobs/example.hpp"

namespace tsobs::app {

namespace fs = std::filesystem;
using io::json;

ExitCode exit_code_for(const std::exception& e) {
    if (dynamic_cast<const OutputError*>(&e)) return ExitCode::OutputFailure;
    if (dynamic_cast<const ModelError*>(&e)) return ExitCode::InvalidInput;
    if (dynamic_cast<const InfeasibleError*>(&e)) return ExitCode::Infeasible;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return ExitCode::InvalidInput;
    if (dynamic_cast<const nlohmann::json::exception*>(&e)) return ExitCode::InvalidInput;
    return ExitCode::SolverFailure;
}

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("tsobs");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("TSOBS_LOG")) {
        const auto level = spdlog::level::from_str(env);
        if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    }
}

void apply_overrides(RunConfig& config, const Overrides& o) {
    if (o.out) config.outputs.directory = *o.out;
    const auto& dims = config.ts_model().dims;
    if (o.objective) {
        config.design.objective = *o.objective;
        config.design.validate(dims.n_theta);
    }
    if (o.seed) {
        for (auto& in : config.scenario.inputs) in.seed = *o.seed;
    }
    if (o.dt) config.scenario.dt = *o.dt;
    if (o.t_end) config.scenario.t_end = *o.t_end;
    if (o.dt || o.t_end) config.scenario.validate(dims);
}

CertifyOptions certify_options(const Overrides& o) {
    CertifyOptions options;
    if (o.seed) options.robust_seed = static_cast<unsigned>(*o.seed);
    return options;
}

RunConfig example_config() {
    RunConfig config;
    config.model = example::param_affine_model();
    config.design = example::design_spec();
    config.scenario = example::scenario();
    config.outputs.directory = "example_out";
    return config;
}

namespace {

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw OutputError("cannot create output directory '" + dir + "'");
}

std::string output_path(const RunConfig& config, const char* name) {
    return (fs::path(config.outputs.directory) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw OutputError("cannot write '" + path + "'");
    out << text;
    out.close();
    if (!out) throw OutputError("failed writing '" + path + "'");
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string infeasibility_hint(const TSModel& model, const DesignSpec& spec) {
    if (model.dims.n_theta == 0 || spec.objective == Objective::MaxGamma) {
        return "the nominal observer inequalities have no solution, so objective max_gamma cannot help either; "
               "check detectability of (A_i, C)";
    }
    DesignSpec relaxed = spec;
    relaxed.objective = Objective::MaxGamma;
    relaxed.theta_bar.reset();
    try {
        const ObserverDesign d = solve_design(model, relaxed);
        std::ostringstream os;
        os << "try --objective max_gamma: the largest certifiable theta_bar is " << d.theta_bar_max
           << " (requested " << spec.theta_bar.value_or(0.0) << ")";
        return os.str();
    } catch (const InfeasibleError&) {
        return "max_gamma is infeasible as well; the nominal observer inequalities have no solution";
    } catch (const Error& e) {
        return std::string("try --objective max_gamma (probe failed: ") + e.what() + ")";
    }
}

ObserverDesign run_design(const TSModel& model, const DesignSpec& spec) {
    spdlog::info("solving {} design (n={}, r={}, n_theta={})", to_string(spec.objective), model.dims.n,
                 model.dims.r(), model.dims.n_theta);
    try {
        ObserverDesign d = solve_design(model, spec);
        spdlog::info("design done: gamma={:.6g} theta_bar_max={:.6g} newton_steps={}", d.gamma,
                     d.theta_bar_max, d.stats.newton_steps);
        return d;
    } catch (const InfeasibleError& e) {
        throw InfeasibleError(std::string(e.what()) + "; " + infeasibility_hint(model, spec), e.slack(),
                              e.slack_lower_bound());
    }
}

CertificationReport run_certification(const TSModel& model, const ObserverDesign& design,
                                       const CertifyOptions& options) {
    CertificationReport report = certify(model, design, options);
    for (const auto& c : report.conditions) {
        spdlog::debug("{}: margin={:.6g} {}", c.id, c.margin, c.pass ? "pass" : "FAIL");
    }
    if (report.overall_pass) {
        spdlog::info("certification passed; certified theta_bar={:.6g}", report.theta_bar_certified);
    } else {
        spdlog::error("certification failed");
        for (const auto& c : report.conditions) {
            if (c.mandatory && !c.pass) spdlog::error("  {}: margin {:.6g}", c.id, c.margin);
        }
    }
    return report;
}

Series row_series(const std::string& label, const Vector& t, const Matrix& m, Eigen::Index row,
                  bool dashed = false) {
    Series s;
    s.label = label;
    s.dashed = dashed;
    s.x.assign(t.data(), t.data() + t.size());
    s.y.resize(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.cols(); ++k) s.y[static_cast<std::size_t>(k)] = m(row, k);
    return s;
}

void write_plots(const RunConfig& config, const Trajectory& tr) {
    const auto& d = tr.dims;
    const Matrix ex = tr.x - tr.xhat;

    Panel errors{"State estimation error", "t [s]", "x - xhat", {}};
    for (int k = 0; k < d.n; ++k) errors.series.push_back(row_series("e_x" + std::to_string(k + 1), tr.t, ex, k));
    write_text(output_path(config, "err_states.svg"), render_svg({errors}));

    std::vector<Panel> theta_panels;
    for (int j = 0; j < d.n_theta; ++j) {
        const std::string idx = std::to_string(j + 1);
        Panel p{"Parameter " + idx + " and its estimate", "t [s]", "theta_" + idx, {}};
        p.series.push_back(row_series("theta_" + idx, tr.t, tr.theta, j));
        p.series.push_back(row_series("thetahat_" + idx, tr.t, tr.thetahat, j, true));
        theta_panels.push_back(std::move(p));
    }
    write_text(output_path(config, "theta_tracking.svg"), render_svg(theta_panels));

    Panel input{"Input", "t [s]", "u", {}};
    for (int k = 0; k < d.n_u; ++k) input.series.push_back(row_series("u" + std::to_string(k + 1), tr.t, tr.u, k));
    write_text(output_path(config, "input.svg"), render_svg({input}));

    Panel weights{"Membership weights", "t [s]", "mu", {}};
    for (int i = 0; i < d.r(); ++i) {
        weights.series.push_back(row_series("mu_" + std::to_string(i + 1), tr.t, tr.mu, i));
    }
    write_text(output_path(config, "weights.svg"), render_svg({weights}));
}

json window_json(const WindowReport& w) {
    return {{"t_begin", w.t_begin},
            {"t_end", w.t_end},
            {"state_error", w.state_error},
            {"parameter_error", w.parameter_error},
            {"relative_parameter_error", w.relative_parameter_error},
            {"lyapunov", io::to_json(w.audit)}};
}

struct SimulationOutcome {
    SimulationResult result;
    std::vector<WindowReport> windows;
};

SimulationOutcome run_simulation(const RunConfig& config, const TSModel& model, const ObserverDesign& design) {
    spdlog::info("simulating {} s at dt={} ({} steps)", config.scenario.t_end, config.scenario.dt,
                 config.scenario.step_count());
    SimulationOutcome out;
    out.result = run(model, design, config.scenario);
    const Trajectory& tr = out.result.trajectory;
    out.windows = window_reports(tr, design, config.scenario);

    if (config.outputs.emit_csv) {
        std::ostringstream csv;
        write_trajectory_csv(csv, tr);
        write_text(output_path(config, "trajectory.csv"), csv.str());
    }
    json windows = json::array();
    for (const auto& w : out.windows) windows.push_back(window_json(w));
    json diagnostics = {{"excitation", io::to_json(out.result.diagnostics)},
                        {"windows", windows},
                        {"diverged", tr.diverged},
                        {"schedule_truncated", tr.schedule_truncated},
                        {"samples", tr.samples()},
                        {"t_final", tr.samples() > 0 ? tr.t(tr.samples() - 1) : 0.0}};
    write_json(output_path(config, "diagnostics.json"), diagnostics);
    if (config.outputs.emit_plots && tr.samples() > 0) write_plots(config, tr);

    for (const auto& w : out.windows) {
        spdlog::info("window [{:g}, {:g}]: |e_x|={:.3g} |e_theta|/|theta|={:.3g} V nonincreasing {:.2f}%",
                     w.t_begin, w.t_end, w.state_error, w.relative_parameter_error,
                     100.0 * w.audit.nonincreasing_fraction);
    }
    if (out.result.diagnostics.saturated_samples > 0) {
        spdlog::warn("premise left its sector at {} recorded samples", out.result.diagnostics.saturated_samples);
    }
    return out;
}

ObserverDesign obtain_design(const RunConfig& config, const TSModel& model) {
    if (config.observer) return *config.observer;
    ObserverDesign d = run_design(model, config.design);
    write_json(output_path(config, "design.json"), io::to_json(d));
    return d;
}

}  // namespace

std::vector<WindowReport> window_reports(const Trajectory& tr, const ObserverDesign& design,
                                         const SimScenario& scenario) {
    std::vector<WindowReport> out;
    if (tr.samples() == 0) return out;
    const double t_last = tr.t(tr.samples() - 1);
    for (std::size_t w = 0; w < scenario.theta_profile.size(); ++w) {
        const double begin = scenario.theta_profile[w].t;
        if (begin > t_last) break;
        double end = t_last;
        if (w + 1 < scenario.theta_profile.size()) {
            end = std::min(end, scenario.theta_profile[w + 1].t - 0.5 * scenario.dt);
        }
        Eigen::Index last = -1;
        for (Eigen::Index k = 0; k < tr.samples(); ++k) {
            if (tr.t(k) >= begin && tr.t(k) <= end) last = k;
        }
        if (last < 0) continue;
        WindowReport r;
        r.t_begin = begin;
        r.t_end = tr.t(last);
        r.state_error = (tr.x.col(last) - tr.xhat.col(last)).norm();
        for (Eigen::Index j = 0; j < tr.theta.rows(); ++j) {
            const double e = std::abs(tr.theta(j, last) - tr.thetahat(j, last));
            const double th = std::abs(tr.theta(j, last));
            r.parameter_error = std::max(r.parameter_error, e);
            r.relative_parameter_error = std::max(r.relative_parameter_error, th > 0.0 ? e / th : e);
        }
        r.audit = lyapunov_decrease_audit(tr, design, begin, r.t_end);
        out.push_back(r);
    }
    return out;
}

ReproductionCheck check_example_decomposition(const TSModel& m) {
    const auto ref = example::reference_matrices();
    ReproductionCheck check;
    const auto expect = [&](const std::string& name, const Matrix& got, const Matrix& want) {
        const bool same = got.rows() == want.rows() && got.cols() == want.cols() && got == want;
        if (!same) {
            check.exact = false;
            check.mismatches.push_back(name);
        }
    };
    if (m.dims.r() != 2 || m.dims.n_theta != 1) {
        check.exact = false;
        check.mismatches.push_back("dimensions");
        return check;
    }
    expect("A1", m.A[0], ref.A1);
    expect("A2", m.A[1], ref.A2);
    expect("Abar11", m.transmission[0][0].A, ref.A_bar);
    expect("Abar21", m.transmission[1][0].A, ref.A_bar);
    expect("B1", m.B[0], ref.B);
    expect("B2", m.B[1], ref.B);
    expect("Bbar11", m.transmission[0][0].B, ref.B_bar);
    expect("Bbar21", m.transmission[1][0].B, ref.B_bar);
    expect("Fbar11", m.transmission[0][0].F, ref.F_bar);
    expect("Fbar21", m.transmission[1][0].F, ref.F_bar);
    expect("C", m.C, ref.C);
    return check;
}

ExitCode cmd_design(const RunConfig& config, const CertifyOptions& options) {
    const TSModel model = config.ts_model();
    ensure_directory(config.outputs.directory);
    if (config.outputs.emit_report) {
        write_json(output_path(config, "conic_program.json"),
                   io::to_json(build_constraints(model, config.design).program));
    }
    const ObserverDesign design = run_design(model, config.design);
    write_json(output_path(config, "design.json"), io::to_json(design));
    const CertificationReport report = run_certification(model, design, options);
    if (config.outputs.emit_report) {
        json j = io::to_json(report);
        j["rank_conditions"] = io::to_json(check_rank_conditions(model));
        write_json(output_path(config, "certification.json"), j);
    }
    return report.overall_pass ? ExitCode::Ok : ExitCode::CheckFailed;
}

ExitCode cmd_certify(const RunConfig& config, const CertifyOptions& options) {
    const TSModel model = config.ts_model();
    ObserverDesign design;
    if (config.observer) {
        design = *config.observer;
    } else {
        const std::string path = output_path(config, "design.json");
        if (!fs::exists(path)) throw ModelError("/observer", "no observer design in the config and no " + path);
        design = io::design_from_json(io::read_json_file(path), model);
    }
    ensure_directory(config.outputs.directory);
    const CertificationReport report = run_certification(model, design, options);
    json j = io::to_json(report);
    j["rank_conditions"] = io::to_json(check_rank_conditions(model));
    write_json(output_path(config, "certification.json"), j);
    return report.overall_pass ? ExitCode::Ok : ExitCode::CheckFailed;
}

ExitCode cmd_simulate(const RunConfig& config, const CertifyOptions&) {
    const TSModel model = config.ts_model();
    ensure_directory(config.outputs.directory);
    const ObserverDesign design = obtain_design(config, model);
    const SimulationOutcome sim = run_simulation(config, model, design);
    if (sim.result.trajectory.diverged) {
        spdlog::error("simulation diverged at t={:g}",
                      sim.result.trajectory.t(sim.result.trajectory.samples() - 1));
        return ExitCode::Diverged;
    }
    return ExitCode::Ok;
}

ExitCode cmd_reproduce_example(const RunConfig& config, const CertifyOptions& options) {
    ensure_directory(config.outputs.directory);
    write_json(output_path(config, "config.json"), to_json(config));

    const TSModel model = config.ts_model();
    const ReproductionCheck decomposition = check_example_decomposition(model);
    if (decomposition.exact) {
        spdlog::info("sector decomposition matches the published vertex matrices bit for bit");
    } else {
        spdlog::error("sector decomposition differs in {} matrices", decomposition.mismatches.size());
    }

    const ObserverDesign design = run_design(model, config.design);
    write_json(output_path(config, "design.json"), io::to_json(design));
    const CertificationReport report = run_certification(model, design, options);
    const RankReport ranks = check_rank_conditions(model);
    json cert = io::to_json(report);
    cert["rank_conditions"] = io::to_json(ranks);
    write_json(output_path(config, "certification.json"), cert);

    const SimulationOutcome sim = run_simulation(config, model, design);

    const Matrix& P = design.P;
    const double p_norm = P.norm();
    const double off_block = std::max(std::abs(P(0, 2)), std::abs(P(1, 2)));
    json paper_P = io::matrix_to_json((Matrix(3, 3) << 1.169, 0.657, -4.7e-14, 0.657, 1.153, -3.3e-14,
                                       -4.7e-14, -3.3e-14, 1.365).finished());
    json windows = json::array();
    for (const auto& w : sim.windows) windows.push_back(window_json(w));
    json summary = {
        {"decomposition",
         {{"exact", decomposition.exact},
          {"mismatches", decomposition.mismatches},
          {"A1_11", model.A[0](0, 0)},
          {"A2_23", model.A[1](1, 2)}}},
        {"beta", io::vector_to_json(design.beta)},
        {"beta_1", design.beta(0)},
        {"published_beta_1", 1.31e-13},
        {"P", io::matrix_to_json(P)},
        {"published_P", paper_P},
        {"P_off_block",
         {{"P13", P(0, 2)},
          {"P23", P(1, 2)},
          {"max_abs", off_block},
          {"relative_to_frobenius", off_block / p_norm},
          {"published_P13", -4.7e-14},
          {"published_P23", -3.3e-14}}},
        {"H", io::matrix_to_json(design.H)},
        {"theorem1_applicable", ranks.rank_conditions_hold},
        {"certification_pass", report.overall_pass},
        {"theta_bar_certified", report.theta_bar_certified},
        {"L", {io::matrix_to_json(design.L[0]), io::matrix_to_json(design.L[1])}},
        {"simulation",
         {{"diverged", sim.result.trajectory.diverged},
          {"saturated_samples", sim.result.diagnostics.saturated_samples},
          {"windows", windows}}}};
    write_json(output_path(config, "summary.json"), summary);
    spdlog::info("beta_1={:.3g} (published 1.31e-13), |P13|,|P23| <= {:.3g} |P|_F", design.beta(0),
                 off_block / p_norm);

    if (sim.result.trajectory.diverged) return ExitCode::Diverged;
    if (!decomposition.exact || !report.overall_pass) return ExitCode::CheckFailed;
    return ExitCode::Ok;
}

int run_command(const std::string& command, const std::optional<std::string>& config_path,
                const Overrides& overrides) {
    try {
        RunConfig config;
        if (config_path) {
            config = load_run_config(*config_path);
        } else if (command == "reproduce-example") {
            config = example_config();
        } else {
            throw ModelError("", "--config is required for '" + command + "'");
        }
        apply_overrides(config, overrides);
        const CertifyOptions options = certify_options(overrides);

        ExitCode code = ExitCode::InvalidInput;
        if (command == "design") {
            code = cmd_design(config, options);
        } else if (command == "simulate") {
            code = cmd_simulate(config, options);
        } else if (command == "certify") {
            code = cmd_certify(config, options);
        } else if (command == "reproduce-example") {
            code = cmd_reproduce_example(config, options);
        } else {
            throw ModelError("", "unknown command '" + command + "'");
        }
        return static_cast<int>(code);
    } catch (const std::exception& e) {
        const ExitCode code = exit_code_for(e);
        spdlog::error("{}", e.what());
        return static_cast<int>(code);
    }
}

}  // namespace tsobs::app
