#include <CLI11.hpp>

#include <spdlog/spdlog.h>

#include "app.hpp"

int main(int argc, char** argv) {
    using namespace tsobs;
    app::configure_logging();

    CLI::App cli{"Adaptive observer design and simulation for Takagi-Sugeno systems"};
    cli.require_subcommand(1);

    std::optional<std::string> config_path;
    app::Overrides overrides;
    std::string objective;
    const auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config_path, "Run configuration (JSON)");
        if (config_required) c->required()->check(CLI::ExistingFile);
        sub->add_option("--out", overrides.out, "Output directory");
        sub->add_option("--objective", objective, "Synthesis objective")
            ->check(CLI::IsMember({"min_beta", "max_gamma", "feasibility"}));
        sub->add_option("--seed", overrides.seed, "Seed for PRBS inputs and sampled checks");
        sub->add_option("--dt", overrides.dt, "Integration step [s]")->check(CLI::PositiveNumber);
        sub->add_option("--t-end", overrides.t_end, "Simulation horizon [s]")->check(CLI::PositiveNumber);
    };
    add_common(cli.add_subcommand("design", "Solve the observer synthesis problem and certify it"), true);
    add_common(cli.add_subcommand("simulate", "Run the plant and adaptive observer"), true);
    add_common(cli.add_subcommand("certify", "Re-verify an observer design"), true);
    add_common(cli.add_subcommand("reproduce-example", "Run the embedded three-state example end to end"), false);

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : static_cast<int>(app::ExitCode::InvalidInput);
    }
    if (!objective.empty()) overrides.objective = objective_from_string(objective);

    const std::string command = cli.get_subcommands().front()->get_name();
    return app::run_command(command, config_path, overrides);
}
