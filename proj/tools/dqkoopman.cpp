// Command-line front end: simulate | fit | control | compare.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dqk/commands.hpp"
#include "dqk/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dual-quaternion Koopman rigid-body modeling and LQR control"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    bool quiet = false;
    app.add_option("--config", config_path, "TOML scenario file (bundled default when omitted)");
    app.add_option("--seed", seed, "override the master seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--quiet", quiet, "suppress progress output");

    auto* simulate = app.add_subcommand("simulate", "open-loop simulation under a constant body-frame force and torque");
    auto* fit = app.add_subcommand("fit", "identify the lifted linear model from excitation data");
    auto* control = app.add_subcommand("control", "run the data-driven LQR closed loop");
    auto* compare = app.add_subcommand("compare", "cost table over observable dictionaries and orders");
    for (auto* sub : {simulate, fit, control, compare}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        dqk::ScenarioConfig cfg = config_path.empty() ? dqk::parse_scenario(dqk::default_config_text(), "default")
                                                      : dqk::load_scenario(config_path);
        if (seed) cfg.seed = *seed;
        const dqk::CommandOptions opt{out_dir, quiet};

        if (simulate->parsed()) dqk::cmd_simulate(cfg, opt);
        if (fit->parsed()) dqk::cmd_fit(cfg, opt);
        if (control->parsed()) dqk::cmd_control(cfg, opt);
        if (compare->parsed()) dqk::cmd_compare(cfg, opt);
    } catch (const dqk::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const dqk::NumericalError& e) {
        std::cerr << "numerical failure in " << e.module() << ": " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
