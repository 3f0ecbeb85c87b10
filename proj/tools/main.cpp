// frontlab: spectrum, front, simulate, verify and sweep subcommands.

#include <CLI11.hpp>

#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "frontlab/cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace frontlab::cli;

    CLI::App app{"frontlab: stability experiments for reaction-diffusion travelling fronts"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "./out";
    std::uint64_t seed = 42;

    const std::map<std::string, std::function<int(const Config&, const CommandContext&)>> commands{
        {"spectrum", cmd_spectrum}, {"front", cmd_front},  {"simulate", [](const Config& c, const CommandContext& x) {
                                                               return cmd_simulate(c, x, false);
                                                           }},
        {"verify", cmd_verify},     {"sweep", cmd_sweep},
    };
    const std::map<std::string, std::string> blurbs{
        {"spectrum", "essential spectrum sweeps, abscissas and semigroup envelope"},
        {"front", "travelling-front shooting or orbit conservation check"},
        {"simulate", "evolve a perturbation and record norms and snapshots"},
        {"verify", "simulate and check the decay verdict"},
        {"sweep", "run spectrum or verify over a list of parameter values"},
    };
    for (const auto& [name, blurb] : blurbs) {
        auto* sub = app.add_subcommand(name, blurb);
        sub->add_option("--config", config_path, "scenario file")->required();
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "random seed")->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const Config cfg = Config::load(config_path);
        CommandContext ctx;
        ctx.out_dir = out_dir;
        ctx.seed = seed;
        const int rc = commands.at(name)(cfg, ctx);
        std::cout << name << ": " << (rc == 0 ? "pass" : "fail") << " (outputs in " << out_dir << ")\n";
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
