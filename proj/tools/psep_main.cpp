#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "psep/cli.hpp"
#include "psep/errors.hpp"

namespace {

struct FlagSet {
    std::map<std::string, std::string> values;
    bool no_recenter = false;
    bool svg = false;
    bool dump_samples = false;
    std::string config;
};

void add_flags(CLI::App& app, FlagSet& flags) {
    const auto value = [&](const std::string& name, const std::string& help) {
        app.add_option_function<std::string>("--" + name, [&flags, name](const std::string& v) { flags.values[name] = v; },
                                             help);
    };
    value("dist", "distribution spec (see grammar below)");
    value("cdf-file", "tabulated cdf file with lines \"x F\"");
    value("n", "comma list of mesh sizes, increasing");
    value("p", "exponent p >= 1");
    value("K", "series truncation (default max(256, 8n))");
    value("grid", "boundary angle grid size (>= 64)");
    value("samples", "Monte Carlo sample count");
    value("paths", "disc paths for the time-change gap");
    value("dt", "Brownian step size, 0 < dt <= 1e-3");
    value("seed", "random seed");
    value("out", "output directory");
    app.add_flag("--no-recenter", flags.no_recenter, "keep the law as given instead of centring it");
    app.add_flag("--svg", flags.svg, "also write SVG curves");
    app.add_flag("--dump-samples", flags.dump_samples, "write exit samples as single-column CSV");
    app.add_option("--config", flags.config, "file of key=value lines mirroring the flags");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate mu-domains for the planar Skorokhod embedding problem"};
    app.footer(psep::kDistGrammar);
    app.require_subcommand(1);
    FlagSet flags;
    add_flags(app, flags);
    for (const char* name : {"boundary", "converge", "simulate"}) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
        sub->footer(psep::kDistGrammar);
    }
    app.get_subcommand("boundary")->description("write boundary_n<k>.csv curves");
    app.get_subcommand("converge")->description("write the convergence table");
    app.get_subcommand("simulate")->description("write the Monte Carlo report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    psep::Settings flag_settings = flags.values;
    if (flags.no_recenter) flag_settings["no-recenter"] = "true";
    if (flags.svg) flag_settings["svg"] = "true";
    if (flags.dump_samples) flag_settings["dump-samples"] = "true";

    psep::RunConfig cfg;
    try {
        const psep::Settings file = flags.config.empty() ? psep::Settings{} : psep::read_config_file(flags.config);
        cfg = psep::build_config(file, flag_settings);
    } catch (const psep::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    return psep::run_command(command, cfg, std::cout, std::cerr);
}
