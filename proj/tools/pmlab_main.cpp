// Command line front end: `pmlab list` prints the scenario catalog,
// `pmlab run <config.json>` executes one scenario and reports its checks.
// Exit codes: 0 all checks passed, 1 a check failed, 2 bad configuration,
// 3 solver breakdown.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "pml/scenarios.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Finite-difference laboratory for the porous medium equation"};
    app.require_subcommand(1);

    CLI::App* list_cmd =
        app.add_subcommand("list", "print the available scenarios");

    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    bool verbose = false;
    CLI::App* run_cmd = app.add_subcommand("run", "execute one scenario");
    run_cmd->add_option("config", config_path, "JSON config file")->required();
    CLI::Option* out_opt = run_cmd->add_option(
        "--output-dir", output_dir, "override the config's output directory");
    CLI::Option* seed_opt =
        run_cmd->add_option("--seed", seed, "override the config's seed");
    run_cmd->add_flag("--verbose", verbose, "print every check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (list_cmd->parsed()) {
        std::fputs(pml::list_scenarios().c_str(), stdout);
        return 0;
    }

    try {
        pml::ExperimentConfig cfg = pml::load_config(config_path);
        if (out_opt->count() > 0) cfg.output_dir = output_dir;
        if (seed_opt->count() > 0) cfg.seed = seed;

        pml::RunResult r = pml::run_scenario(cfg);
        int passed = 0;
        for (const pml::CheckResult& c : r.checks) {
            passed += c.pass;
            if (verbose || !c.pass)
                std::printf("[%s] %s%s%s\n", c.pass ? "pass" : "FAIL",
                            c.name.c_str(), c.detail.empty() ? "" : ": ",
                            c.detail.c_str());
        }
        std::printf("%s: %d/%zu checks passed, artifacts in %s\n",
                    cfg.scenario.c_str(), passed, r.checks.size(),
                    cfg.output_dir.c_str());
        return r.exit_code;
    } catch (const pml::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
