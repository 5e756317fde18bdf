#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "erltv/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Realized Laplace transform of volatility: estimators, rate functions and deviation experiments"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Config file (INI)")->required()->check(CLI::ExistingFile);

    erltv::cli::SelftestOptions options;
    int forced_nodes = 0;
    auto* selftest = app.add_subcommand("selftest", "Run the fast invariant suite");
    auto* nodes_opt = selftest->add_option("--force-hermite-nodes", forced_nodes,
                                           "Pin the inner rule to Gauss-Hermite with N nodes")
                          ->check(CLI::Range(2, 2000));
    selftest->add_flag("--disable-tprime", options.disable_time_change,
                       "Ignore the time-change density in weighted quantities");

    app.add_subcommand("schema", "Print the config grammar");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : erltv::cli::Error;
    }

    if (run->parsed()) return erltv::cli::run(config_path, std::cout, std::cerr);
    if (selftest->parsed()) {
        if (nodes_opt->count() > 0) options.force_hermite_nodes = forced_nodes;
        return erltv::cli::selftest(options, std::cout);
    }
    return erltv::cli::schema(std::cout);
}
