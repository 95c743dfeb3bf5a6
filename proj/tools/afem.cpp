// Command-line runner for the adaptive Stokes solver.
//
//   afem run --config example4.cfg [--out-csv table.csv] [--plot rates.svg]

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "afem/driver.hpp"
#include "afem/elements.hpp"
#include "afem/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Adaptive finite elements for Stokes flow with point forces"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run the adaptive loop described by a config file");
    std::string config_path, out_csv, dump_mesh, dump_indicators, plot;
    bool quiet = false;
    run->add_option("--config", config_path, "Configuration file (key = value lines)")->required();
    run->add_option("--out-csv", out_csv, "Write the convergence table as CSV");
    run->add_option("--dump-mesh", dump_mesh, "Write the final mesh");
    run->add_option("--dump-indicators", dump_indicators, "Write the final element indicators");
    run->add_option("--plot", plot, "Write a log-log SVG of estimator and error against Ndof");
    run->add_flag("-q,--quiet", quiet, "Suppress per-iteration output");

    CLI11_PARSE(app, argc, argv);

    try {
        afem::RunConfig config = afem::load_config(config_path);
        if (!out_csv.empty()) config.out_csv = out_csv;
        if (!dump_mesh.empty()) config.dump_mesh = dump_mesh;
        if (!dump_indicators.empty()) config.dump_indicators = dump_indicators;
        if (!plot.empty()) config.plot = plot;

        if (!quiet)
            std::printf("%4s %9s %8s %13s %13s %8s %8s %8s\n", "iter", "ndof", "elems", "estimator", "error",
                        "eoc_est", "eoc_err", "eff");
        auto observer = [&](const afem::ConvergenceRow& r) {
            if (quiet) return;
            std::printf("%4d %9d %8d %13.6e %13.6e %8.4f %8.4f %8.4f\n", r.iteration, r.ndof, r.elements, r.estimator,
                        r.err_total.value_or(0.0), r.eoc_est.value_or(0.0), r.eoc_err.value_or(0.0),
                        r.effectivity.value_or(0.0));
            std::fflush(stdout);
        };
        afem::RunResult result = afem::run_afem(config, observer);
        if (!quiet) std::printf("stopped: %s\n", afem::to_string(result.stop));

        if (!config.out_csv.empty()) afem::write_csv(config.out_csv, result.table);
        if (!config.dump_mesh.empty()) afem::write_mesh(config.dump_mesh, result.mesh);
        if (!config.dump_indicators.empty()) afem::write_indicators(config.dump_indicators, result.indicators);
        if (!config.plot.empty())
            afem::write_svg_plot(config.plot, result.table, afem::to_string(config.scheme.family));
    } catch (const std::exception& e) {
        std::cerr << "afem: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
