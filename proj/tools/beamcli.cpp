#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "kvbeam/commands.hpp"

namespace {

struct CommonOpts {
    std::string config;
    std::string out = "out";
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config, "Path to the INI config file")->required();
    sub->add_option("--out", opts.out, "Output directory (created if missing)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Damped cantilever simulation and boundary-source recovery"};
    app.require_subcommand(1);

    CommonOpts simulate_o, invert_o, grad_o, const_o, table_o;
    auto* simulate = app.add_subcommand("simulate", "Run the direct solve and export traces");
    add_common(simulate, simulate_o);
    auto* invert = app.add_subcommand("invert", "Twin-data source reconstruction");
    add_common(invert, invert_o);
    auto* grad = app.add_subcommand("grad-check", "Adjoint gradient vs finite differences");
    add_common(grad, grad_o);
    auto* consts = app.add_subcommand("constants", "Evaluate the analysis constants bundle");
    add_common(consts, const_o);
    auto* table = app.add_subcommand("stability-table", "Tabulate (kappa0, C_ST) rows");
    add_common(table, table_o);

    CLI11_PARSE(app, argc, argv);

    try {
        auto origin = [](const std::string& p) {
            return std::filesystem::path(p).parent_path().string();
        };
        if (simulate->parsed())
            return kvbeam::cmd_simulate(kvbeam::parse_config(simulate_o.config), simulate_o.out);
        if (invert->parsed())
            return kvbeam::cmd_invert(kvbeam::parse_config(invert_o.config), invert_o.out,
                                      origin(invert_o.config));
        if (grad->parsed())
            return kvbeam::cmd_grad_check(kvbeam::parse_config(grad_o.config), grad_o.out,
                                          origin(grad_o.config));
        if (consts->parsed())
            return kvbeam::cmd_constants(kvbeam::parse_config(const_o.config), const_o.out);
        if (table->parsed())
            return kvbeam::cmd_stability_table(kvbeam::parse_config(table_o.config),
                                               table_o.out);
    } catch (const kvbeam::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const kvbeam::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
