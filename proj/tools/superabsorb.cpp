// superabsorb: command-line driver for the figure-data generators

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "superabsorb/config.hpp"
#include "superabsorb/errors.hpp"
#include "superabsorb/reports.hpp"

namespace {

enum ExitCode { ok = 0, config_error = 2, capacity_error = 3, numerical_error = 4 };

struct Flags {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<double> tol;
    bool print_config = false;
};

} // namespace

int main(int argc, char** argv)
{
    using namespace superabsorb;

    CLI::App app{"Superabsorption ring simulations: tables for the ladder, transient and disorder studies"};
    app.require_subcommand(1);
    Flags flags;
    for (const auto& name : config::commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", flags.config_path, "JSON file overriding the command defaults");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--seed", flags.seed, "base seed for trajectories and disorder draws");
        sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--tol", flags.tol, "ODE tolerance")->check(CLI::PositiveNumber);
        sub->add_flag("--print-config", flags.print_config, "print the resolved configuration and exit");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        config::RunConfig cfg = flags.config_path.empty() ? config::resolve(command, nlohmann::json::object())
                                                          : config::load(command, flags.config_path);
        if (flags.out) cfg.output_dir = *flags.out;
        if (flags.seed) cfg.seed = *flags.seed;
        if (flags.threads) cfg.threads = *flags.threads;
        if (flags.tol) cfg.solver.tol = *flags.tol;
        config::validate(cfg);
        if (flags.print_config) {
            std::cout << config::to_json(cfg).dump(2) << "\n";
            return ok;
        }
        const auto bundle = reports::run(cfg);
        reports::write_bundle(bundle, cfg.output_dir);
        std::cout << bundle.summary.dump(2) << "\n";
        return ok;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return config_error;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return capacity_error;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return numerical_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return numerical_error;
    }
}
