// muntzlab: batch front end for the exponential-system laboratory.
//
//   muntzlab run --config <path> [--precision-override <bits>] [--out <dir>]
//   muntzlab validate --config <path>

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "muntz/cli/config.hpp"
#include "muntz/cli/run.hpp"

namespace {

int print_config_error(const muntz::ConfigError& e)
{
    std::cerr << e.what() << "\n";
    return muntz::cli::kExitUsage;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"High-precision laboratory for exponential systems, biorthogonal families and the diagonal operator"};
    app.require_subcommand(1);

    std::string run_config;
    long precision_override = 0;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "Run the configured stages and write CSV/JSON outputs");
    run->add_option("--config", run_config, "JSON run configuration")->required();
    run->add_option("--precision-override", precision_override, "Mantissa bits, replaces the config value")
        ->check(CLI::Range(128L, 1L << 20));
    run->add_option("--out", out_dir, "Output directory, replaces output_dir from the config");

    std::string validate_config;
    auto* validate = app.add_subcommand("validate", "Check a configuration without running it");
    validate->add_option("--config", validate_config, "JSON run configuration")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : muntz::cli::kExitUsage;
    }

    if (*validate) {
        try {
            const auto cfg = muntz::cli::load_config(validate_config);
            std::cout << "config ok: " << cfg.exponents.values.size() << " exponents, " << cfg.commands.size()
                      << " stages\n";
            return muntz::cli::kExitOk;
        } catch (const muntz::ConfigError& e) {
            return print_config_error(e);
        }
    }

    try {
        muntz::cli::RunOptions opts;
        if (run->count("--precision-override"))
            opts.precision_override = precision_override;
        if (run->count("--out"))
            opts.output_dir = out_dir;
        const auto outcome = muntz::cli::run(muntz::cli::load_config(run_config), opts);
        const auto& report = outcome.report;
        for (const auto& a : report["assertions"])
            std::cout << (a["passed"].get<bool>() ? "ok     " : "FAILED ") << a["name"].get<std::string>() << "  "
                      << a["value"].get<std::string>() << " " << a["relation"].get<std::string>() << " "
                      << a["threshold"].get<std::string>() << "\n";
        if (report.contains("error"))
            std::cerr << "error: " << report["error"]["message"].get<std::string>() << "\n";
        std::cout << "status " << report["status"].get<std::string>() << ", outputs in "
                  << outcome.output_dir.string() << "\n";
        return outcome.exit_code;
    } catch (const muntz::ConfigError& e) {
        return print_config_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return muntz::cli::kExitUsage;
    }
}
