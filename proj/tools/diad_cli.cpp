// Command-line frontend: spectrum | pulse | evolve | sweep | optimize | bench.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "diad/diad.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_path;
    int threads = 1;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw diad::ConfigError("cannot open output file '" + path + "'");
    out << content;
}

/// CSV goes to --out (or the config's output path, or stdout); the JSON
/// summary, when present, always goes to stdout.
void emit(const diad::CommandOutput& output, const diad::RunConfig& config,
          const CliArgs& args) {
    std::string out_path = args.out_path;
    if (out_path.empty() && config.output) out_path = *config.output;

    const std::string& table = output.csv.empty() ? output.aux_csv : output.csv;
    if (!table.empty()) {
        if (!out_path.empty())
            write_file(out_path, table);
        else if (output.summary.is_null())
            std::cout << table;
        else
            throw diad::ConfigError("this command writes both a table and a JSON summary; "
                                    "pass --out or set 'output' in the config for the table");
    }
    if (!output.csv.empty() && !output.aux_csv.empty()) {
        if (out_path.empty())
            throw diad::ConfigError("population export requires --out");
        write_file(out_path + ".populations.csv", output.aux_csv);
    }
    if (!output.summary.is_null()) std::cout << output.summary.dump(2) << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric diabatic-adiabatic pulse shaping for multi-level quantum systems"};
    app.require_subcommand(1);

    CliArgs args;
    const std::vector<std::string> names = {"spectrum", "pulse", "evolve",
                                            "sweep",    "optimize", "bench"};
    const std::vector<std::string> descriptions = {
        "Export the energy spectrum across the control range",
        "Generate a control pulse and export it on the time grid",
        "Propagate the configured transfer and report its fidelity",
        "Sweep exponents and pulse times; export the fidelity table",
        "Optimize the exponents at fixed pulse time",
        "Time pulse generation and report the median over repeats"};
    for (size_t i = 0; i < names.size(); ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
        sub->add_option("--config", args.config_path, "Path to the JSON run configuration")
            ->required();
        sub->add_option("--out", args.out_path, "Output path for the primary table");
        sub->add_option("--threads", args.threads, "Worker threads for sweeps and random search");
        sub->add_option("--seed", args.seed, "Override the optimizer seed")
            ->each([&](const std::string&) { args.seed_given = true; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const diad::RunConfig config = diad::parse_config_file(args.config_path);
        if (args.threads < 1) throw diad::ConfigError("--threads must be at least 1");
        diad::CommandOptions options;
        options.threads = args.threads;
        if (args.seed_given) options.seed = args.seed;

        diad::CommandOutput output;
        if (app.got_subcommand("spectrum")) output = diad::cmd_spectrum(config);
        else if (app.got_subcommand("pulse")) output = diad::cmd_pulse(config);
        else if (app.got_subcommand("evolve")) output = diad::cmd_evolve(config);
        else if (app.got_subcommand("sweep")) output = diad::cmd_sweep(config, options);
        else if (app.got_subcommand("optimize")) output = diad::cmd_optimize(config, options);
        else output = diad::cmd_bench(config);
        emit(output, config, args);
        return 0;
    } catch (const diad::ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const diad::ValidationError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const diad::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << std::endl;
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 3;
    }
}
